#pragma once

// Umbrella header for the whole toolkit.

#include "duality/core.hpp"
#include "duality/oracles.hpp"
#include "duality/reference.hpp"
#include "duality/cutting.hpp"
#include "duality/normdual.hpp"
#include "duality/conedual.hpp"
#include "duality/fenchel.hpp"
#include "duality/mahler.hpp"
