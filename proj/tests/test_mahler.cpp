#include "catch2/catch_amalgamated.hpp"
#include "test_support.hpp"

#include <cstdlib>

using namespace duality;
using Catch::Approx;

namespace {

constexpr std::uint64_t kSamples = 1000000;

VolumeEstimate ball_volume(double p, int n, std::uint64_t samples, std::uint64_t seed) {
  const auto norm = ReferenceNorm::lp(n, p);
  return volume_mc(norm.ball_oracle(), 1.0 / norm.descriptor().k_lo, samples, seed);
}

}  // namespace

TEST_CASE("ball volumes by rejection sampling", "[mahler]") {
  const std::uint64_t seed = ToleranceConfig{}.rng_seed;
  const auto disc = ball_volume(2.0, 2, kSamples, seed);
  CHECK(disc.covers(std::numbers::pi));
  const auto diamond = ball_volume(1.0, 2, kSamples, seed);
  CHECK(diamond.covers(2.0));
  const auto octahedron = ball_volume(1.0, 3, kSamples, seed);
  CHECK(octahedron.covers(4.0 / 3.0));
  CHECK(disc.samples == kSamples);
  CHECK(disc.relative_half_width() < 0.01);
}

TEST_CASE("95% intervals cover the true volume at the nominal rate", "[mahler][property]") {
  // 40 seeds; fewer than 34 covers has probability below 1e-3 at rate 0.95.
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) covered += ball_volume(1.0, 3, 100000, seed).covers(4.0 / 3.0);
  CHECK(covered >= 34);
}

TEST_CASE("volume sampling validates inputs", "[mahler]") {
  const auto o = ReferenceNorm::lp(7, 2.0).ball_oracle();
  CHECK_THROWS_AS(volume_mc(o, 1.0, 100, 1), InvalidArgument);
  const auto o2 = ReferenceNorm::lp(2, 2.0).ball_oracle();
  CHECK_THROWS_AS(volume_mc(o2, 0.0, 100, 1), InvalidArgument);
  CHECK_THROWS_AS(volume_mc(o2, 1.0, 0, 1), InvalidArgument);
}

TEST_CASE("quadrupling samples halves the half-width", "[mahler][property]") {
  const auto a = ball_volume(2.0, 2, 250000, 4);
  const auto b = ball_volume(2.0, 2, 1000000, 4);
  const double ratio = b.half_width_95 / a.half_width_95;
  CHECK(ratio == Approx(0.5).epsilon(0.2));
}

TEST_CASE("volume estimates do not depend on the worker count", "[mahler][property]") {
  const auto norm = ReferenceNorm::lp(3, 1.5);
  const auto o = norm.ball_oracle();
  ::setenv("DUALITY_THREADS", "1", 1);
  const auto one = volume_mc(o, 1.0 / norm.descriptor().k_lo, 200000, 5);
  ::setenv("DUALITY_THREADS", "4", 1);
  const auto four = volume_mc(o, 1.0 / norm.descriptor().k_lo, 200000, 5);
  ::unsetenv("DUALITY_THREADS");
  CHECK(one.mean == four.mean);
  CHECK(one.half_width_95 == four.half_width_95);
  CHECK(o.calls() == 400000);
}

TEST_CASE("Mahler volume of the Euclidean disc", "[mahler]") {
  const auto norm = ReferenceNorm::lp(2, 2.0);
  const ToleranceConfig cfg;
  const auto rep = mahler_run(norm.ball_oracle(), norm.descriptor(), kSamples, cfg);
  CHECK(rep.product.covers(std::numbers::pi * std::numbers::pi));
  CHECK(rep.product.relative_half_width() <= 0.03);
  CHECK(rep.primal_queries >= kSamples);
  CHECK(rep.dual_queries == kSamples);
}

TEST_CASE("Mahler volume is reproducible", "[mahler][property]") {
  const auto norm = ReferenceNorm::lp(2, 1.0);
  const ToleranceConfig cfg;
  const auto a = mahler_run(norm.ball_oracle(), norm.descriptor(), 20000, cfg);
  const auto b = mahler_run(norm.ball_oracle(), norm.descriptor(), 20000, cfg);
  CHECK(a.product.mean == b.product.mean);
  CHECK(a.primal_queries == b.primal_queries);
  CHECK(a.dual_queries == b.dual_queries);
  auto other = cfg;
  other.rng_seed += 1;
  CHECK(mahler_run(norm.ball_oracle(), norm.descriptor(), 20000, other).product.mean != a.product.mean);
}
