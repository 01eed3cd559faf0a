#pragma once

// Value types, tolerances, randomness and call instrumentation shared by the
// whole toolkit.

#include <Eigen/Dense>

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace duality {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors. InvalidArgument maps to CLI exit code 2, NumericalFailure to 3.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const char *what) {
  if (!cond) throw InvalidArgument(what);
}

inline bool all_finite(const Vector &x) { return x.allFinite(); }

/// Validates an input vector: nonempty and free of NaN/Inf.
inline const Vector &checked(const Vector &x) {
  require(x.size() > 0, "vector dimension must be positive");
  require(all_finite(x), "vector has non-finite coordinates");
  return x;
}

inline Vector make_vector(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// ---------------------------------------------------------------------------
// Descriptors
// ---------------------------------------------------------------------------

/// Finite encoding of a norm: k_lo * |x| <= nu(x) <= k_hi * |x|.
struct NormDescriptor {
  int n = 0;
  double k_lo = 0.0;
  double k_hi = 0.0;

  static NormDescriptor make(int n, double k_lo, double k_hi) {
    require(n > 0, "norm dimension must be positive");
    require(std::isfinite(k_lo) && std::isfinite(k_hi), "sandwich constants must be finite");
    require(k_lo > 0.0 && k_lo <= k_hi, "sandwich constants must satisfy 0 < k <= K");
    return NormDescriptor{n, k_lo, k_hi};
  }

  /// Constants of the dual norm: (1/K, 1/k).
  [[nodiscard]] NormDescriptor dual() const { return make(n, 1.0 / k_hi, 1.0 / k_lo); }
};

/// Centering data B(center, inner_radius) ⊆ K ⊆ B(center, outer_radius).
struct CenteredBody {
  Vector center;
  double inner_radius = 0.0;
  double outer_radius = 0.0;

  static CenteredBody make(Vector center, double inner, double outer) {
    checked(center);
    require(std::isfinite(inner) && std::isfinite(outer), "radii must be finite");
    require(inner > 0.0 && inner <= outer, "radii must satisfy 0 < r <= R");
    return CenteredBody{std::move(center), inner, outer};
  }

  [[nodiscard]] int dim() const { return static_cast<int>(center.size()); }
};

enum class WeakVerdict { InThickened, NotInShrunk };

inline const char *to_string(WeakVerdict v) {
  return v == WeakVerdict::InThickened ? "in-thickened" : "not-in-shrunk";
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval make(double lo, double hi) {
    require(lo <= hi, "interval must satisfy lo <= hi");
    return Interval{lo, hi};
  }
  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
  [[nodiscard]] bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Oracle call counter. Sharded so that concurrent Monte-Carlo workers do not
/// contend on one cache line; count() sums the shards.
class CallCounter {
 public:
  explicit CallCounter(std::string label = {}) : label_(std::move(label)) {}
  CallCounter(const CallCounter &) = delete;
  CallCounter &operator=(const CallCounter &) = delete;

  void increment() noexcept {
    shards_[shard_index()].value.fetch_add(1, std::memory_order_relaxed);
  }

  [[nodiscard]] std::uint64_t count() const noexcept {
    std::uint64_t total = 0;
    for (const auto &s : shards_) total += s.value.load(std::memory_order_relaxed);
    return total;
  }

  [[nodiscard]] const std::string &label() const noexcept { return label_; }

 private:
  static constexpr std::size_t kShards = 16;
  struct alignas(64) Shard {
    std::atomic<std::uint64_t> value{0};
  };

  static std::size_t shard_index() noexcept {
    static std::atomic<std::size_t> next{0};
    thread_local const std::size_t idx = next.fetch_add(1, std::memory_order_relaxed) % kShards;
    return idx;
  }

  std::string label_;
  std::array<Shard, kShards> shards_{};
};

using CounterPtr = std::shared_ptr<CallCounter>;

inline CounterPtr make_counter(std::string label) {
  return std::make_shared<CallCounter>(std::move(label));
}

/// Tolerances for the cutting-plane machinery.
///
/// line_search_tol is relative to a body's outer radius and subgradient_step
/// is relative to its inner radius; the absolute finite-difference step is
/// max(1e-5, subgradient_step * inner_radius).
struct ToleranceConfig {
  double line_search_tol = 1e-8;
  double subgradient_step = 1e-4;
  int max_cut_iterations = 20000;
  std::uint64_t rng_seed = 20240607;

  static ToleranceConfig make(double line_search_tol, double subgradient_step,
                              int max_cut_iterations, std::uint64_t seed) {
    require(line_search_tol > 0.0 && subgradient_step > 0.0, "tolerances must be positive");
    require(max_cut_iterations >= 1, "max_cut_iterations must be at least 1");
    return ToleranceConfig{line_search_tol, subgradient_step, max_cut_iterations, seed};
  }
};

// ---------------------------------------------------------------------------
// Counter-based random numbers: the i-th draw of stream s under seed k is a
// pure function of (k, s, i), so results do not depend on thread scheduling.
// ---------------------------------------------------------------------------

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next_u64() noexcept { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double normal() noexcept {
    // Box-Muller; one value per pair keeps the stream stateless.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vector normal_vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  /// Uniform direction on the Euclidean unit sphere.
  Vector unit_vector(int n) {
    Vector v = normal_vector(n);
    double nv = v.norm();
    while (nv == 0.0) {
      v = normal_vector(n);
      nv = v.norm();
    }
    return v / nv;
  }

  [[nodiscard]] std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Small vector operations
// ---------------------------------------------------------------------------

struct AnnulusScaling {
  Vector y;
  double factor = 1.0;
};

/// Rescales x onto the Euclidean unit sphere, which lies inside the working
/// annulus 1/2 < |y| < 3/2. x == factor * y.
inline AnnulusScaling scale_into_annulus(const Vector &x) {
  checked(x);
  const double nx = x.norm();
  if (nx == 0.0) throw InvalidArgument("cannot normalize zero vector");
  return AnnulusScaling{x / nx, nx};
}

/// Identifies z = x + i y in C^n with (x, y) in R^{2n}.
inline Vector complexify(const Vector &z_real, const Vector &z_imag) {
  if (z_real.size() != z_imag.size()) throw InvalidArgument("complexify: dimension mismatch");
  Vector out(z_real.size() + z_imag.size());
  out << z_real, z_imag;
  return out;
}

}  // namespace duality
