#pragma once

// Closed-form norms and cones used as ground truth.

#include "duality/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace duality {

struct LpKind {
  double p = 2.0;  // p in [1, inf]
};
struct WeightedL2Kind {
  Vector weights;  // nu(x) = sqrt(sum w_i x_i^2), w_i > 0
};
struct PolyhedralKind {
  Matrix rows;  // nu(x) = max_i |c_i^T x|, rows c_i
};

inline double lp_norm(const Vector &x, double p) {
  if (p == 1.0) return x.lpNorm<1>();
  if (p == 2.0) return x.norm();
  if (std::isinf(p)) return x.lpNorm<Eigen::Infinity>();
  const double m = x.lpNorm<Eigen::Infinity>();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

/// Hölder conjugate exponent, 1/p + 1/q = 1.
inline double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

class ReferenceNorm {
 public:
  using Kind = std::variant<LpKind, WeightedL2Kind, PolyhedralKind>;

  static ReferenceNorm lp(int n, double p) {
    require(n > 0, "norm dimension must be positive");
    require(p >= 1.0, "lp norm requires p >= 1");
    return ReferenceNorm(n, LpKind{p});
  }

  static ReferenceNorm weighted_l2(Vector weights) {
    checked(weights);
    require((weights.array() > 0.0).all(), "weights must be positive");
    const int n = static_cast<int>(weights.size());
    return ReferenceNorm(n, WeightedL2Kind{std::move(weights)});
  }

  static ReferenceNorm polyhedral(Matrix rows) {
    require(rows.rows() > 0 && rows.cols() > 0, "polyhedral norm needs generator rows");
    require(rows.allFinite(), "generator rows must be finite");
    const int n = static_cast<int>(rows.cols());
    return ReferenceNorm(n, PolyhedralKind{std::move(rows)});
  }

  [[nodiscard]] int dim() const noexcept { return n_; }
  [[nodiscard]] const Kind &kind() const noexcept { return kind_; }
  [[nodiscard]] const NormDescriptor &descriptor() const noexcept { return desc_; }

  [[nodiscard]] double eval(const Vector &x) const {
    if (x.size() != n_) throw InvalidArgument("norm eval: dimension mismatch");
    return std::visit(
        [&](const auto &k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, LpKind>) {
            return lp_norm(x, k.p);
          } else if constexpr (std::is_same_v<K, WeightedL2Kind>) {
            return std::sqrt((k.weights.array() * x.array().square()).sum());
          } else {
            return (k.rows * x).cwiseAbs().maxCoeff();
          }
        },
        kind_);
  }

  [[nodiscard]] bool member(const Vector &x) const { return eval(x) <= 1.0; }

  [[nodiscard]] std::string name() const {
    return std::visit(
        [](const auto &k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, LpKind>) {
            if (std::isinf(k.p)) return "l_inf";
            std::string s = std::to_string(k.p);
            s.erase(s.find_last_not_of('0') + 1);
            if (s.back() == '.') s.pop_back();
            return "l_" + s;
          } else if constexpr (std::is_same_v<K, WeightedL2Kind>) {
            return "weighted_l2";
          } else {
            return "polyhedral";
          }
        },
        kind_);
  }

  /// Closed-form dual norm.
  [[nodiscard]] ReferenceNorm dual() const {
    return std::visit(
        [&](const auto &k) -> ReferenceNorm {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, LpKind>) {
            return lp(n_, conjugate_exponent(k.p));
          } else if constexpr (std::is_same_v<K, WeightedL2Kind>) {
            return weighted_l2(k.weights.cwiseInverse());
          } else {
            if (is_signed_permutation(k.rows)) return lp(n_, 1.0);
            if (is_all_sign_patterns(k.rows)) return lp(n_, kInf);
            throw InvalidArgument("no closed-form dual");
          }
        },
        kind_);
  }

  /// Weak membership oracle for the unit ball, answered exactly.
  [[nodiscard]] WmemOracle ball_oracle(std::string label = "primal") const {
    auto self = *this;
    return exact_to_weak(
        n_, [self](const Vector &x) { return self.eval(x) <= 1.0; },
        CenteredBody::make(Vector::Zero(n_), 1.0 / desc_.k_hi, 1.0 / desc_.k_lo), std::move(label));
  }

  /// Approximation oracle returning the exact value (legal for every delta).
  [[nodiscard]] NormApproxOracle approx_oracle(std::string label = "approx") const {
    auto self = *this;
    return NormApproxOracle(
        desc_, [self](const Vector &x, double) { return self.eval(x); }, make_counter(std::move(label)));
  }

 private:
  ReferenceNorm(int n, Kind kind) : n_(n), kind_(std::move(kind)) {
    desc_ = compute_descriptor();
    audit_sandwich();
  }

  static bool is_signed_permutation(const Matrix &c) {
    if (c.rows() != c.cols()) return false;
    std::vector<int> seen(static_cast<std::size_t>(c.cols()), 0);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      int nonzero = 0;
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        const double v = c(i, j);
        if (v == 0.0) continue;
        if (std::abs(v) != 1.0) return false;
        ++nonzero;
        ++seen[static_cast<std::size_t>(j)];
      }
      if (nonzero != 1) return false;
    }
    return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
  }

  // Rows are ±1 vectors covering every sign pattern up to a global sign, so
  // max_i |c_i^T x| = |x|_1.
  static bool is_all_sign_patterns(const Matrix &c) {
    const auto n = c.cols();
    if (n > 20) return false;
    if (!(c.array().abs() == 1.0).all()) return false;
    const std::uint64_t patterns = std::uint64_t{1} << (n - 1);
    std::vector<bool> hit(patterns, false);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      const double s0 = c(i, 0);
      std::uint64_t code = 0;
      for (Eigen::Index j = 1; j < n; ++j)
        if (c(i, j) * s0 < 0.0) code |= std::uint64_t{1} << (j - 1);
      hit[code] = true;
    }
    return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
  }

  NormDescriptor compute_descriptor() const {
    const double nd = static_cast<double>(n_);
    double k = 0.0;
    double big = 0.0;
    std::visit(
        [&](const auto &kk) {
          using K = std::decay_t<decltype(kk)>;
          if constexpr (std::is_same_v<K, LpKind>) {
            const double inv_p = std::isinf(kk.p) ? 0.0 : 1.0 / kk.p;
            const double factor = std::pow(nd, inv_p - 0.5);
            if (kk.p <= 2.0) {
              k = 1.0;
              big = factor;
            } else {
              k = factor;
              big = 1.0;
            }
          } else if constexpr (std::is_same_v<K, WeightedL2Kind>) {
            k = std::sqrt(kk.weights.minCoeff());
            big = std::sqrt(kk.weights.maxCoeff());
          } else {
            // |c_i^T u| <= |c_i| and max_i |c_i^T u| >= |C u| / sqrt(m).
            big = kk.rows.rowwise().norm().maxCoeff();
            Eigen::JacobiSVD<Matrix> svd(kk.rows);
            const double smin = svd.singularValues().minCoeff();
            if (!(smin > 0.0) || kk.rows.rows() < kk.rows.cols())
              throw InvalidArgument("polyhedral generators must have full column rank");
            k = smin / std::sqrt(static_cast<double>(kk.rows.rows()));
          }
        },
        kind_);
    // Round outward so the sandwich survives floating point.
    constexpr double kSlack = 1e-12;
    return NormDescriptor::make(n_, k * (1.0 - kSlack), big * (1.0 + kSlack));
  }

  void audit_sandwich() const {
    CounterRng rng(0x5a4dd1c4ULL, static_cast<std::uint64_t>(n_));
    for (int i = 0; i < 1000; ++i) {
      const Vector u = rng.unit_vector(n_);
      const double v = eval(u);
      if (v < desc_.k_lo * (1.0 - 1e-9) || v > desc_.k_hi * (1.0 + 1e-9))
        throw NumericalFailure("reported sandwich constants violated for " + name());
    }
  }

  int n_;
  Kind kind_;
  NormDescriptor desc_;
};

// ---------------------------------------------------------------------------
// Cones
// ---------------------------------------------------------------------------

/// Number of free entries of a symmetric d x d matrix.
constexpr int svec_dim(int d) { return d * (d + 1) / 2; }

/// Scaled symmetric vectorization: off-diagonal entries carry a factor sqrt(2)
/// so that svec(A)^T svec(B) = trace(A B).
inline Vector svec(const Matrix &m) {
  const auto d = static_cast<int>(m.rows());
  Vector v(svec_dim(d));
  int idx = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= j; ++i) v[idx++] = (i == j) ? m(i, i) : std::numbers::sqrt2 * m(i, j);
  return v;
}

inline Matrix smat(const Vector &v, int d) {
  require(v.size() == svec_dim(d), "smat: dimension mismatch");
  Matrix m(d, d);
  int idx = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= j; ++i) {
      const double x = (i == j) ? v[idx] : v[idx] / std::numbers::sqrt2;
      m(i, j) = x;
      m(j, i) = x;
      ++idx;
    }
  return m;
}

enum class ConeKind { NonnegativeOrthant, SecondOrder, Psd };

/// Raw interior data: a ∈ int K with B(a, eps_a) ⊆ K, b ∈ int K* with B(b, eps_b) ⊆ K*.
struct ConeInteriorData {
  Vector a;
  Vector b;
  double eps_a = 0.0;
  double eps_b = 0.0;
};

class ReferenceCone {
 public:
  static ReferenceCone orthant(int n) {
    require(n >= 2, "cone dimension must be at least 2");
    return ReferenceCone(ConeKind::NonnegativeOrthant, n, n);
  }
  static ReferenceCone second_order(int n) {
    require(n >= 2, "cone dimension must be at least 2");
    return ReferenceCone(ConeKind::SecondOrder, n, n);
  }
  static ReferenceCone psd(int d) {
    require(d >= 1 && svec_dim(d) >= 2, "psd cone needs side d >= 2");
    return ReferenceCone(ConeKind::Psd, svec_dim(d), d);
  }

  [[nodiscard]] ConeKind kind() const noexcept { return kind_; }
  [[nodiscard]] int dim() const noexcept { return n_; }
  [[nodiscard]] int side() const noexcept { return side_; }

  [[nodiscard]] std::string name() const {
    switch (kind_) {
      case ConeKind::NonnegativeOrthant: return "orthant";
      case ConeKind::SecondOrder: return "soc";
      case ConeKind::Psd: return "psd";
    }
    return "cone";
  }

  [[nodiscard]] bool member(const Vector &x) const {
    if (x.size() != n_) throw InvalidArgument("cone member: dimension mismatch");
    switch (kind_) {
      case ConeKind::NonnegativeOrthant: return x.minCoeff() >= 0.0;
      case ConeKind::SecondOrder: return x.head(n_ - 1).norm() <= x[n_ - 1];
      case ConeKind::Psd: {
        const Matrix m = smat(x, side_);
        Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
        const double tol = 1e-12 * std::max(1.0, m.norm());
        return es.eigenvalues()[0] >= -tol;
      }
    }
    return false;
  }

  /// Signed Euclidean distance to the boundary: positive inside K (distance to
  /// the boundary), negative outside (minus the distance to K).
  [[nodiscard]] double signed_margin(const Vector &x) const {
    if (x.size() != n_) throw InvalidArgument("cone margin: dimension mismatch");
    switch (kind_) {
      case ConeKind::NonnegativeOrthant: {
        const double m = x.minCoeff();
        if (m >= 0.0) return m;
        return -x.cwiseMin(0.0).norm();
      }
      case ConeKind::SecondOrder: {
        const double r = x.head(n_ - 1).norm();
        const double t = x[n_ - 1];
        if (r <= t) return (t - r) / std::numbers::sqrt2;
        if (r <= -t) return -x.norm();
        return -(r - t) / std::numbers::sqrt2;
      }
      case ConeKind::Psd: {
        Eigen::SelfAdjointEigenSolver<Matrix> es(smat(x, side_), Eigen::EigenvaluesOnly);
        const Vector ev = es.eigenvalues();
        if (ev[0] >= 0.0) return ev[0];
        return -ev.cwiseMin(0.0).norm();
      }
    }
    return 0.0;
  }

  /// Every reference cone is self-dual under the chosen inner product.
  [[nodiscard]] ReferenceCone dual() const { return *this; }

  /// Certified interior points of K and K* with their slack radii.
  [[nodiscard]] ConeInteriorData interior_data() const {
    switch (kind_) {
      case ConeKind::NonnegativeOrthant: {
        const double n = static_cast<double>(n_);
        return {Vector::Constant(n_, 1.0 / n), Vector::Ones(n_), 1.0 / n, 1.0};
      }
      case ConeKind::SecondOrder: {
        Vector e = Vector::Zero(n_);
        e[n_ - 1] = 1.0;
        return {e, e, 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2};
      }
      case ConeKind::Psd: {
        const Vector id = svec(Matrix::Identity(side_, side_));
        const double d = static_cast<double>(side_);
        return {id / d, id, 1.0 / d, 1.0};
      }
    }
    return {};
  }

  [[nodiscard]] WmemOracle oracle(std::string label = "cone") const {
    auto self = *this;
    return exact_to_weak(
        n_, [self](const Vector &x) { return self.member(x); }, std::nullopt, std::move(label));
  }

 private:
  ReferenceCone(ConeKind kind, int n, int side) : kind_(kind), n_(n), side_(side) {}

  ConeKind kind_;
  int n_;
  int side_;
};

}  // namespace duality
