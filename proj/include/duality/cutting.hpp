#pragma once

// Weak validity and weak optimization over a centered convex body using only
// its weak membership oracle.
//
// The body is probed through its gauge (Minkowski functional) with respect to
// the center: gauge_a(x) = inf{t > 0 : a + (x - a)/t ∈ K}. Bisection along a
// ray evaluates the gauge; central differences of the gauge give approximate
// separating hyperplanes; an ellipsoid localizer with central separation cuts
// and deep objective cuts drives the optimization.

#include "duality/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace duality {

struct WvalQuery {
  Vector objective;
  double threshold = 0.0;
  double slack = 0.0;
};

enum class WvalVerdict { UpperBoundHolds, LargeValueExists };

inline const char *to_string(WvalVerdict v) {
  return v == WvalVerdict::UpperBoundHolds ? "upper-bound-holds" : "large-value-exists";
}

struct WoptResult {
  std::optional<Vector> witness;  // empty: the thickened body may be empty
  double value = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();  // certified optimality gap
  int iterations = 0;
  std::vector<double> gap_history;

  [[nodiscard]] bool empty() const noexcept { return !witness.has_value(); }
};

/// Thrown when the cutting-plane loop hits its iteration cap without a
/// certified gap; carries the best incumbent.
class CutIterationLimit : public NumericalFailure {
 public:
  CutIterationLimit(const std::string &what, std::optional<Vector> best, double value, double gap)
      : NumericalFailure(what), best_(std::move(best)), value_(value), gap_(gap) {}

  [[nodiscard]] const std::optional<Vector> &best() const noexcept { return best_; }
  [[nodiscard]] double value() const noexcept { return value_; }
  [[nodiscard]] double gap() const noexcept { return gap_; }

 private:
  std::optional<Vector> best_;
  double value_;
  double gap_;
};

namespace detail {

/// Gauge evaluation and finite-difference separation with reusable buffers.
class GaugeProbe {
 public:
  GaugeProbe(const CenteredBody &body, const WmemOracle &oracle, double tol)
      : body_(body), oracle_(oracle), tol_(tol), dir_(body.dim()), point_(body.dim()), shifted_(body.dim()) {
    require(tol_ > 0.0, "gauge tolerance must be positive");
  }

  /// Full evaluation with the bracket [|d|/(2R), 2|d|/r] checked against the
  /// oracle first.
  double gauge(const Vector &x) {
    dir_ = x - body_.center;
    const double nd = dir_.norm();
    if (!(nd > 0.0)) throw InvalidArgument("gauge undefined at the center");
    const double lo = nd / (2.0 * body_.outer_radius);
    const double hi = 2.0 * nd / body_.inner_radius;
    const double check_delta = 0.25 * body_.inner_radius;
    point_ = body_.center + dir_ / hi;
    if (oracle_.query(point_, check_delta) != WeakVerdict::InThickened)
      throw NumericalFailure("gauge bracket failure: oracle rejects a point of the inner ball");
    point_ = body_.center + dir_ / lo;
    if (oracle_.query(point_, check_delta) != WeakVerdict::NotInShrunk)
      throw NumericalFailure("gauge bracket failure: oracle accepts a point beyond the outer ball");
    return bisect(lo, hi);
  }

  /// Evaluation inside a caller-supplied bracket known to contain the gauge.
  double gauge_in(const Vector &x, double lo, double hi) {
    dir_ = x - body_.center;
    if (!(dir_.norm() > 0.0)) throw InvalidArgument("gauge undefined at the center");
    const double nd = dir_.norm();
    lo = std::max(lo, nd / (2.0 * body_.outer_radius));
    hi = std::min(hi, 2.0 * nd / body_.inner_radius);
    if (!(lo < hi)) return 0.5 * (lo + hi);
    return bisect(lo, hi);
  }

  /// Normalized central-difference gradient of the gauge at x.
  Vector separator(const Vector &x, double step) {
    require(step > 0.0, "finite-difference step must be positive");
    const int n = body_.dim();
    const double g0 = gauge(x);
    // The gauge is (1/r)-Lipschitz, which brackets the shifted evaluations.
    const double spread = step / body_.inner_radius + 2.0 * tol_;
    Vector h(n);
    for (int i = 0; i < n; ++i) {
      shifted_ = x;
      shifted_[i] += step;
      const double gp = gauge_in(shifted_, std::max(g0 - spread, 0.0), g0 + spread);
      shifted_[i] = x[i] - step;
      const double gm = gauge_in(shifted_, std::max(g0 - spread, 0.0), g0 + spread);
      h[i] = (gp - gm) / (2.0 * step);
    }
    const double nh = h.norm();
    const double noise = 4.0 * tol_ * std::sqrt(static_cast<double>(n)) / step;
    if (!(nh > noise)) throw NumericalFailure("flat gauge; reduce step");
    return h / nh;
  }

 private:
  double bisect(double lo, double hi) {
    // A test point at gauge value t has true gauge gauge(x)/t; a membership
    // slack below tol * r / hi keeps the answer within the bisection tolerance.
    const double delta = 0.5 * tol_ * body_.inner_radius / std::max(hi, 1.0);
    while (hi - lo > tol_) {
      const double mid = 0.5 * (lo + hi);
      point_ = body_.center + dir_ / mid;
      if (oracle_.query(point_, delta) == WeakVerdict::InThickened)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  }

  const CenteredBody &body_;
  const WmemOracle &oracle_;
  double tol_;
  Vector dir_;
  Vector point_;
  Vector shifted_;
};

/// Ellipsoid {x : (x - z)^T P^{-1} (x - z) <= 1}.
class EllipsoidLocalizer {
 public:
  EllipsoidLocalizer(const Vector &center, double radius)
      : n_(static_cast<int>(center.size())),
        z_(center),
        p_(Matrix::Identity(n_, n_) * (radius * radius)),
        pg_(n_) {}

  [[nodiscard]] const Vector &center() const noexcept { return z_; }
  [[nodiscard]] const Matrix &shape() const noexcept { return p_; }

  /// max of c^T x over the ellipsoid.
  [[nodiscard]] double support(const Vector &c) const {
    return c.dot(z_) + std::sqrt(std::max(c.dot(p_ * c), 0.0));
  }

  /// Keeps {x : g^T x <= g^T z - alpha * sqrt(g^T P g)}; returns false when
  /// the cut leaves nothing (alpha >= 1).
  bool cut(const Vector &g, double alpha) {
    pg_.noalias() = p_ * g;
    const double gpg = g.dot(pg_);
    if (!(gpg > 0.0)) return false;
    if (alpha >= 1.0) return false;
    const double nd = static_cast<double>(n_);
    alpha = std::max(alpha, 0.0);
    const double root = std::sqrt(gpg);
    if (n_ == 1) {
      const double half = std::sqrt(p_(0, 0));
      const double sign = g[0] > 0.0 ? 1.0 : -1.0;
      z_[0] -= sign * 0.5 * (1.0 + alpha) * half;
      p_(0, 0) = 0.25 * (1.0 - alpha) * (1.0 - alpha) * p_(0, 0);
      return true;
    }
    pg_ /= root;
    z_.noalias() -= ((1.0 + nd * alpha) / (nd + 1.0)) * pg_;
    const double scale = nd * nd * (1.0 - alpha * alpha) / (nd * nd - 1.0);
    const double rank1 = 2.0 * (1.0 + nd * alpha) / ((nd + 1.0) * (1.0 + alpha));
    p_.noalias() -= rank1 * pg_ * pg_.transpose();
    p_ *= scale;
    p_ = 0.5 * (p_ + p_.transpose()).eval();
    return true;
  }

 private:
  int n_;
  Vector z_;
  Matrix p_;
  Vector pg_;
};

enum class CutStop { Certified, EarlyStop, Collapsed, Cap };

struct CutRun {
  std::optional<Vector> best;
  double best_value = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> gaps;
  CutStop stop = CutStop::Cap;
};

inline double finite_difference_step(const CenteredBody &body, const ToleranceConfig &cfg) {
  return std::max(1e-5, cfg.subgradient_step * body.inner_radius);
}

/// Maximizes c^T x over the body. `early(found, best, upper)` may end the
/// loop before the gap is certified.
template <class Early>
CutRun run_cutting_plane(const CenteredBody &body, const WmemOracle &oracle, const Vector &c, double eps,
                         const ToleranceConfig &cfg, Early early) {
  require(c.size() == body.dim() && oracle.dim() == body.dim(), "cutting plane: dimension mismatch");
  require(eps > 0.0, "cutting plane: slack must be positive");
  GaugeProbe probe(body, oracle, cfg.line_search_tol);
  EllipsoidLocalizer loc(body.center, body.outer_radius);
  const double step = finite_difference_step(body, cfg);
  const double member_delta = 0.5 * eps / std::max(1.0, c.norm());

  CutRun run;
  for (int it = 0; it < cfg.max_cut_iterations; ++it) {
    run.iterations = it + 1;
    run.upper = std::min(run.upper, loc.support(c));
    if (run.best) {
      const double gap = std::max(run.upper - run.best_value, 0.0);
      run.gaps.push_back(gap);
      if (gap <= eps) {
        run.stop = CutStop::Certified;
        return run;
      }
    }
    if (early(run.best.has_value(), run.best_value, run.upper)) {
      run.stop = CutStop::EarlyStop;
      return run;
    }
    const Vector &z = loc.center();
    bool kept;
    if (oracle.query(z, member_delta) == WeakVerdict::InThickened) {
      const double val = c.dot(z);
      if (val > run.best_value) {
        run.best_value = val;
        run.best = z;
      }
      const double width = std::sqrt(std::max(c.dot(loc.shape() * c), 0.0));
      const double alpha = width > 0.0 ? (run.best_value - val) / width : 0.0;
      kept = loc.cut(-c, alpha);
    } else {
      const Vector h = probe.separator(z, step);
      kept = loc.cut(h, 0.0);
    }
    if (!kept) {
      if (run.best) {
        run.upper = std::min(run.upper, run.best_value);
        run.gaps.push_back(0.0);
        run.stop = CutStop::Certified;
      } else {
        run.stop = CutStop::Collapsed;
      }
      return run;
    }
  }
  run.stop = CutStop::Cap;
  return run;
}

}  // namespace detail

/// Gauge of x with respect to the body's center, within tol.
inline double gauge_from_wmem(const CenteredBody &body, const WmemOracle &oracle, const Vector &x, double tol) {
  require(x.size() == body.dim(), "gauge: dimension mismatch");
  detail::GaugeProbe probe(body, oracle, tol);
  return probe.gauge(x);
}

/// Unit normal h of an approximate separating hyperplane at a point outside
/// the body: h^T x > h^T y - sigma for y ∈ K with sigma <= step / inner_radius.
inline Vector approx_separator(const CenteredBody &body, const WmemOracle &oracle, const Vector &x, double step,
                               double tol = 1e-10) {
  require(x.size() == body.dim(), "separator: dimension mismatch");
  detail::GaugeProbe probe(body, oracle, tol);
  return probe.separator(x, step);
}

/// Weak optimization: a witness y ∈ S(K, eps) with c^T x <= c^T y + eps for
/// all x ∈ S(K, -eps).
inline WoptResult wopt_from_wmem(const CenteredBody &body, const WmemOracle &oracle, const Vector &c, double eps,
                                 const ToleranceConfig &cfg) {
  checked(c);
  require(c.norm() > 0.0, "wopt: objective must be nonzero");
  auto run = detail::run_cutting_plane(body, oracle, c, eps, cfg, [](bool, double, double) { return false; });
  WoptResult out;
  out.iterations = run.iterations;
  out.gap_history = std::move(run.gaps);
  if (!run.best) return out;
  out.witness = std::move(run.best);
  out.value = run.best_value;
  out.gap = std::max(run.upper - run.best_value, 0.0);
  if (run.stop == detail::CutStop::Cap)
    throw CutIterationLimit("wopt: iteration cap reached without a certified gap", out.witness, out.value, out.gap);
  return out;
}

/// Weak validity: UpperBoundHolds asserts c^T x <= gamma + eps on S(K, -eps);
/// LargeValueExists asserts c^T x >= gamma - eps somewhere in S(K, eps).
/// The loop stops as soon as either assertion is certified; at a tie the large
/// value wins.
inline WvalVerdict wval_from_wmem(const CenteredBody &body, const WmemOracle &oracle, const WvalQuery &q,
                                  const ToleranceConfig &cfg) {
  checked(q.objective);
  require(q.slack > 0.0, "wval: slack must be positive");
  const double half = 0.5 * q.slack;
  if (q.objective.norm() == 0.0)
    return 0.0 >= q.threshold - half ? WvalVerdict::LargeValueExists : WvalVerdict::UpperBoundHolds;

  const double large_at = q.threshold - half;
  const double upper_at = q.threshold + half;
  auto run = detail::run_cutting_plane(body, oracle, q.objective, half, cfg,
                                       [&](bool found, double best, double upper) {
                                         return (found && best >= large_at) || upper <= upper_at;
                                       });
  if (run.best && run.best_value >= large_at) return WvalVerdict::LargeValueExists;
  if (run.upper <= upper_at || run.stop == detail::CutStop::Certified || run.stop == detail::CutStop::Collapsed)
    return WvalVerdict::UpperBoundHolds;
  throw CutIterationLimit("wval: iteration cap reached without a decision", run.best, run.best_value,
                          run.upper - run.best_value);
}

}  // namespace duality
