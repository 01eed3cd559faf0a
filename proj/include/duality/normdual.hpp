#pragma once

// Norm balls and their duals: scaling bounds for thickened and shrunken balls,
// weak membership in the dual ball from weak membership in the primal ball,
// and the inter-reduction between weak membership and norm approximation.

#include "duality/cutting.hpp"

#include <cmath>
#include <limits>
#include <functional>
#include <utility>
#include <vector>

namespace duality {

/// Certified scalings: thick_lo*B ⊆ S(B, delta) ⊆ thick_hi*B and
/// shrink_lo*B ⊆ S(B, -delta) ⊆ shrink_hi*B.
struct BallScalingBounds {
  double thick_lo = 0.0;
  double thick_hi = 0.0;
  double shrink_lo = 0.0;
  double shrink_hi = 0.0;
};

inline BallScalingBounds ball_scaling_bounds(const NormDescriptor &desc, double delta) {
  require(delta > 0.0, "delta must be positive");
  if (desc.k_hi * delta >= 1.0) throw InvalidArgument("delta too large for shrink bound");
  return BallScalingBounds{1.0 + desc.k_lo * delta, 1.0 + desc.k_hi * delta, 1.0 - desc.k_hi * delta,
                           1.0 - desc.k_lo * delta};
}

/// Descriptor of r * nu. x ∈ B_nu iff x / r ∈ B_{r nu}.
inline NormDescriptor rescale_norm(const NormDescriptor &desc, double r) {
  require(std::isfinite(r) && r > 0.0, "rescale factor must be positive");
  return NormDescriptor::make(desc.n, r * desc.k_lo, r * desc.k_hi);
}

using WvalSolver = std::function<WvalVerdict(const WvalQuery &)>;

/// Weak membership in B_nu from weak validity over B_{nu*}; needs k_nu >= 2.
///
/// UpperBoundHolds gives nu(x) <= (1 + delta) / (1 - delta/k) <= 1 + k delta,
/// so x ∈ S(B_nu, delta). LargeValueExists gives
/// nu(x) > (1 - delta) / (1 + delta/k) >= 1 - k delta, so x ∉ S(B_nu, -delta).
inline WeakVerdict wmem_ball_from_dual_wval(const WvalSolver &dual_wval, const NormDescriptor &desc,
                                            const Vector &x, double delta) {
  if (desc.k_lo < 2.0) throw InvalidArgument("rescale first: k_nu must be at least 2");
  if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("delta must lie in (0, 1/2)");
  require(x.size() == desc.n, "dimension mismatch");
  const WvalVerdict v = dual_wval(WvalQuery{x, 1.0, delta});
  return v == WvalVerdict::UpperBoundHolds ? WeakVerdict::InThickened : WeakVerdict::NotInShrunk;
}

/// Weak membership oracle for the dual ball B_{nu*} built on the primal ball
/// oracle.
///
/// Query(x, delta): with mu = r nu* and r = max(1, 2 K_nu) we have k_mu >= 2,
/// x ∈ B_{nu*} iff x/r ∈ B_mu, and B_{mu*} = r B_nu. Weak validity over r B_nu
/// comes from the cutting-plane loop on the primal oracle; the dual-WVAL
/// lemma applied to mu turns it into weak membership for x/r at slack
/// delta/r. Centering: B(0, k_nu) ⊆ B_{nu*} ⊆ B(0, K_nu).
inline WmemOracle dual_ball_wmem(const WmemOracle &primal, const NormDescriptor &desc, const ToleranceConfig &cfg,
                                 CounterPtr counter = nullptr) {
  require(primal.dim() == desc.n, "dimension mismatch between oracle and descriptor");
  const NormDescriptor dual_desc = desc.dual();
  double r = std::max(1.0, 2.0 / dual_desc.k_lo);
  while (r * dual_desc.k_lo < 2.0) r = std::nextafter(r, kInf);
  const NormDescriptor mu = rescale_norm(dual_desc, r);
  const CenteredBody scaled_primal_body = CenteredBody::make(Vector::Zero(desc.n), r / desc.k_hi, r / desc.k_lo);
  // Membership in r * B_nu through the primal oracle.
  WmemOracle scaled_primal(
      desc.n, [primal, r](const Vector &y, double d) { return primal.query(y / r, d / r); }, scaled_primal_body,
      make_counter("scaled-primal"));

  return WmemOracle(
      desc.n,
      [scaled_primal, mu, r, cfg](const Vector &x, double delta) {
        if (x.norm() == 0.0) return WeakVerdict::InThickened;
        const Vector xs = x / r;
        const double ds = std::min(delta / r, 0.49);
        WvalSolver solver = [&](const WvalQuery &q) {
          return wval_from_wmem(scaled_primal.centered(), scaled_primal, q, cfg);
        };
        return wmem_ball_from_dual_wval(solver, mu, xs, ds);
      },
      CenteredBody::make(Vector::Zero(desc.n), desc.k_lo, desc.k_hi),
      counter ? std::move(counter) : make_counter("dual-ball"));
}

/// Weak membership in B_nu from one call to a norm approximation oracle.
inline WeakVerdict wmem_from_approx(const NormApproxOracle &approx, const NormDescriptor &desc, const Vector &x,
                                    double delta) {
  checked(x);
  require(x.size() == desc.n, "dimension mismatch");
  require(delta > 0.0, "delta must be positive");
  const double nx = x.norm();
  if (nx == 0.0) throw InvalidArgument("cannot normalize zero vector");
  if (nx <= 1.0 / desc.k_hi) return WeakVerdict::InThickened;
  if (nx >= 1.0 / desc.k_lo) return WeakVerdict::NotInShrunk;
  // r = |x| is the centre of the admissible range (2|x|/3, 2|x|).
  const double r = nx;
  const Vector y = x / r;
  const double eps = desc.k_lo * desc.k_lo * delta / 4.0;
  const double omega = approx.eval(y, eps);
  return r * omega <= 1.0 + desc.k_lo * delta / 2.0 ? WeakVerdict::InThickened : WeakVerdict::NotInShrunk;
}

struct BisectionQuery {
  double r = 0.0;
  double eps = 0.0;
  WeakVerdict verdict = WeakVerdict::InThickened;
};

struct BisectionTrace {
  std::vector<Interval> intervals;  // [a_1, b_1], ..., [a_m, b_m]
  std::vector<BisectionQuery> queries;
  double final = 0.0;
};

/// Number of nested intervals: the smallest integer m with
/// m > 1 + (log2 b1 - log2 2 delta) / (2 - log2 3) when 2 delta / b1 <= 1,
/// otherwise 1.
inline int bisection_length(double b1, double delta) {
  require(b1 > 0.0 && delta > 0.0, "bisection_length: positive inputs required");
  if (2.0 * delta / b1 > 1.0) return 1;
  const double bound = 1.0 + (std::log2(b1) - std::log2(2.0 * delta)) / (2.0 - std::log2(3.0));
  return static_cast<int>(std::floor(bound)) + 1;
}

/// delta-approximation of nu(x) for 1/2 < |x| < 3/2 by nested intervals whose
/// widths shrink by 3/4 per weak membership query.
inline std::pair<double, BisectionTrace> approx_from_wmem(const WmemOracle &ball, const NormDescriptor &desc,
                                                          const Vector &x, double delta) {
  checked(x);
  require(x.size() == desc.n && ball.dim() == desc.n, "dimension mismatch");
  require(delta > 0.0, "delta must be positive");
  const double nx = x.norm();
  if (!(nx > 0.5 && nx < 1.5)) throw InvalidArgument("call scale_into_annulus first");

  BisectionTrace trace;
  double a = desc.k_lo / 2.0;
  double b = 1.5 * desc.k_hi;
  const int m = bisection_length(b, delta);
  trace.intervals.reserve(static_cast<std::size_t>(m));
  trace.intervals.push_back(Interval::make(a, b));
  for (int i = 1; i < m; ++i) {
    const double r = 0.5 * (a + b);
    const double eps = (b - a) / (2.0 * desc.k_hi * (b + a));
    const WeakVerdict v = ball.query(x / r, eps);
    trace.queries.push_back(BisectionQuery{r, eps, v});
    if (v == WeakVerdict::InThickened) {
      b = 0.75 * b + 0.25 * a;
    } else {
      a = 0.25 * b + 0.75 * a;
    }
    trace.intervals.push_back(Interval::make(a, b));
  }
  trace.final = 0.5 * (a + b);
  return {trace.final, std::move(trace)};
}

struct DualNormReport {
  double value = 0.0;
  double scale = 1.0;           // annulus factor |y|
  double bisection_delta = 0.0;  // precision of the bisection on the unit sphere
  std::uint64_t dual_queries = 0;
  std::uint64_t primal_queries = 0;
  BisectionTrace trace;
};

/// nu*(y) to within delta, from the primal ball's weak membership oracle.
/// A third of the budget goes to the bisection; the dual-ball stage runs at
/// the slack the bisection hands it, leaving the rest as margin for the
/// cutting-plane approximation.
inline DualNormReport dual_norm_run(const WmemOracle &primal, const NormDescriptor &desc, const Vector &y,
                                    double delta, const ToleranceConfig &cfg) {
  require(delta > 0.0, "delta must be positive");
  const AnnulusScaling s = scale_into_annulus(y);
  const std::uint64_t primal_before = primal.calls();
  const WmemOracle dual = dual_ball_wmem(primal, desc, cfg);
  DualNormReport rep;
  rep.scale = s.factor;
  rep.bisection_delta = delta / (3.0 * s.factor);
  auto [omega, trace] = approx_from_wmem(dual, desc.dual(), s.y, rep.bisection_delta);
  rep.value = s.factor * omega;
  rep.trace = std::move(trace);
  rep.dual_queries = dual.calls();
  rep.primal_queries = primal.calls() - primal_before;
  return rep;
}

inline double dual_norm_eval(const WmemOracle &primal, const NormDescriptor &desc, const Vector &y, double delta,
                             const ToleranceConfig &cfg) {
  return dual_norm_run(primal, desc, y, delta, cfg).value;
}

}  // namespace duality
