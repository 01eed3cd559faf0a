#pragma once

// Proper cones through their hyperplane sections. A cone K with a ∈ int K and
// b ∈ int K*, b^T a = 1, is compactified to P_b = {x ∈ K : b^T x = 1}; weak
// membership moves between K and P_b, and weak membership in the dual section
// P*_a comes from weak validity over P_b.

#include "duality/cutting.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

namespace duality {

/// Normalized encoding of a proper cone pair.
///
/// B(a, eps_a) ⊆ K, B(b, eps_b) ⊆ K*, b^T a = 1, and in the hyperplanes
/// B(0, rho_b_in) ⊆ P_b - a ⊆ B(0, rho_b_out),
/// B(0, rho_a_in) ⊆ P*_a - b ⊆ B(0, rho_a_out).
struct ConeDescriptor {
  int n = 0;
  Vector a;
  Vector b;
  double eps_a = 0.0;
  double eps_b = 0.0;
  double rho_a_in = 0.0;
  double rho_a_out = 0.0;
  double rho_b_in = 0.0;
  double rho_b_out = 0.0;
};

/// Rescales a so that b^T a = 1. Section radii default to the bounds implied
/// by the interior balls: b^T x >= eps_b |x| on K gives |x| <= 1/eps_b on P_b.
inline ConeDescriptor normalize_cone(const Vector &a, const Vector &b, double eps_a, double eps_b,
                                     std::optional<std::pair<double, double>> rho_a = std::nullopt,
                                     std::optional<std::pair<double, double>> rho_b = std::nullopt) {
  checked(a);
  checked(b);
  require(a.size() == b.size(), "cone interior points: dimension mismatch");
  require(a.size() >= 2, "cone dimension must be at least 2");
  require(std::isfinite(eps_a) && std::isfinite(eps_b) && eps_a > 0.0 && eps_b > 0.0,
          "interior slack radii must be positive");
  const double ba = b.dot(a);
  if (!(ba > 0.0)) throw InvalidArgument("not interior points of dual pair");

  ConeDescriptor d;
  d.n = static_cast<int>(a.size());
  d.a = a / ba;
  d.b = b;
  d.eps_a = eps_a / ba;
  d.eps_b = eps_b;
  const auto [ra_in, ra_out] = rho_a.value_or(std::pair{d.eps_b, 1.0 / d.eps_a + d.b.norm()});
  const auto [rb_in, rb_out] = rho_b.value_or(std::pair{d.eps_a, 1.0 / d.eps_b + d.a.norm()});
  require(ra_in > 0.0 && ra_in <= ra_out && rb_in > 0.0 && rb_in <= rb_out,
          "section radii must satisfy 0 < rho_in <= rho_out");
  d.rho_a_in = ra_in;
  d.rho_a_out = ra_out;
  d.rho_b_in = rb_in;
  d.rho_b_out = rb_out;
  return d;
}

inline ConeDescriptor normalize_cone(const ConeDescriptor &raw) {
  return normalize_cone(raw.a, raw.b, raw.eps_a, raw.eps_b, std::pair{raw.rho_a_in, raw.rho_a_out},
                        std::pair{raw.rho_b_in, raw.rho_b_out});
}

/// Descriptor of K* read as a primal cone: (a, b) and every paired radius swap.
inline ConeDescriptor dual_descriptor(const ConeDescriptor &d) {
  ConeDescriptor out = d;
  std::swap(out.a, out.b);
  std::swap(out.eps_a, out.eps_b);
  std::swap(out.rho_a_in, out.rho_b_in);
  std::swap(out.rho_a_out, out.rho_b_out);
  return out;
}

/// b^T x >= eps_b |x| holds for every x ∈ K.
inline bool interior_bound_check(const Vector &b, double eps_b, const Vector &x) {
  require(b.size() == x.size(), "dimension mismatch");
  return b.dot(x) >= eps_b * x.norm();
}

/// x / (b^T x), the point of H_b on the ray of x.
inline Vector section_point(const Vector &x, const Vector &b) {
  require(b.size() == x.size(), "dimension mismatch");
  const double bx = b.dot(x);
  if (!(bx > 0.0)) throw InvalidArgument("below the section hyperplane");
  return x / bx;
}

/// Affine frame of H_b = {z : b^T z = 1} with origin a and an orthonormal
/// basis of b^⊥.
struct SectionFrame : AffineFrame {
  static SectionFrame make(const Vector &origin, const Vector &normal) {
    const auto n = normal.size();
    require(origin.size() == n && n >= 2, "section frame: dimension mismatch");
    const double nb = normal.norm();
    require(nb > 0.0, "section normal must be nonzero");
    // Modified Gram-Schmidt over [b, e_1, ..., e_n], run twice per vector.
    Matrix q(n, n);
    q.col(0) = normal / nb;
    int filled = 1;
    for (Eigen::Index j = 0; j < n && filled < n; ++j) {
      Vector v = Vector::Unit(n, j);
      for (int pass = 0; pass < 2; ++pass)
        for (int k = 0; k < filled; ++k) v -= q.col(k).dot(v) * q.col(k);
      const double nv = v.norm();
      if (nv < 1e-6) continue;
      q.col(filled++) = v / nv;
    }
    if (filled != n) throw NumericalFailure("section frame: orthonormalization failed");
    SectionFrame f;
    f.offset = origin;
    f.basis = q.rightCols(n - 1);
    const Matrix gram = f.basis.transpose() * f.basis - Matrix::Identity(n - 1, n - 1);
    const Vector tb = f.basis.transpose() * (normal / nb);
    if (gram.cwiseAbs().maxCoeff() > 1e-12 || tb.cwiseAbs().maxCoeff() > 1e-12)
      throw NumericalFailure("section frame: basis not orthonormal");
    return f;
  }
};

/// Weak membership of y ∈ H_b in P_b relative to H_b at slack eps, from one
/// query of the cone oracle on the ray of y.
inline WeakVerdict cone_wmem_to_section_wmem(const WmemOracle &cone, const ConeDescriptor &desc, const Vector &y,
                                             double eps) {
  require(y.size() == desc.n, "dimension mismatch");
  require(eps > 0.0, "eps must be positive");
  const double ny = y.norm();
  const double nb = desc.b.norm();
  const Vector x = (0.75 / ny) * y;
  const double bx = desc.b.dot(x);
  if (!(ny > 0.0) || !(bx > 0.0)) throw InvalidArgument("query too close to hyperplane at infinity");
  // Midpoint of ((b^T x)^2 eps / (8|b|), (b^T x)^2 eps / (4|b|)), kept below
  // b^T x / (2|b|) so that every perturbed point stays above the hyperplane.
  double delta = 3.0 * bx * bx * eps / (16.0 * nb);
  delta = std::min(delta, 0.45 * bx / nb);
  if (!(delta > 0.0)) throw InvalidArgument("query too close to hyperplane at infinity");
  return cone.query(x, delta);
}

namespace detail {

inline WeakVerdict section_to_cone(const RelativeWmemOracle &section, const Vector &normal, const Vector &x,
                                   double delta) {
  require(x.size() == normal.size(), "dimension mismatch");
  require(delta > 0.0, "delta must be positive");
  const double bx = normal.dot(x);
  // Every nonzero member of the cone has a positive inner product with an
  // interior point of the dual cone.
  if (!(bx > 0.0)) return WeakVerdict::NotInShrunk;
  return section.query(x / bx, delta / bx);
}

}  // namespace detail

/// Weak membership of x (1/2 < |x| < 1) in K from weak membership of its
/// section point in P_b relative to H_b.
inline WeakVerdict section_wmem_to_cone_wmem(const RelativeWmemOracle &section, const ConeDescriptor &desc,
                                             const Vector &x, double delta) {
  return detail::section_to_cone(section, desc.b, x, delta);
}

/// Weak membership oracle for P_b - a in the coordinates of the frame of b^⊥.
inline WmemOracle section_body_oracle(const WmemOracle &cone, const ConeDescriptor &desc, const SectionFrame &frame,
                                      CounterPtr counter = nullptr) {
  return WmemOracle(
      desc.n - 1,
      [cone, desc, frame](const Vector &u, double eps) {
        return cone_wmem_to_section_wmem(cone, desc, frame.to_ambient(u), eps);
      },
      CenteredBody::make(Vector::Zero(desc.n - 1), desc.rho_b_in, desc.rho_b_out),
      counter ? std::move(counter) : make_counter("section"));
}

/// Weak membership oracle for K* built on the weak membership oracle of K.
///
/// A raw query c is scaled onto |c| = 3/4 (slack scaled alike; K* is a cone)
/// and lifted to H_a. There, with kappa = rho_b_out / rho_b_in, weak validity
/// over P_b - a for the objective -c at threshold 1 and slack eps decides:
/// UpperBoundHolds gives c^T y >= -tau on P_b with tau = (1 + |c|) kappa eps,
/// so (c + tau b)/(1 + tau) ∈ P*_a; LargeValueExists gives a point of P_b with
/// c^T z <= tau, so (c - 2 tau b)/(1 - 2 tau) ∉ P*_a. eps is half the largest
/// value keeping tau <= 1/4 and both shifted points within delta of c.
inline WmemOracle dual_cone_wmem(const WmemOracle &cone, const ConeDescriptor &desc, const ToleranceConfig &cfg,
                                 CounterPtr counter = nullptr) {
  require(cone.dim() == desc.n, "dimension mismatch between oracle and descriptor");
  require(std::abs(desc.b.dot(desc.a) - 1.0) <= 1e-9, "cone descriptor must be normalized");
  const SectionFrame frame_b = SectionFrame::make(desc.a, desc.b);
  const SectionFrame frame_a = SectionFrame::make(desc.b, desc.a);
  const WmemOracle kb = section_body_oracle(cone, desc, frame_b);
  const double kappa = std::max(1.0, desc.rho_b_out / desc.rho_b_in);

  RelativeWmemOracle dual_section(
      frame_a,
      [kb, frame_b, desc, kappa, cfg](const Vector &c, double delta) {
        const Vector obj = -(frame_b.basis.transpose() * c);
        if (obj.norm() == 0.0) return WeakVerdict::InThickened;  // c = b ∈ int K*
        const double nc = c.norm();
        const double dist = (desc.b - c).norm();
        double bound = 1.0 / (4.0 * (1.0 + nc) * kappa);
        if (dist > 0.0) bound = std::min(bound, delta / (4.0 * (1.0 + nc) * kappa * dist));
        const double eps = 0.5 * bound;
        const WvalVerdict v = wval_from_wmem(kb.centered(), kb, WvalQuery{obj, 1.0, eps}, cfg);
        return v == WvalVerdict::UpperBoundHolds ? WeakVerdict::InThickened : WeakVerdict::NotInShrunk;
      },
      make_counter("dual-section"));

  const Vector a = desc.a;
  return WmemOracle(
      desc.n,
      [dual_section, a](const Vector &c_raw, double delta) {
        const double nc = c_raw.norm();
        if (nc == 0.0) return WeakVerdict::InThickened;
        const double s = 0.75 / nc;
        return detail::section_to_cone(dual_section, a, s * c_raw, s * delta);
      },
      std::nullopt, counter ? std::move(counter) : make_counter("dual-cone"));
}

}  // namespace duality
