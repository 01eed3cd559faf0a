#pragma once

// Fenchel conjugates from function approximation oracles: truncated epigraphs,
// minimization over a Euclidean ball through weak optimization, truncation
// radii certified by polynomial growth, and the growth constants of f*.

#include "duality/cutting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace duality {

/// k_f |x|^s <= f(x) <= K_f |x|^t whenever |x| >= r.
struct GrowthCertificate {
  double k_f = 0.0;
  double K_f = 0.0;
  double s = 0.0;
  double t = 0.0;
  double r = 0.0;

  static GrowthCertificate make(double k_f, double K_f, double s, double t, double r) {
    require(std::isfinite(k_f) && std::isfinite(K_f) && std::isfinite(s) && std::isfinite(t) && std::isfinite(r),
            "growth certificate must be finite");
    require(k_f > 0.0 && k_f <= K_f, "growth certificate needs 0 < k_f <= K_f");
    require(s > 1.0 && s <= t, "growth certificate needs 1 < s <= t");
    require(r > 0.0, "growth certificate needs r > 0");
    return GrowthCertificate{k_f, K_f, s, t, r};
  }
};

/// Euclidean ball C = B(center, radius) with |f| <= cap on C. The convex body
/// is the truncated epigraph {(x, t) : x ∈ C, f(x) <= t <= 2 cap}.
struct EpigraphBody {
  CenteredBody base;
  double cap = 0.0;
  FunctionApproxOracle value_oracle;

  static EpigraphBody make(Vector center, double radius, double cap, FunctionApproxOracle f) {
    require(std::isfinite(cap) && cap > 0.0, "epigraph cap must be positive");
    require(f.dim() == static_cast<int>(center.size()), "epigraph: dimension mismatch");
    return EpigraphBody{CenteredBody::make(std::move(center), radius, radius), cap, std::move(f)};
  }

  [[nodiscard]] int dim() const { return base.dim(); }
  [[nodiscard]] double radius() const { return base.outer_radius; }
  [[nodiscard]] bool base_member(const Vector &x) const { return (x - base.center).norm() <= radius(); }

  /// B((c, 3 cap/2), min(rho, cap/2)) ⊆ body ⊆ B((c, 3 cap/2), sqrt(rho^2 + (5 cap/2)^2)).
  [[nodiscard]] CenteredBody centering() const {
    const int n = dim();
    Vector c(n + 1);
    c << base.center, 1.5 * cap;
    const double inner = std::min(radius(), 0.5 * cap);
    const double outer = std::hypot(radius(), 2.5 * cap);
    return CenteredBody::make(std::move(c), inner, outer);
  }
};

/// Every minimizer of f over C lies in S(C, -delta).
struct InteriorMinCertificate {
  double delta = 0.0;

  static InteriorMinCertificate make(double delta) {
    require(std::isfinite(delta) && delta > 0.0, "interior-minimum delta must be positive");
    return InteriorMinCertificate{delta};
  }
};

/// Weak membership of (x, t) in the truncated epigraph from one evaluation of f
/// at precision eps. t >= omega(x) puts (x, t) within eps of the epigraph;
/// t < omega(x) puts (x, t - eps) outside it.
inline WeakVerdict epigraph_wmem(const EpigraphBody &epi, const Vector &x, double t, double eps) {
  require(x.size() == epi.dim(), "dimension mismatch");
  if (!(eps > 0.0 && eps < epi.cap)) throw InvalidArgument("eps must lie in (0, cap)");
  if (!epi.base_member(x) || t > 2.0 * epi.cap) return WeakVerdict::NotInShrunk;
  const double omega = epi.value_oracle.eval(x, eps);
  return t >= omega ? WeakVerdict::InThickened : WeakVerdict::NotInShrunk;
}

inline WmemOracle epigraph_oracle(const EpigraphBody &epi, CounterPtr counter = nullptr) {
  const int n = epi.dim();
  return WmemOracle(
      n + 1,
      [epi, n](const Vector &z, double eps) {
        return epigraph_wmem(epi, z.head(n), z[n], std::min(eps, 0.5 * epi.cap));
      },
      epi.centering(), counter ? std::move(counter) : make_counter("epigraph"));
}

struct MinReport {
  double value = 0.0;
  Vector witness;
  int iterations = 0;
  std::uint64_t epigraph_queries = 0;
  std::uint64_t function_calls = 0;
};

/// min over C of f within eps, by weak optimization of -t over the truncated
/// epigraph at slack eps/2. A sampled upper bound on the minimum audits the
/// interior-minimum certificate afterwards.
inline MinReport min_via_wopt_run(const EpigraphBody &epi, const InteriorMinCertificate &cert, double eps,
                                  const ToleranceConfig &cfg) {
  require(eps > 0.0 && eps < std::min(epi.cap, cert.delta), "eps must lie in (0, min(cap, delta))");
  const int n = epi.dim();
  const std::uint64_t f_before = epi.value_oracle.calls();
  const WmemOracle body = epigraph_oracle(epi);
  Vector objective = Vector::Zero(n + 1);
  objective[n] = -1.0;
  const WoptResult res = wopt_from_wmem(body.centered(), body, objective, 0.5 * eps, cfg);
  if (res.empty()) throw NumericalFailure("epigraph reported empty");

  MinReport rep;
  rep.value = -res.value;
  rep.witness = res.witness->head(n);
  rep.iterations = res.iterations;
  rep.epigraph_queries = body.calls();

  CounterRng rng(cfg.rng_seed, 0x6d696e);
  const double probe_eps = 0.25 * eps;
  double sample_min = epi.value_oracle.eval(epi.base.center, probe_eps);
  for (int i = 0; i < 32; ++i) {
    const double rad = epi.radius() * std::pow(rng.uniform(), 1.0 / n);
    const Vector x = epi.base.center + rad * rng.unit_vector(n);
    sample_min = std::min(sample_min, epi.value_oracle.eval(x, probe_eps));
  }
  if (rep.value > sample_min + probe_eps + eps)
    throw NumericalFailure("interior-minimum certificate appears false");
  rep.function_calls = epi.value_oracle.calls() - f_before;
  return rep;
}

inline double min_via_wopt(const EpigraphBody &epi, const InteriorMinCertificate &cert, double eps,
                           const ToleranceConfig &cfg) {
  return min_via_wopt_run(epi, cert, eps, cfg).value;
}

/// Growth constants of f* from those of f.
///
/// Upper: f*(y) <= max(|y| r - mu, K* |y|^t') with mu = min_{|x|<=r} f; the
/// lower bound mu >= 2 f(0) - K_f r^t follows from convexity, and r_1 is the
/// largest root of K* z^t' - r z + mu_lb (0 when there is none).
/// Lower: for |y| >= r^(t-1) K_f t the point x = (|y|/(K_f t))^(1/(t-1)) y/|y|
/// has |x| >= r.
inline GrowthCertificate dual_growth_constants(const GrowthCertificate &c, double f_at_0) {
  require(std::isfinite(f_at_0), "f(0) must be finite");
  const double K_star = (c.s - 1.0) / (c.s * std::pow(c.k_f * c.s, 1.0 / (c.s - 1.0)));
  const double t_prime = c.s / (c.s - 1.0);
  const double k_star = (c.t - 1.0) / (c.t * std::pow(c.K_f * c.t, 1.0 / (c.t - 1.0)));
  const double s_prime = c.t / (c.t - 1.0);

  const double mu_lb = 2.0 * f_at_0 - c.K_f * std::pow(c.r, c.t);
  const auto phi = [&](double z) { return K_star * std::pow(z, t_prime) - c.r * z + mu_lb; };
  // phi is convex on [0, inf) with phi(z) -> inf; its largest root lies past
  // the minimizer z_min.
  const double z_min = std::pow(c.r / (K_star * t_prime), 1.0 / (t_prime - 1.0));
  double r1 = 0.0;
  if (phi(z_min) < 0.0) {
    double lo = z_min;
    double hi = 2.0 * z_min + 1.0;
    while (phi(hi) < 0.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) < 0.0 ? lo : hi) = mid;
    }
    r1 = hi;
  } else if (phi(0.0) < 0.0) {
    r1 = z_min;
  }
  const double r_lower = std::pow(c.r, c.t - 1.0) * c.K_f * c.t;
  return GrowthCertificate::make(k_star, K_star, s_prime, t_prime, std::max(r1, r_lower));
}

// ---------------------------------------------------------------------------
// Conjugate evaluation
// ---------------------------------------------------------------------------

/// Radius beyond which y^T x - f(x) < -f(0) - 1 <= f*(y) - 1, computed from an
/// upper bound f0 on f(0).
inline double truncation_radius(const GrowthCertificate &c, double y_norm, double f0) {
  if (y_norm == 0.0) return std::max(c.r, std::pow(std::max(f0 + 1.0, 0.0) / c.k_f, 1.0 / c.s));
  // h(rho) = rho |y| - k_f rho^s + f0 + 1 is concave and decreasing past its peak.
  const auto h = [&](double rho) { return rho * y_norm - c.k_f * std::pow(rho, c.s) + f0 + 1.0; };
  const double peak = std::pow(y_norm / (c.k_f * c.s), 1.0 / (c.s - 1.0));
  double lo = std::max(c.r, peak);
  if (h(lo) < 0.0) return lo;
  double hi = 2.0 * lo + 1.0;
  while (!(h(hi) < 0.0)) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? hi : lo) = mid;
  }
  return hi;
}

struct FenchelReport {
  double value = 0.0;
  double truncation_radius = 0.0;  // rho_0 or rho_1
  double ball_radius = 0.0;        // rho * radius_scale + 1
  double cap = 0.0;
  int iterations = 0;
  std::uint64_t epigraph_queries = 0;
  std::uint64_t function_calls = 0;
};

/// f*(y) within eps as -min over B(0, rho + 1) of f(x) - y^T x.
/// radius_scale > 1 enlarges the truncation radius (a validity probe).
inline FenchelReport fenchel_run(const FunctionApproxOracle &f, const GrowthCertificate &cert, const Vector &y,
                                 double eps, const ToleranceConfig &cfg, double radius_scale = 1.0) {
  checked(y);
  require(y.size() == f.dim(), "dimension mismatch");
  require(eps > 0.0, "eps must be positive");
  require(radius_scale >= 1.0, "radius_scale must be at least 1");
  const int n = f.dim();
  const std::uint64_t before = f.calls();
  const double eps0 = 0.01 * eps;
  const double omega0 = f.eval(Vector::Zero(n), eps0);
  const double f0_hi = omega0 + eps0;
  const double f0_abs = std::abs(omega0) + eps0;

  const double y_norm = y.norm();
  FenchelReport rep;
  rep.truncation_radius = truncation_radius(cert, y_norm, f0_hi);
  const double R = rep.truncation_radius * radius_scale + 1.0;
  rep.ball_radius = R;
  // |f| <= 2|f(0)| + K_f R^t on B(0, R) by convexity and the upper growth bound.
  rep.cap = 2.0 * f0_abs + cert.K_f * std::pow(R, cert.t) + y_norm * R + 1.0;

  FunctionApproxOracle g(
      n, [f, y](const Vector &x, double e) { return f.eval(x, e) - y.dot(x); },
      CenteredBody::make(Vector::Zero(n), R, R), make_counter("tilted"));
  const EpigraphBody epi = EpigraphBody::make(Vector::Zero(n), R, rep.cap, g);
  const MinReport m = min_via_wopt_run(epi, InteriorMinCertificate::make(1.0), std::min(eps, 0.5), cfg);
  rep.value = -m.value;
  rep.iterations = m.iterations;
  rep.epigraph_queries = m.epigraph_queries;
  rep.function_calls = f.calls() - before;
  return rep;
}

inline double fenchel_eval(const FunctionApproxOracle &f, const GrowthCertificate &cert, const Vector &y, double eps,
                           const ToleranceConfig &cfg) {
  return fenchel_run(f, cert, y, eps, cfg).value;
}

/// max of y^T x - f(x) over the uniform grid of [-radius, radius]^n restricted
/// to B(0, radius). A lower bound on the supremum over the ball.
inline double fenchel_brute(const std::function<double(const Vector &)> &f, const Vector &y, double radius, int mesh) {
  checked(y);
  const auto n = static_cast<int>(y.size());
  if (n > 3) throw InvalidArgument("brute oracle is desk-scale only");
  require(mesh >= 2, "mesh must be at least 2");
  require(std::isfinite(radius) && radius > 0.0, "radius must be positive");
  const double step = 2.0 * radius / (mesh - 1);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Vector x(n);
  double best = -kInf;
  for (;;) {
    for (int i = 0; i < n; ++i) x[i] = -radius + step * idx[static_cast<std::size_t>(i)];
    if (x.norm() <= radius * (1.0 + 1e-12)) best = std::max(best, y.dot(x) - f(x));
    int k = 0;
    while (k < n && ++idx[static_cast<std::size_t>(k)] == mesh) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == n) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Reference functions
// ---------------------------------------------------------------------------

/// f(x) = phi(|x|) with phi convex, increasing on [0, inf), phi(0) = 0 and
/// phi'(0) = 0; then f*(y) = phi*(|y|) = sup_rho rho |y| - phi(rho).
class ReferenceFunction {
 public:
  using Scalar = std::function<double(double)>;

  [[nodiscard]] const std::string &name() const noexcept { return name_; }
  [[nodiscard]] int dim() const noexcept { return n_; }
  [[nodiscard]] const GrowthCertificate &certificate() const noexcept { return cert_; }

  [[nodiscard]] double eval(const Vector &x) const {
    if (x.size() != n_) throw InvalidArgument("function eval: dimension mismatch");
    return phi_(x.norm());
  }

  /// Exact conjugate: the maximizer solves phi'(rho) = |y|.
  [[nodiscard]] double conjugate(const Vector &y) const {
    if (y.size() != n_) throw InvalidArgument("conjugate eval: dimension mismatch");
    const double sigma = y.norm();
    if (sigma == 0.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    while (dphi_(hi) < sigma) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (dphi_(mid) < sigma ? lo : hi) = mid;
    }
    const double rho = 0.5 * (lo + hi);
    return rho * sigma - phi_(rho);
  }

  [[nodiscard]] std::function<double(const Vector &)> evaluator() const {
    auto self = *this;
    return [self](const Vector &x) { return self.eval(x); };
  }

  /// Approximation oracle answering with the exact value.
  [[nodiscard]] FunctionApproxOracle oracle(std::string label = "function") const {
    auto self = *this;
    return FunctionApproxOracle(
        n_, [self](const Vector &x, double) { return self.eval(x); }, std::nullopt, make_counter(std::move(label)));
  }

  /// Approximation oracle for f*, answering with the exact conjugate.
  [[nodiscard]] FunctionApproxOracle conjugate_oracle(std::string label = "conjugate") const {
    auto self = *this;
    return FunctionApproxOracle(
        n_, [self](const Vector &y, double) { return self.conjugate(y); }, std::nullopt,
        make_counter(std::move(label)));
  }

  static ReferenceFunction half_square_norm(int n) {
    return make("half_square_norm", n, [](double r) { return 0.5 * r * r; }, [](double r) { return r; },
                GrowthCertificate::make(0.5, 0.5, 2.0, 2.0, 1.0));
  }

  static ReferenceFunction square_norm(int n) {
    return make("square_norm", n, [](double r) { return r * r; }, [](double r) { return 2.0 * r; },
                GrowthCertificate::make(1.0, 1.0, 2.0, 2.0, 1.0));
  }

  /// |x|^p / p.
  static ReferenceFunction power(int n, double p) {
    require(std::isfinite(p) && p > 1.0, "power function needs p > 1");
    return make("power" + format_exponent(p), n, [p](double r) { return std::pow(r, p) / p; },
                [p](double r) { return std::pow(r, p - 1.0); }, GrowthCertificate::make(1.0 / p, 1.0 / p, p, p, 1.0));
  }

  static ReferenceFunction quartic(int n) {
    auto f = power(n, 4.0);
    f.name_ = "quartic";
    return f;
  }

  /// |x|^3/3 + |x|^2/2; for |x| >= 1 it lies between |x|^3/3 and 5|x|^3/6.
  static ReferenceFunction cubic_plus_quadratic(int n) {
    return make("cubic_plus_quadratic", n, [](double r) { return r * r * r / 3.0 + 0.5 * r * r; },
                [](double r) { return r * r + r; }, GrowthCertificate::make(1.0 / 3.0, 5.0 / 6.0, 3.0, 3.0, 1.0));
  }

  /// |x|^2/2 + |x|^4/4; for |x| >= 1 it lies between |x|^4/4 and 3|x|^4/4.
  static ReferenceFunction quadratic_plus_quartic(int n) {
    return make("quadratic_plus_quartic", n, [](double r) { return 0.5 * r * r + 0.25 * r * r * r * r; },
                [](double r) { return r + r * r * r; }, GrowthCertificate::make(0.25, 0.75, 4.0, 4.0, 1.0));
  }

  static ReferenceFunction by_name(const std::string &name, int n) {
    if (name == "half_square_norm") return half_square_norm(n);
    if (name == "square_norm") return square_norm(n);
    if (name == "quartic") return quartic(n);
    if (name == "cubic_plus_quadratic") return cubic_plus_quadratic(n);
    if (name == "quadratic_plus_quartic") return quadratic_plus_quartic(n);
    if (name.rfind("power", 0) == 0) {
      const std::string rest = name.substr(5);
      std::size_t used = 0;
      double p = 0.0;
      try {
        p = std::stod(rest, &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (!rest.empty() && used == rest.size()) return power(n, p);
    }
    throw InvalidArgument("unknown function name: " + name);
  }

 private:
  static ReferenceFunction make(std::string name, int n, Scalar phi, Scalar dphi, GrowthCertificate cert) {
    require(n > 0, "function dimension must be positive");
    ReferenceFunction f;
    f.name_ = std::move(name);
    f.n_ = n;
    f.phi_ = std::move(phi);
    f.dphi_ = std::move(dphi);
    f.cert_ = cert;
    return f;
  }

  static std::string format_exponent(double p) {
    std::string s = std::to_string(p);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  std::string name_;
  int n_ = 0;
  Scalar phi_;
  Scalar dphi_;
  GrowthCertificate cert_;
};

/// Nonconvex fixture: f(x, y, z) = -g(x, y, z) for the multilinear form
/// g = sum a_ijk x_i y_j z_k on D = {|x|, |y|, |z| <= 1}, and -g(tx, ty, tz)
/// with t = 1/max(|x|, |y|, |z|) outside D. f*(0) = max_D g.
inline std::function<double(const Vector &)> multilinear_demo(std::vector<double> coeffs, int n) {
  require(n > 0, "multilinear demo: n must be positive");
  require(coeffs.size() == static_cast<std::size_t>(n) * n * n, "multilinear demo: need n^3 coefficients");
  return [coeffs = std::move(coeffs), n](const Vector &w) {
    if (w.size() != 3 * n) throw InvalidArgument("multilinear demo: dimension mismatch");
    Vector x = w.segment(0, n);
    Vector y = w.segment(n, n);
    Vector z = w.segment(2 * n, n);
    const double m = std::max({x.norm(), y.norm(), z.norm()});
    if (m > 1.0) {
      x /= m;
      y /= m;
      z /= m;
    }
    double g = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          g += coeffs[static_cast<std::size_t>((i * n + j) * n + k)] * x[i] * y[j] * z[k];
    return -g;
  };
}

}  // namespace duality
