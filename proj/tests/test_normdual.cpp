#include "catch2/catch_amalgamated.hpp"
#include "test_support.hpp"

using namespace duality;
using namespace duality::testing;
using Catch::Approx;

namespace {

/// Smallest integer strictly above 1 + (log2 b1 - log2 2 delta)/(2 - log2 3),
/// found by counting up rather than by floor.
int count_steps(double b1, double delta) {
  if (2.0 * delta / b1 > 1.0) return 1;
  const double bound = 1.0 + (std::log2(b1) - std::log2(2.0 * delta)) / (2.0 - std::log2(3.0));
  int m = 1;
  while (!(static_cast<double>(m) > bound)) ++m;
  return m;
}

}  // namespace

TEST_CASE("ball scaling bounds", "[normdual]") {
  const auto e = ball_scaling_bounds(NormDescriptor::make(2, 1.0, 1.0), 0.1);
  CHECK(e.thick_lo == Approx(1.1));
  CHECK(e.thick_hi == Approx(1.1));
  CHECK(e.shrink_lo == Approx(0.9));
  CHECK(e.shrink_hi == Approx(0.9));
  const auto b = ball_scaling_bounds(NormDescriptor::make(2, 1.0, 2.0), 0.1);
  CHECK(b.thick_lo == Approx(1.1));
  CHECK(b.thick_hi == Approx(1.2));
  CHECK(b.shrink_lo == Approx(0.8));
  CHECK(b.shrink_hi == Approx(0.9));
  CHECK_THROWS_AS(ball_scaling_bounds(NormDescriptor::make(2, 2.0, 2.0), 0.5), InvalidArgument);
  CHECK_THROWS_AS(ball_scaling_bounds(NormDescriptor::make(2, 1.0, 1.0), 0.0), InvalidArgument);
}

TEST_CASE("Euclidean thickening is exact scaling", "[normdual][property]") {
  CounterRng rng(20);
  for (int i = 0; i < 500; ++i) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 2);
    const Vector x = shell_point(rng, n, 0.0, 2.0);
    const double delta = rng.uniform(0.01, 0.5);
    const auto s = ball_scaling_bounds(NormDescriptor::make(n, 1.0, 1.0), std::min(delta, 0.99));
    const bool inside = distance_to_lp_ball(x, 2.0) <= delta;
    REQUIRE(inside == (x.norm() <= 1.0 + delta));
    if (delta < 0.99) REQUIRE(inside == (x.norm() <= s.thick_lo));
  }
}

TEST_CASE("scaling implications on l_p balls", "[normdual][property]") {
  for (double p : {1.0, 3.0, kInf}) {
    const auto norm = ReferenceNorm::lp(2, p);
    const auto d = norm.descriptor();
    CounterRng rng(21, static_cast<std::uint64_t>(std::isinf(p) ? 9 : p));
    for (int i = 0; i < 100; ++i) {
      const Vector x = shell_point(rng, 2, 0.2, 1.8);
      const double delta = rng.uniform(0.01, 0.3);
      const double v = norm.eval(x);
      if (v <= 1.0 + d.k_lo * delta) REQUIRE(distance_to_lp_ball(x, p) <= delta + 1e-9);
      if (v <= 1.0 - d.k_hi * delta) REQUIRE(depth_in_lp_ball(x, p) >= delta - 1e-9);
    }
  }
}

TEST_CASE("rescaled norms", "[normdual]") {
  const auto a = rescale_norm(NormDescriptor::make(2, 1.0, 2.0), 2.0);
  CHECK(a.k_lo == 2.0);
  CHECK(a.k_hi == 4.0);
  const auto b = rescale_norm(NormDescriptor::make(2, 0.5, 1.0), 4.0);
  CHECK(b.k_lo == 2.0);
  CHECK(b.k_hi == 4.0);
  const auto c = rescale_norm(NormDescriptor::make(2, 0.5, 1.0), 1.0);
  CHECK(c.k_lo == 0.5);
  CHECK_THROWS_AS(rescale_norm(NormDescriptor::make(2, 0.5, 1.0), 0.0), InvalidArgument);
}

TEST_CASE("ball membership from weak validity over the dual ball", "[normdual]") {
  // nu = 2 |.|: the dual ball is the Euclidean ball of radius 2.
  const ToleranceConfig cfg;
  const auto desc = NormDescriptor::make(2, 2.0, 2.0);
  const WmemOracle dual_ball = exact_to_weak(
      2, [](const Vector &x) { return x.norm() <= 2.0; }, CenteredBody::make(Vector::Zero(2), 2.0, 2.0));
  const WvalSolver solver = [&](const WvalQuery &q) { return wval_from_wmem(dual_ball.centered(), dual_ball, q, cfg); };
  CHECK(wmem_ball_from_dual_wval(solver, desc, make_vector({0.2, 0.0}), 0.1) == WeakVerdict::InThickened);
  CHECK(wmem_ball_from_dual_wval(solver, desc, make_vector({1.0, 0.0}), 0.1) == WeakVerdict::NotInShrunk);
  CHECK_NOTHROW(wmem_ball_from_dual_wval(solver, desc, make_vector({0.5, 0.0}), 0.1));
  CHECK_THROWS_AS(wmem_ball_from_dual_wval(solver, NormDescriptor::make(2, 1.0, 1.0), make_vector({0.5, 0.0}), 0.1),
                  InvalidArgument);
}

TEST_CASE("dual ball oracle from the primal ball oracle", "[normdual]") {
  const ToleranceConfig cfg;
  const auto l1 = ReferenceNorm::lp(2, 1.0);
  const auto dual = dual_ball_wmem(l1.ball_oracle(), l1.descriptor(), cfg);
  CHECK(dual.query(make_vector({0.5, 0.5}), 0.05) == WeakVerdict::InThickened);
  CHECK(dual.query(make_vector({1.5, 0.0}), 0.05) == WeakVerdict::NotInShrunk);
  CHECK(dual.calls() == 2);
  const auto l2 = ReferenceNorm::lp(2, 2.0);
  const auto d2 = dual_ball_wmem(l2.ball_oracle(), l2.descriptor(), cfg);
  CHECK_NOTHROW(d2.query(make_vector({0.6, 0.8}), 0.1));
  CHECK(d2.centered().inner_radius == Approx(1.0));
}

TEST_CASE("dual of the dual ball reproduces the primal ball", "[normdual][property][slow]") {
  // Two nested cutting-plane loops per query; looser tolerances keep this fast.
  const auto cfg = ToleranceConfig::make(1e-6, 1e-3, 20000, 77);
  constexpr double kDelta = 0.05;
  for (double p : {1.0, 2.0, 3.0, kInf}) {
    const auto norm = ReferenceNorm::lp(2, p);
    const auto inner = dual_ball_wmem(norm.ball_oracle(), norm.descriptor(), cfg);
    const auto twice = dual_ball_wmem(inner, norm.descriptor().dual(), cfg);
    CounterRng rng(22, static_cast<std::uint64_t>(std::isinf(p) ? 9 : p));
    int tested = 0;
    while (tested < 50) {
      const Vector x = shell_point(rng, 2, 0.3, 1.7);
      const bool in = norm.member(x);
      const double margin = in ? depth_in_lp_ball(x, p) : distance_to_lp_ball(x, p);
      if (margin < 2.0 * kDelta) continue;
      ++tested;
      const auto v = twice.query(x, kDelta);
      REQUIRE(v == (in ? WeakVerdict::InThickened : WeakVerdict::NotInShrunk));
    }
  }
}

TEST_CASE("weak membership from a norm approximation", "[normdual]") {
  SECTION("shortcut branches make no oracle call") {
    const auto l2 = ReferenceNorm::lp(2, 2.0);
    const auto approx = l2.approx_oracle();
    CHECK(wmem_from_approx(approx, l2.descriptor(), make_vector({0.3, 0.0}), 0.01) == WeakVerdict::InThickened);
    CHECK(approx.calls() == 0);
  }
  SECTION("l1 with stored constants (1, 1.5)") {
    const auto l1 = ReferenceNorm::lp(2, 1.0);
    const auto desc = NormDescriptor::make(2, 1.0, 1.5);
    const auto approx = l1.approx_oracle();
    // nu(0.9, 0.9) = 1.8; |x| >= 1/k already decides without a call.
    CHECK(wmem_from_approx(approx, desc, make_vector({0.9, 0.9}), 0.01) == WeakVerdict::NotInShrunk);
    const auto before = approx.calls();
    CHECK(wmem_from_approx(approx, desc, make_vector({0.7, 0.4}), 0.01) == WeakVerdict::NotInShrunk);
    CHECK(approx.calls() - before == 1);
    CHECK(wmem_from_approx(approx, desc, make_vector({0.6, 0.3}), 0.01) == WeakVerdict::InThickened);
    CHECK(approx.calls() - before == 2);
  }
  CHECK_THROWS_AS(wmem_from_approx(ReferenceNorm::lp(2, 2.0).approx_oracle(), NormDescriptor::make(2, 1.0, 1.0),
                                   Vector::Zero(2), 0.01),
                  InvalidArgument);
}

TEST_CASE("approximation and membership agree outside the band", "[normdual][property]") {
  for (double p : {1.0, 2.0, 3.0, kInf}) {
    const auto norm = ReferenceNorm::lp(3, p);
    const auto d = norm.descriptor();
    const auto approx = norm.approx_oracle();
    const auto exact = norm.ball_oracle();
    CounterRng rng(23, static_cast<std::uint64_t>(std::isinf(p) ? 9 : p));
    int tested = 0;
    while (tested < 125) {
      const Vector x = shell_point(rng, 3, 0.3, 2.0);
      const double delta = rng.uniform(0.005, 0.1);
      const double v = norm.eval(x);
      if (v >= 1.0 - d.k_lo * delta && v <= 1.0 + d.k_lo * delta) continue;
      ++tested;
      REQUIRE(wmem_from_approx(approx, d, x, delta) == exact.query(x, delta));
    }
  }
}

TEST_CASE("nested interval length", "[normdual]") {
  CHECK(bisection_length(1.5, 0.01) == 17);
  CHECK(count_steps(1.5, 0.01) == 17);
  CHECK(bisection_length(1.0, 0.6) == 1);
  CHECK(bisection_length(1.0, 0.5) == count_steps(1.0, 0.5));
  CounterRng rng(24);
  for (int i = 0; i < 1000; ++i) {
    const double b1 = std::exp(rng.uniform(-3.0, 3.0));
    const double delta = std::exp(rng.uniform(-12.0, 1.0));
    REQUIRE(bisection_length(b1, delta) == count_steps(b1, delta));
  }
  CHECK_THROWS_AS(bisection_length(0.0, 0.1), InvalidArgument);
}

TEST_CASE("nested intervals certify the norm value", "[normdual]") {
  SECTION("Euclidean, b1 = 1.5") {
    const auto l2 = ReferenceNorm::lp(2, 2.0);
    const Vector x = make_vector({0.6, 0.8});
    const auto [omega, trace] = approx_from_wmem(l2.ball_oracle(), l2.descriptor(), x, 0.01);
    CHECK(trace.intervals.size() == 17);
    CHECK(std::abs(omega - 1.0) < 0.01);
  }
  SECTION("l1 at (0.5, 0.5)") {
    const auto l1 = ReferenceNorm::lp(2, 1.0);
    const auto [omega, trace] = approx_from_wmem(l1.ball_oracle(), l1.descriptor(), make_vector({0.5, 0.5}), 0.01);
    CHECK(omega > 0.99);
    CHECK(omega < 1.01);
  }
  SECTION("trace invariants on random points") {
    for (double p : {1.0, 1.5, 2.0, 3.0, kInf}) {
      const auto norm = ReferenceNorm::lp(3, p);
      const auto d = norm.descriptor();
      const auto ball = norm.ball_oracle();
      CounterRng rng(25, static_cast<std::uint64_t>(std::isinf(p) ? 9 : 2 * p));
      for (int i = 0; i < 40; ++i) {
        const Vector x = shell_point(rng, 3, 0.51, 1.49);
        const double delta = std::exp(rng.uniform(-7.0, 0.0));
        const auto [omega, trace] = approx_from_wmem(ball, d, x, delta);
        const double v = norm.eval(x);
        REQUIRE(static_cast<int>(trace.intervals.size()) == count_steps(1.5 * d.k_hi, delta));
        REQUIRE(trace.queries.size() + 1 == trace.intervals.size());
        for (std::size_t k = 0; k < trace.intervals.size(); ++k) {
          REQUIRE(trace.intervals[k].contains(v));
          if (k > 0) {
            const auto &prev = trace.intervals[k - 1];
            REQUIRE(trace.intervals[k].lo >= prev.lo);
            REQUIRE(trace.intervals[k].hi <= prev.hi);
            REQUIRE(trace.intervals[k].width() == Approx(0.75 * prev.width()).epsilon(1e-12));
          }
        }
        REQUIRE(std::abs(omega - v) < delta);
      }
    }
  }
  CHECK_THROWS_AS(approx_from_wmem(ReferenceNorm::lp(2, 2.0).ball_oracle(), NormDescriptor::make(2, 1.0, 1.0),
                                   make_vector({2.0, 0.0}), 0.01),
                  InvalidArgument);
}

TEST_CASE("dual norm values", "[normdual]") {
  constexpr double kDelta = 0.05;
  const ToleranceConfig cfg;
  const auto at = [&](double p, Vector y) {
    const auto norm = ReferenceNorm::lp(2, p);
    return dual_norm_eval(norm.ball_oracle(), norm.descriptor(), y, kDelta, cfg);
  };
  CHECK(std::abs(at(1.0, make_vector({3.0, 4.0})) - 4.0) <= 5 * kDelta);
  CHECK(std::abs(at(2.0, make_vector({3.0, 4.0})) - 5.0) <= 5 * kDelta);
  CHECK(std::abs(at(kInf, make_vector({1.0, 1.0})) - 2.0) <= 5 * kDelta);
  CHECK_THROWS_AS(at(2.0, Vector::Zero(2)), InvalidArgument);
}

TEST_CASE("dual norm accuracy on random points", "[normdual][property]") {
  constexpr double kDelta = 0.02;
  const ToleranceConfig cfg;
  for (double p : {1.0, 2.0, kInf, 3.0}) {
    const auto norm = ReferenceNorm::lp(2, p);
    const auto dual = norm.dual();
    const auto primal = norm.ball_oracle();
    CounterRng rng(26, static_cast<std::uint64_t>(std::isinf(p) ? 9 : p));
    for (int i = 0; i < 25; ++i) {
      const Vector y = shell_point(rng, 2, 0.1, 4.0);
      const auto rep = dual_norm_run(primal, norm.descriptor(), y, kDelta, cfg);
      REQUIRE(std::abs(rep.value - dual.eval(y)) <= 5.0 * kDelta);
      REQUIRE(rep.dual_queries == rep.trace.queries.size());
      REQUIRE(rep.primal_queries > 0);
    }
  }
}
