#include "catch2/catch_amalgamated.hpp"
#include "test_support.hpp"

using namespace duality;
using namespace duality::testing;
using Catch::Approx;

namespace {

ConeDescriptor descriptor_of(const ReferenceCone &cone) {
  const auto d = cone.interior_data();
  return normalize_cone(d.a, d.b, d.eps_a, d.eps_b);
}

std::vector<ReferenceCone> test_cones() {
  return {ReferenceCone::orthant(2), ReferenceCone::orthant(3), ReferenceCone::orthant(4),
          ReferenceCone::second_order(3), ReferenceCone::second_order(4), ReferenceCone::psd(2),
          ReferenceCone::psd(3)};
}

}  // namespace

TEST_CASE("cone normalization", "[conedual]") {
  const auto same = normalize_cone(make_vector({1.0, 1.0}), make_vector({0.5, 0.5}), 0.5, 0.5);
  CHECK(same.a == make_vector({1.0, 1.0}));
  CHECK(same.eps_a == 0.5);
  const auto halved = normalize_cone(make_vector({2.0, 2.0}), make_vector({0.5, 0.5}), 1.0, 0.5);
  CHECK(halved.a == make_vector({1.0, 1.0}));
  CHECK(halved.eps_a == Approx(0.5));
  CHECK(halved.b.dot(halved.a) == Approx(1.0));
  CHECK(halved.rho_b_in <= halved.rho_b_out);
  CHECK(halved.rho_a_in <= halved.rho_a_out);
  CHECK_THROWS_AS(normalize_cone(make_vector({1.0, 0.0}), make_vector({-1.0, 0.0}), 0.1, 0.1), InvalidArgument);
  CHECK_THROWS_AS(normalize_cone(make_vector({1.0, 1.0}), make_vector({1.0, 1.0}), 0.0, 0.1), InvalidArgument);

  const auto dd = dual_descriptor(halved);
  CHECK(dd.a == halved.b);
  CHECK(dd.b == halved.a);
  CHECK(dd.rho_b_out == halved.rho_a_out);
}

TEST_CASE("interior bound check", "[conedual]") {
  CHECK(interior_bound_check(make_vector({1.0, 1.0}), 1.0, make_vector({3.0, 4.0})));
  CHECK(interior_bound_check(make_vector({1.0, 1.0}), 1.0, make_vector({1.0, 0.0})));
  CHECK_FALSE(interior_bound_check(make_vector({1.0, 0.0}), 0.5, make_vector({0.0, 1.0})));
}

TEST_CASE("interior bound holds on every cone member", "[conedual][property]") {
  for (const auto &cone : test_cones()) {
    const auto d = descriptor_of(cone);
    CounterRng rng(30, static_cast<std::uint64_t>(cone.dim() * 10 + static_cast<int>(cone.kind())));
    int tested = 0;
    while (tested < 1000) {
      const Vector x = cone_biased_point(rng, cone);
      if (!cone.member(x)) continue;
      ++tested;
      REQUIRE(interior_bound_check(d.b, d.eps_b * (1.0 - 1e-12), x));
    }
  }
}

TEST_CASE("section points and frames", "[conedual]") {
  const Vector p = section_point(make_vector({0.6, 0.8}), make_vector({1.0, 1.0}));
  CHECK(p[0] == Approx(0.6 / 1.4));
  CHECK(p[1] == Approx(0.8 / 1.4));
  CHECK(section_point(make_vector({0.5, 0.5}), make_vector({1.0, 1.0})) == make_vector({0.5, 0.5}));
  CHECK_THROWS_AS(section_point(make_vector({-1.0, 1.0}), make_vector({1.0, 0.0})), InvalidArgument);

  for (const auto &cone : test_cones()) {
    const auto d = descriptor_of(cone);
    const auto f = SectionFrame::make(d.a, d.b);
    CHECK(f.dim() == d.n - 1);
    const Matrix gram = f.basis.transpose() * f.basis;
    CHECK((gram - Matrix::Identity(d.n - 1, d.n - 1)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((f.basis.transpose() * d.b).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("section membership from the cone oracle", "[conedual]") {
  const auto cone = ReferenceCone::orthant(2);
  const auto oracle = cone.oracle();
  const auto d = normalize_cone(make_vector({0.5, 0.5}), make_vector({1.0, 1.0}), 0.5, 1.0);
  CHECK(cone_wmem_to_section_wmem(oracle, d, make_vector({0.5, 0.5}), 0.05) == WeakVerdict::InThickened);
  CHECK(cone_wmem_to_section_wmem(oracle, d, make_vector({1.5, -0.5}), 0.05) == WeakVerdict::NotInShrunk);
  CHECK_NOTHROW(cone_wmem_to_section_wmem(oracle, d, make_vector({1.0, 0.0}), 0.05));
  CHECK(oracle.calls() == 3);
  CHECK_THROWS_AS(cone_wmem_to_section_wmem(oracle, d, make_vector({-1.0, 0.5}), 0.05), InvalidArgument);
}

TEST_CASE("cone membership from the section oracle", "[conedual]") {
  const auto cone = ReferenceCone::orthant(2);
  const auto d = normalize_cone(make_vector({0.5, 0.5}), make_vector({1.0, 1.0}), 0.5, 1.0);
  const auto frame = SectionFrame::make(d.a, d.b);
  RelativeWmemOracle section(frame, [&](const Vector &y, double) {
    return cone.member(y) ? WeakVerdict::InThickened : WeakVerdict::NotInShrunk;
  });
  CHECK(section_wmem_to_cone_wmem(section, d, make_vector({-0.5, -0.5}), 0.01) == WeakVerdict::NotInShrunk);
  CHECK(section.calls() == 0);
  CHECK(section_wmem_to_cone_wmem(section, d, make_vector({0.6, 0.4}), 0.01) == WeakVerdict::InThickened);
  CHECK(section_wmem_to_cone_wmem(section, d, make_vector({0.7, -0.05}), 0.001) == WeakVerdict::NotInShrunk);
  CHECK(section.calls() == 2);
}

TEST_CASE("section round trip reproduces cone verdicts", "[conedual][property]") {
  constexpr double kDelta = 0.02;
  for (const auto &cone : test_cones()) {
    const auto d = descriptor_of(cone);
    const auto oracle = cone.oracle();
    const auto frame = SectionFrame::make(d.a, d.b);
    RelativeWmemOracle section(frame, [&](const Vector &y, double eps) {
      return cone_wmem_to_section_wmem(oracle, d, y, eps);
    });
    CounterRng rng(31, static_cast<std::uint64_t>(cone.dim() * 10 + static_cast<int>(cone.kind())));
    int tested = 0;
    while (tested < 200) {
      const Vector x = shell_point(rng, d.n, 0.5, 1.0);
      if (d.b.dot(x) <= 0.0) continue;
      const Vector y = section_point(x, d.b);
      const double margin = cone.signed_margin(y);
      if (std::abs(margin) < 2.0 * kDelta) continue;
      ++tested;
      REQUIRE(section_wmem_to_cone_wmem(section, d, x, kDelta) ==
              (margin > 0.0 ? WeakVerdict::InThickened : WeakVerdict::NotInShrunk));
    }
  }
}

TEST_CASE("dual cone oracle on fixed queries", "[conedual]") {
  const ToleranceConfig cfg;
  const auto orthant = ReferenceCone::orthant(2);
  const auto dual = dual_cone_wmem(orthant.oracle(), descriptor_of(orthant), cfg);
  CHECK(dual.query(make_vector({0.5, 0.5}), 0.05) == WeakVerdict::InThickened);
  CHECK(dual.query(make_vector({-0.6, 0.3}), 0.05) == WeakVerdict::NotInShrunk);
  CHECK(dual.query(Vector::Zero(2), 0.05) == WeakVerdict::InThickened);
  const auto soc = ReferenceCone::second_order(3);
  const auto dsoc = dual_cone_wmem(soc.oracle(), descriptor_of(soc), cfg);
  CHECK(dsoc.query(make_vector({0.1, 0.1, 0.8}), 0.05) == WeakVerdict::InThickened);
  CHECK_THROWS_AS(dual_cone_wmem(soc.oracle(), descriptor_of(orthant), cfg), InvalidArgument);
}

TEST_CASE("dual cone oracle matches the self-dual reference", "[conedual][property]") {
  constexpr double kDelta = 0.02;
  const ToleranceConfig cfg;
  for (const auto &cone : test_cones()) {
    const auto dual = dual_cone_wmem(cone.oracle(), descriptor_of(cone), cfg);
    CounterRng rng(32, static_cast<std::uint64_t>(cone.dim() * 10 + static_cast<int>(cone.kind())));
    int tested = 0;
    while (tested < 100) {
      const Vector c = rng.uniform() < 0.5 ? shell_point(rng, cone.dim(), 0.5, 1.0)
                                           : cone_biased_point(rng, cone).normalized() * rng.uniform(0.5, 1.0);
      const double margin = cone.signed_margin(c);
      if (std::abs(margin) < 2.0 * kDelta) continue;
      ++tested;
      const auto expected = margin > 0.0 ? WeakVerdict::InThickened : WeakVerdict::NotInShrunk;
      REQUIRE(dual.query(c, kDelta) == expected);
      REQUIRE(dual.query(2.0 * c, kDelta) == expected);
    }
  }
}
