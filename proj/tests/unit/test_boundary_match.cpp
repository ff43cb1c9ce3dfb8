#include <doctest.h>

#include <cmath>

#include "warpcrit/boundary_match.hpp"
#include "warpcrit/errors.hpp"

using namespace warpcrit;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no warpcrit::Error thrown");
  return ErrorKind::InvalidArgument;
}

// Composite trapezoid on a fine uniform grid, away from any r' root.
double trapezoid(const RadialSolution& sol, double a, double b, int cells = 200000) {
  const double h = (b - a) / cells;
  double acc = 0;
  for (int i = 0; i <= cells; ++i) {
    const double s = a + i * h, rp = sol.rp_at(s);
    acc += (i == 0 || i == cells ? 0.5 : 1.0) * sol.r_at(s) / (rp * rp);
  }
  return acc * h;
}

}  // namespace

TEST_SUITE("boundary_match") {
  TEST_CASE("theta for R = 0, n = 3, a = 1") {
    auto sol = integrate_r({3, 0, 1}, 1.0, 8.0);
    REQUIRE(sol->theta());
    CHECK(*sol->theta() == doctest::Approx(0.904437239733059).epsilon(1e-10));
  }

  TEST_CASE("improper integral agrees with a trapezoid oracle and is odd in its limits") {
    auto sol = integrate_r({3, 0, 1}, 1.0, 8.0);
    const double I = improper_integral(*sol, 0.5, 2.0);
    CHECK(I == doctest::Approx(trapezoid(*sol, 0.5, 2.0)).epsilon(1e-8));
    CHECK(improper_integral(*sol, 2.0, 0.5) == doctest::Approx(-I).epsilon(1e-13));
    CHECK(improper_integral(*sol, -2.0, -0.5) == doctest::Approx(I).epsilon(1e-10));
  }

  TEST_CASE("integral across a root of r' is rejected") {
    auto sol = integrate_r({3, 0, 1}, 1.0, 4.0);
    CHECK(kind_of([&] { (void)improper_integral(*sol, -0.5, 0.5); }) == ErrorKind::SingularEndpoint);
  }

  TEST_CASE("R >= 0 with an infinite limit diverges") {
    auto sol = integrate_r({3, 0, 1}, 1.0, 4.0);
    CHECK(kind_of([&] { (void)improper_integral(*sol, 1.0, kInfinity); }) == ErrorKind::DivergentIntegral);
  }

  TEST_CASE("improper tail for R < 0 is stable against the truncation point") {
    auto sol = integrate_r({3, -6, 1}, 1.0, 16.0);
    const auto a = improper_integral_ex(*sol, 1.0, kInfinity);
    const auto b = improper_integral_ex(*sol, 1.0, kInfinity, {}, a.truncation + 1.0);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-9));
    CHECK(a.tail > 0);
  }

  TEST_CASE("cumulative table: monotone, anchored and invertible") {
    auto sol = integrate_r({3, 0, 1}, 1.0, 8.0);
    const CumulativeTable table(sol, *sol->theta());
    CHECK(table.value(*sol->theta()) == 0.0);
    double prev = -kInfinity;
    for (double s = 0.2; s < 7.5; s += 0.1) {
      const double v = table.value(s);
      CHECK(v > prev);
      prev = v;
      CHECK(table.inverse(v) == doctest::Approx(s).epsilon(1e-10));
    }
    CHECK(kind_of([&] { (void)table.inverse(1e9); }) == ErrorKind::OutOfRange);
  }

  TEST_CASE("classification R = 0") {
    auto sol = integrate_r({3, 0, 1}, 1.0, 8.0);
    for (double C : {-0.5, 0.0, 0.5}) {
      const auto rep = classify_roots(solve_lambda(sol, C));
      CHECK(rep.label == "R=0");
      CHECK(rep.consistent);
      CHECK(rep.observed.lam_roots.size() == 2);
    }
  }

  TEST_CASE("classification R < 0 around C0") {
    auto sol = integrate_r({3, -6, 1}, 1.0, 12.0);
    const double C0 = critical_C0(*sol);
    CHECK(C0 == doctest::Approx(0.27459606388).epsilon(1e-9));
    const auto c = classify_roots(solve_lambda(sol, 0.5 * C0));
    CHECK(c.label == "(c)");
    CHECK(c.consistent);
    CHECK(c.observed.lam_roots.size() == 2);
    const auto b = classify_roots(solve_lambda(sol, 2 * C0));
    CHECK(b.label == "(b)");
    CHECK(b.consistent);
    REQUIRE(b.observed.lam_roots.size() == 1);
    CHECK(b.observed.lam_roots[0] < 0);
    const auto a = classify_roots(solve_lambda(sol, -2 * C0));
    CHECK(a.label == "(a)");
    CHECK(a.consistent);
    REQUIRE(a.observed.lam_roots.size() == 1);
    CHECK(a.observed.lam_roots[0] > 0);
  }

  TEST_CASE("classification R > 0: one lambda root per monotone interval") {
    auto sol = integrate_r({3, 6, 1}, 0.8, 10.0);
    const auto rep = classify_roots(solve_lambda(sol, 0.3));
    CHECK(rep.label == "R>0");
    CHECK(rep.consistent);
  }

  TEST_CASE("matching: both routes agree and the boundary values vanish") {
    for (OdeParams p : {OdeParams{3, 0, 1}, OdeParams{4, -6, 2}, OdeParams{3, 6, 1}}) {
      const double r0 = p.R > 0 ? 0.8 : 1.0;
      auto sol = integrate_r(p, r0, 10.0);
      const double theta = *sol->theta();
      double zeta1 = 1.3 * theta;
      if (p.R > 0) zeta1 = theta + 0.3 * (first_positive_rp_roots(p, r0).first - theta);
      const auto m = match_boundary(sol, zeta1);
      CHECK(m.discrepancy <= 1e-8);
      CHECK(m.zeta2 == doctest::Approx(m.zeta2_direct).epsilon(1e-9));
      CHECK(m.zeta2 < 0);
      const Profile prof = solve_lambda(sol, m.C);
      CHECK(std::abs(prof.lam_at(m.zeta1)) <= 1e-9);
      CHECK(std::abs(prof.lam_at(m.zeta2)) <= 1e-9);
    }
  }

  TEST_CASE("matching for R < 0 keeps zeta2 below -zeta") {
    auto sol = integrate_r({3, -6, 1}, 1.0, 12.0);
    const double zeta = exclusion_zeta(sol);
    CHECK(zeta > 0);
    CHECK(zeta < *sol->theta());
    for (double f : {1.1, 1.5, 2.5, 5.0}) {
      const auto m = match_boundary(sol, f * *sol->theta());
      CHECK(m.zeta2 < -zeta);
    }
  }

  TEST_CASE("matching rejects zeta1 outside the branch") {
    auto sol = integrate_r({3, 0, 1}, 1.0, 6.0);
    CHECK(kind_of([&] { (void)match_boundary(sol, 100.0); }) == ErrorKind::OutOfRange);
    CHECK(kind_of([&] { (void)match_boundary(sol, -1.0); }) == ErrorKind::OutOfRange);
    auto neg = integrate_r({3, -6, 1}, 1.0, 12.0);
    CHECK(kind_of([&] { (void)match_boundary(neg, 0.5 * exclusion_zeta(neg)); }) == ErrorKind::OutOfRange);
  }

  TEST_CASE("example 1: two boundary components with unit flux") {
    const auto d = build_example1({3, 0, 1}, 1.0, 1.5);
    CHECK(d.boundary_components == 2);
    CHECK(d.zeta2 < 0);
    CHECK(d.flux1 == doctest::Approx(d.flux2).epsilon(1e-8));
    CHECK(d.interior_sign == 1);
    CHECK_FALSE(d.quotient);
    CHECK(kind_of([] { (void)build_example1({3, 0, 0}, 1.0, 1.5); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("example 2: symmetric quotient") {
    const auto d = build_example2({3, 0, 1}, 1.0);
    CHECK(d.zeta1 == doctest::Approx(-d.zeta2).epsilon(1e-12));
    CHECK(std::abs(d.match.C) <= 1e-10);
    CHECK(d.profile->C() == 0.0);
    REQUIRE(d.quotient);
    CHECK(d.boundary_components == 1);
    CHECK(kind_of([] { (void)build_example2({3, 0, 1}, 1.0, FiberSpec{2, 2.0, false}); }) ==
          ErrorKind::NoFreeInvolution);
    CHECK(kind_of([] { (void)build_example2({3, 0, 1}, 1.0, FiberSpec{2, 0.5, true}); }) ==
          ErrorKind::FiberMismatch);
  }

  TEST_CASE("Schwarzschild form: horizon and matching outside it") {
    const auto sf = schwarzschild_form({3, 0, 0.5});
    CHECK(sf.horizon_radius == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sf.horizon_from_flow == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sf.coefficient(2.0) == doctest::Approx(2.0).epsilon(1e-14));
    const auto m = sf.match_outer_radius(3.0);
    CHECK(sf.solution->r_at(m.zeta1) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(m.discrepancy <= 1e-8);
    CHECK(kind_of([&] { (void)sf.zeta_for_radius(0.5); }) == ErrorKind::OutOfRange);
  }
}
