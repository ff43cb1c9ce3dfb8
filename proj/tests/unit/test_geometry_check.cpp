#include <doctest.h>

#include <cmath>
#include <memory>

#include "warpcrit/errors.hpp"
#include "warpcrit/geometry_check.hpp"

using namespace warpcrit;

namespace {

FiberSpec fiber_for(const Profile& p) { return {p.params().n - 1, p.kappa0(), false}; }

// Same base solution with lambda shifted by eps * s, which breaks the critical equation.
Profile tilted(const Profile& p, double eps) {
  std::vector<double> lam(p.lam().begin(), p.lam().end()), lamp(p.lamp().begin(), p.lamp().end());
  for (std::size_t i = 0; i < lam.size(); ++i) {
    lam[i] += eps * p.grid()[i];
    lamp[i] += eps;
  }
  return Profile(p.base_ptr(), p.C(), std::move(lam), std::move(lamp));
}

}  // namespace

TEST_SUITE("geometry_check") {
  TEST_CASE("curvature of the R = 0 profile at its neck") {
    const Profile p = solve_lambda(integrate_r({3, 0, 1}, 1.0, 3.0), 0.0);
    const auto c = curvature_at(p, fiber_for(p), 0.0);
    CHECK(c.ric_ss == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(c.scal == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c.ric_ss + 2 * c.ric_tan == doctest::Approx(c.scal).epsilon(1e-12));
  }

  TEST_CASE("hyperbolic warped example has scalar curvature -6 in dimension 3") {
    const auto p = warped_hyperbolic_profile(3, 0.7, 2.0);
    const FiberSpec f{2, -1.0, false};
    for (double s : {-1.5, 0.0, 0.4, 1.9}) {
      const auto c = curvature_at(p, f, s);
      CHECK(c.scal == doctest::Approx(-6.0).epsilon(1e-9));
      CHECK(c.ric_ss == doctest::Approx(c.ric_tan).epsilon(1e-9));
    }
    const auto rep = verify_critical(p, f);
    CHECK(rep.passed);
    REQUIRE(rep.max_einstein_residual);
    CHECK(*rep.max_einstein_residual <= 1e-8);
  }

  TEST_CASE("critical residuals vanish across regimes") {
    for (OdeParams par : {OdeParams{3, 0, 1}, OdeParams{4, -6, 2}, OdeParams{5, 6, 0.5}, OdeParams{3, -6, 0.5}}) {
      const double r0 = par.R > 0 ? 0.8 * *par.equilibrium_radius() : 1.0;
      const Profile p = solve_lambda(integrate_r(par, r0, 4.0), 0.25);
      const auto rep = verify_critical(p, fiber_for(p));
      CHECK(rep.passed);
      CHECK(rep.max_critical_residual <= 1e-8);
      CHECK(rep.max_weyl_residual <= 1e-8);
      CHECK(rep.max_gauss_residual <= 1e-10);
      CHECK(rep.max_conservation <= 1e-9);
      CHECK_FALSE(rep.max_einstein_residual);
      REQUIRE(rep.min_ricci_gap);
      CHECK(*rep.min_ricci_gap > 0);
      const auto conf = verify_conformally_flat(p, fiber_for(p));
      CHECK(conf.max_residual <= 1e-8);
      CHECK(conf.max_kulkarni_nomizu <= 1e-8);
      CHECK(conf.used_points > 0);
    }
  }

  TEST_CASE("space-form balls pass and skip their centre") {
    for (int kappa : {-1, 0, 1}) {
      const auto p = space_form_profile(3, kappa, 0.4, 1.2);
      const auto rep = verify_critical(p, FiberSpec{2, 1.0, true});
      CHECK(rep.passed);
      CHECK(rep.grid_size == p.size() - 1);
      REQUIRE(rep.max_einstein_residual);
      CHECK(*rep.max_einstein_residual <= 1e-8);
    }
  }

  TEST_CASE("negative controls: perturbed lambda and wrong fiber") {
    const Profile p = solve_lambda(integrate_r({3, 0, 1}, 1.0, 3.0), 0.0);
    const auto bad = verify_critical(tilted(p, 1e-3), fiber_for(p));
    CHECK_FALSE(bad.passed);
    CHECK(bad.max_critical_residual > 1e-5);

    const FiberSpec wrong{2, p.kappa0() + 0.01, false};
    try {
      (void)verify_critical(p, wrong);
      FAIL("expected FiberMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::FiberMismatch);
    }
    VerifyOptions loose;
    loose.check_fiber = false;
    CHECK_FALSE(verify_critical(p, wrong, loose).passed);
    CHECK(implied_kappa0(p) == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("interval restriction and masking") {
    const Profile p = solve_lambda(integrate_r({3, 0, 1}, 1.0, 3.0), 0.0);
    VerifyOptions opt;
    opt.interval = std::pair{-0.5, 0.5};
    const auto rep = verify_critical(p, fiber_for(p), opt);
    CHECK(rep.grid_size == 1001);
    opt.interval = std::pair{5.0, 6.0};
    CHECK_THROWS_AS((void)verify_critical(p, fiber_for(p), opt), Error);
  }

  TEST_CASE("level sets") {
    const auto flat = space_form_profile(3, 0, 1.0, 3.0);
    const auto g = level_set_geometry(flat, 2.0);
    CHECK(g.umbilic == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g.mean_curv == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(g.einstein_residual);
    CHECK(*g.einstein_residual <= 1e-9);

    const auto hyp = warped_hyperbolic_profile(3, 0.7, 2.0);
    const auto h = level_set_geometry(hyp, 1.0);
    CHECK(h.grad_norm == doctest::Approx(0.7 * std::cosh(1.0)).epsilon(1e-9));
    REQUIRE(h.einstein_residual);
    CHECK(*h.einstein_residual <= 1e-8);

    try {
      (void)level_set_geometry(flat, 0.0);
      FAIL("expected CriticalLevel");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CriticalLevel);
    }
  }
}
