#include <doctest.h>

#include <cmath>
#include <numbers>

#include "warpcrit/errors.hpp"
#include "warpcrit/spectral.hpp"

#ifdef WARPCRIT_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace warpcrit;

namespace {

// Constant solution r = 1 of R = 6, a = 1, n = 3, with a dummy lambda.
Profile cylinder(double s_max) {
  auto sol = integrate_r({3, 6, 1}, 1.0, s_max);
  const std::size_t m = sol->size();
  return Profile(sol, 0.0, std::vector<double>(m, 1.0), std::vector<double>(m, 0.0));
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("cylinder: exact Dirichlet eigenvalue") {
    const Profile p = cylinder(3.0);
    const double L = 2.5;
    const auto res = first_dirichlet_eigenvalue(p, 0.0, L);
    const double exact = 2 * std::numbers::pi * std::numbers::pi / (L * L) - 6;
    CHECK(res.gamma1 == doctest::Approx(exact).epsilon(1e-8));
    CHECK(std::abs(res.gamma1 - exact) <= res.error_bound + 1e-9);
    CHECK(res.observed_order == doctest::Approx(2.0).epsilon(0.02));
    CHECK(res.gamma1_literal == doctest::Approx(exact + 6 - 3).epsilon(1e-8));
  }

  TEST_CASE("R > 0, r_min phase: zero mode on [0, s1]") {
    const OdeParams par{3, 6, 1};
    const auto [s1, s2] = first_positive_rp_roots(par, 0.8);
    const Profile p = solve_lambda(integrate_r(par, 0.8, s1 + 1.0), 0.0);
    const auto res = first_dirichlet_eigenvalue(p, 0.0, s1);
    CHECK(res.sign == SpectralSign::Zero);
    CHECK(std::abs(res.gamma1) <= 1e-6);
    CHECK(deviation_from_rp(p, res.eigen_s, res.eigen_phi) <= 1e-5);

    const auto bigger = first_dirichlet_eigenvalue(p, -0.1 * s1, 1.1 * s1);
    CHECK(bigger.sign == SpectralSign::Negative);
    const auto tiny = first_dirichlet_eigenvalue(p, 0.4 * s1, 0.5 * s1);
    CHECK(tiny.sign == SpectralSign::Positive);
  }

  TEST_CASE("domain monotonicity and Rayleigh quotient") {
    const Profile p = solve_lambda(integrate_r({4, -6, 2}, 1.0, 4.0), 0.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double L : {0.5, 1.0, 1.5, 2.0}) {
      const auto res = first_dirichlet_eigenvalue(p, 0.1, 0.1 + L);
      CHECK(res.gamma1 < prev);
      prev = res.gamma1;
      CHECK(res.rayleigh == doctest::Approx(res.levels[2]).epsilon(1e-9));
    }
  }

  TEST_CASE("eigenvector is positive inside and vanishes at the ends") {
    const Profile p = solve_lambda(integrate_r({3, 0, 1}, 1.0, 3.0), 0.0);
    const auto res = first_dirichlet_eigenvalue(p, -1.0, 2.0);
    REQUIRE(res.eigen_phi.size() == 801);
    CHECK(res.eigen_phi.front() == 0.0);
    CHECK(res.eigen_phi.back() == 0.0);
    for (std::size_t i = 1; i + 1 < res.eigen_phi.size(); ++i) CHECK(res.eigen_phi[i] > 0);
  }

#ifdef WARPCRIT_HAVE_EIGEN
  TEST_CASE("Sturm bisection agrees with a dense generalized eigensolver") {
    const Profile p = solve_lambda(integrate_r({4, -6, 2}, 1.0, 3.0), 0.0);
    const double b1 = -0.7, b2 = 1.3;
    const std::size_t cells = 120;
    const int n = p.params().n;
    const double h = (b2 - b1) / cells;
    const auto w = [&](double s) { return std::pow(p.base().r_at(s), n - 1); };
    const int m = static_cast<int>(cells) - 1;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m), M = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      const double s = b1 + h * (i + 1);
      const double left = w(s - 0.5 * h), right = w(s + 0.5 * h);
      K(i, i) = (n - 1) * (left + right) / (h * h) - p.params().R * w(s);
      if (i > 0) K(i, i - 1) = -(n - 1) * left / (h * h);
      if (i + 1 < m) K(i, i + 1) = -(n - 1) * right / (h * h);
      M(i, i) = w(s);
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(K, M);
    REQUIRE(solver.info() == Eigen::Success);
    const auto mine = discrete_first_eigen(p, b1, b2, cells);
    CHECK(mine.gamma == doctest::Approx(solver.eigenvalues()(0)).epsilon(1e-10));
  }
#endif

  TEST_CASE("Green identity on a matched interval") {
    const Profile p = solve_lambda(integrate_r({3, 6, 1}, 0.8, 4.0), 0.3);
    const auto roots = find_roots(p);
    double z2 = 0, z1 = 0;
    for (double s : roots.lam_roots) {
      if (s < 0) z2 = s;
      if (s > 0 && z1 == 0) z1 = s;
    }
    REQUIRE(z2 < 0);
    REQUIRE(z1 > 0);
    const auto id = green_identity(p, z2, z1);
    CHECK(id.ratio == doctest::Approx(1.0).epsilon(1e-7));
  }

  TEST_CASE("Proposition checks for both phases") {
    for (double r0 : {0.8, 1.2}) {
      const auto rep = verify_prop36({3, 6, 1}, r0, 0.3);
      CHECK(rep.all_ok());
      CHECK(rep.zero_mode.sign == SpectralSign::Zero);
      CHECK(rep.enlarged.sign == SpectralSign::Negative);
      CHECK(rep.matched.sign == rep.expected_matched);
    }
    CHECK(verify_prop36({3, 6, 1}, 0.8, 0.3).expected_matched == SpectralSign::Positive);
    CHECK(verify_prop36({3, 6, 1}, 1.2, 0.3).expected_matched == SpectralSign::Negative);
  }

  TEST_CASE("errors") {
    const Profile p = cylinder(2.0);
    CHECK_THROWS_AS((void)first_dirichlet_eigenvalue(p, 1.0, 0.5), Error);
    CHECK_THROWS_AS((void)first_dirichlet_eigenvalue(p, 0.0, 5.0), Error);
    CHECK_THROWS_AS((void)discrete_first_eigen(p, 0.0, 1.0, 2), Error);
    CHECK_THROWS_AS((void)verify_prop36({3, 0, 1}, 1.0, 0.0), Error);
  }
}
