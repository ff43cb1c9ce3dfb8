#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "warpcrit/tolerances.hpp"

namespace warpcrit {

/// The defining triple of the radial problem
///   r'' + R/(n(n-1)) r = a r^(1-n).
struct OdeParams {
  int n = 3;
  double R = 0;
  double a = 0;

  /// R / (n(n-1)).
  [[nodiscard]] double curvature() const { return R / (n * (n - 1.0)); }
  /// sqrt(-R/(n(n-1))), the exponential rate of growth when R < 0.
  [[nodiscard]] double growth_rate() const;
  /// r'' implied by the radial equation.
  [[nodiscard]] double rpp(double r) const;
  /// F(r) = R r^2/(n(n-1)) + 2a r^(2-n)/(n-2); the first integral is (r')^2 + F(r).
  [[nodiscard]] double potential(double r) const;
  /// (r')^2 + F(r).
  [[nodiscard]] double first_integral(double r, double rp) const { return rp * rp + potential(r); }
  /// Coefficient q(s) of the linear equation lambda'' + q lambda = -1/(n-1).
  [[nodiscard]] double lambda_coeff(double r) const;
  /// lambda'' implied by that equation.
  [[nodiscard]] double lambda_pp(double r, double lam) const;
  /// (n(n-1)a/R)^(1/n): the constant solution when R > 0 and a > 0.
  [[nodiscard]] std::optional<double> equilibrium_radius() const;

  void validate() const;
};

/// Which extremum of r sits at s = 0 when R > 0.
enum class Phase { Min, Max };

/// Radii where r' = 0 for a given kappa0: roots of F(r) = kappa0.
struct RadiusBounds {
  double lower = 0;
  std::optional<double> upper;  // present only for R > 0
};

[[nodiscard]] RadiusBounds radius_bounds(const OdeParams& params, double kappa0);

/// Even solution of the radial system sampled on a symmetric uniform grid,
/// together with the even companion lambda_0 (lambda_0'(0) = 0) when it exists.
/// Immutable after construction; shared between Profiles that differ only in C.
class RadialSolution {
 public:
  struct Columns {
    std::vector<double> grid, r, rp;
    std::vector<double> lam0, lam0p;       // empty when lambda_0 is unavailable
    std::vector<double> energy_residual;  // first integral minus kappa0, per sample
  };

  RadialSolution(OdeParams params, double kappa0, Columns columns, bool constant,
                 std::optional<double> period);

  [[nodiscard]] const OdeParams& params() const { return params_; }
  [[nodiscard]] double kappa0() const { return kappa0_; }
  [[nodiscard]] std::span<const double> grid() const { return cols_.grid; }
  [[nodiscard]] std::span<const double> r() const { return cols_.r; }
  [[nodiscard]] std::span<const double> rp() const { return cols_.rp; }
  [[nodiscard]] std::span<const double> lam0() const { return cols_.lam0; }
  [[nodiscard]] std::span<const double> lam0p() const { return cols_.lam0p; }
  [[nodiscard]] std::span<const double> energy_residual() const { return cols_.energy_residual; }
  [[nodiscard]] bool has_lambda0() const { return !cols_.lam0.empty(); }
  [[nodiscard]] bool constant_solution() const { return constant_; }
  [[nodiscard]] std::optional<double> period() const { return period_; }
  /// First positive root of lambda_0 inside the window.
  [[nodiscard]] std::optional<double> theta() const { return theta_; }
  [[nodiscard]] std::size_t size() const { return cols_.grid.size(); }
  [[nodiscard]] double front() const { return cols_.grid.front(); }
  [[nodiscard]] double back() const { return cols_.grid.back(); }
  /// Phase at s = 0 for R > 0 non-constant solutions.
  [[nodiscard]] std::optional<Phase> phase() const;

  /// Index i with grid[i] <= s <= grid[i+1]; throws OutOfGrid outside the window.
  [[nodiscard]] std::size_t locate(double s) const;
  [[nodiscard]] double r_at(double s) const;
  [[nodiscard]] double rp_at(double s) const;
  [[nodiscard]] double lam0_at(double s) const;
  [[nodiscard]] double lam0p_at(double s) const;

 private:
  OdeParams params_;
  double kappa0_;
  Columns cols_;
  bool constant_;
  std::optional<double> period_;
  std::optional<double> theta_;
};

/// Point values of a profile recovered from the dense output.
struct ProfilePoint {
  double s, r, rp, rpp, lam, lamp, lampp;
};

/// A warped-product profile r with a companion lambda = lambda_0 + C r'.
class Profile {
 public:
  /// lambda = lambda_0 + C r' on the base grid.
  Profile(std::shared_ptr<const RadialSolution> base, double C);
  /// Explicit lambda columns (closed forms, or data read back from disk).
  Profile(std::shared_ptr<const RadialSolution> base, double C, std::vector<double> lam,
          std::vector<double> lamp);

  [[nodiscard]] const RadialSolution& base() const { return *base_; }
  [[nodiscard]] std::shared_ptr<const RadialSolution> base_ptr() const { return base_; }
  [[nodiscard]] const OdeParams& params() const { return base_->params(); }
  [[nodiscard]] double kappa0() const { return base_->kappa0(); }
  [[nodiscard]] double C() const { return C_; }
  [[nodiscard]] std::optional<double> period() const { return base_->period(); }
  [[nodiscard]] std::span<const double> grid() const { return base_->grid(); }
  [[nodiscard]] std::span<const double> r() const { return base_->r(); }
  [[nodiscard]] std::span<const double> rp() const { return base_->rp(); }
  [[nodiscard]] std::span<const double> lam() const { return lam_; }
  [[nodiscard]] std::span<const double> lamp() const { return lamp_; }
  [[nodiscard]] std::size_t size() const { return base_->size(); }

  [[nodiscard]] ProfilePoint node(std::size_t i) const;
  [[nodiscard]] ProfilePoint at(double s) const;
  [[nodiscard]] double lam_at(double s) const;
  [[nodiscard]] double max_abs_lambda() const;

 private:
  std::shared_ptr<const RadialSolution> base_;
  double C_;
  std::vector<double> lam_, lamp_;
};

enum class RootKind { Min, Max, Plain };

struct RootSet {
  std::vector<double> rp_roots;
  std::vector<RootKind> rp_kinds;
  std::vector<double> lam_roots;
  bool constant_solution = false;
};

/// Integration controls shared by the constructors below.
struct GridOptions {
  double step = 1e-3;
  Tolerances tol{};
};

/// Integrates r'' + R r/(n(n-1)) = a r^(1-n) with r(0) = r0, r'(0) = 0 on
/// [-s_max, s_max]. The companion lambda_0 is integrated jointly whenever
/// r''(0) is not degenerate.
[[nodiscard]] std::shared_ptr<const RadialSolution> integrate_r(const OdeParams& params, double r0,
                                                                double s_max,
                                                                const GridOptions& opt = {});

/// Same, anchored on the first integral instead: r0 solves F(r0) = kappa0,
/// taking the smaller (Phase::Min) or larger (Phase::Max) root when R > 0.
[[nodiscard]] std::shared_ptr<const RadialSolution> integrate_r_from_kappa(
    const OdeParams& params, double kappa0, double s_max, Phase phase = Phase::Min,
    const GridOptions& opt = {});

/// lambda = lambda_0 + C r'.
[[nodiscard]] Profile solve_lambda(std::shared_ptr<const RadialSolution> base, double C);

[[nodiscard]] RootSet find_roots(const Profile& profile, double width = 1e-12);

/// Closed-form geodesic-ball profiles of the space forms (a = 0), sampled on [0, s_max].
[[nodiscard]] Profile space_form_profile(int n, int kappa, double lambda_p, double s_max,
                                         double step = 1e-3);

/// Numerical counterpart of space_form_profile: the a = 0 system integrated from
/// the ball centre r(0) = 0, r'(0) = 1, lambda(0) = lambda_p, lambda'(0) = 0.
[[nodiscard]] Profile integrate_geodesic_ball(int n, int kappa, double lambda_p, double s_max,
                                              const GridOptions& opt = {});

/// Closed-form complete Einstein warped example r = cosh s, kappa0 = -1,
/// lambda = A sinh s + 1/(n-1), sampled on [-s_max, s_max].
[[nodiscard]] Profile warped_hyperbolic_profile(int n, double A, double s_max, double step = 1e-3);

/// Positive r' roots s_1 < s_2 of a periodic solution (R > 0), found by
/// integrating forward from s = 0 as far as needed.
[[nodiscard]] std::pair<double, double> first_positive_rp_roots(const OdeParams& params, double r0,
                                                                const GridOptions& opt = {});

}  // namespace warpcrit
