#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "warpcrit/boundary_match.hpp"
#include "warpcrit/profile_ode.hpp"

namespace warpcrit {

/// Tensor eigenvalues of g = ds^2 + r^2 h in the orthonormal frame
/// {d/ds, r^-1 e_i}. Every tensor has one radial and one tangential value.
struct CurvatureSample {
  double s = 0, r = 0, rp = 0, rpp = 0, lam = 0, lamp = 0;
  double ric_ss = 0, ric_tan = 0, scal = 0;
  double hess_ss = 0, hess_tan = 0, lap = 0;
  double sec_rad = 0, sec_tan = 0;
  double mean_curv = 0;  // level set {s}, normal d/ds
  double schouten_ss = 0, schouten_tan = 0;
};

[[nodiscard]] CurvatureSample curvature_sample(const ProfilePoint& pt, const OdeParams& params, double kappa0);
/// Throws OutOfGrid outside the window.
[[nodiscard]] CurvatureSample curvature_at(const Profile& profile, const FiberSpec& fiber, double s);

struct ResidualReport {
  double max_critical_residual = 0;  // both frame components of the critical equation
  double max_ss_residual = 0;
  double max_tan_residual = 0;
  double max_trace_residual = 0;     // Delta lambda + (R lambda + n)/(n-1)
  double max_scal_deviation = 0;     // |R(g) - R|
  double max_weyl_residual = 0;      // sectional curvatures rebuilt from lambda and R
  double max_gauss_residual = 0;     // scal vs sectional curvatures
  double max_lambda_identity = 0;    // |r' lam' - r'' lam + r/(n-1)|
  double max_conservation = 0;       // first integral minus the fiber kappa0
  std::optional<double> max_einstein_residual;  // |ric_ss - ric_tan|, a = 0 only
  std::optional<double> min_ricci_gap;          // min |ric_ss - ric_tan|, a > 0
  std::size_t grid_size = 0;
  std::size_t masked_points = 0;
  Tolerances tolerances;
  bool passed = false;
};

struct VerifyOptions {
  bool check_fiber = true;
  /// Restrict to grid points inside [first, second] (e.g. a matched domain).
  std::optional<std::pair<double, double>> interval;
  Tolerances tol{};
};

/// Evaluates the critical-metric equation and the derived identities at every
/// grid node. Nodes with r below the positivity floor (geodesic-ball centres)
/// are skipped. Throws FiberMismatch when check_fiber is set and the fiber
/// curvature disagrees with the profile's first integral.
[[nodiscard]] ResidualReport verify_critical(const Profile& profile, const FiberSpec& fiber,
                                             const VerifyOptions& opt = {});

struct ConformalReport {
  double max_residual = 0;         // rebuilt minus actual sectional curvatures
  double max_kulkarni_nomizu = 0;  // Schouten (x) g reconstruction
  std::size_t used_points = 0;
  std::size_t masked_points = 0;
};

/// Throws AllPointsMasked when no node clears the lambda floor.
[[nodiscard]] ConformalReport verify_conformally_flat(const Profile& profile, const FiberSpec& fiber,
                                                      const VerifyOptions& opt = {});

struct LevelSetGeometry {
  double grad_norm = 0;  // |lambda'|
  double umbilic = 0;    // r'/r, second fundamental form factor for d/ds
  double mean_curv = 0;  // (n-1) r'/r
  std::optional<double> einstein_umbilic;   // (-kappa lambda - 1/(n-1)) / |lambda'|, a = 0
  std::optional<double> einstein_residual;  // against sign(lambda') r'/r
};

/// Throws CriticalLevel when lambda'(s) = 0.
[[nodiscard]] LevelSetGeometry level_set_geometry(const Profile& profile, double s);

/// Fiber curvature implied by the profile, read where r' is smallest.
[[nodiscard]] double implied_kappa0(const Profile& profile);

}  // namespace warpcrit
