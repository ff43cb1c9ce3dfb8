#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "warpcrit/profile_ode.hpp"

namespace warpcrit {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Symbolic constant-curvature cross-section N^(n-1). Only kappa0 and the
/// dimension enter the warped geometry.
struct FiberSpec {
  int dim = 2;
  double kappa0 = 1;
  bool free_involution = false;  // e.g. the antipodal map of a round sphere

  /// Round sphere (with antipodal map) when kappa0 > 0, otherwise a closed
  /// Einstein manifold without a recorded involution.
  [[nodiscard]] static FiberSpec for_solution(const RadialSolution& sol);
  void validate(const OdeParams& params) const;
};

struct QuotientRecord {
  std::string involution = "antipodal";
  std::string group = "{(id,0),(alpha,1)}";  // acts by (s, x) -> (-s, alpha(x))
};

struct ImproperResult {
  double value = 0;
  double truncation = 0;  // S where the analytic tail starts (to = +inf only)
  double tail = 0;        // n(n-1)/((-R) r'(S))
};

/// Integral of r/(r')^2 from `from` to `to` (signed; `to` may be +inf when R < 0).
[[nodiscard]] ImproperResult improper_integral_ex(const RadialSolution& sol, double from, double to,
                                                  const Tolerances& tol = {},
                                                  std::optional<double> truncation = std::nullopt);
[[nodiscard]] double improper_integral(const RadialSolution& sol, double from, double to,
                                       const Tolerances& tol = {});
[[nodiscard]] double improper_integral(const Profile& profile, double from, double to,
                                       const Tolerances& tol = {});

/// G(s) = integral_theta^s r/(r')^2 over the positive monotone branch of r'
/// containing theta: (0, s_1) when R > 0, (0, window end] otherwise.
/// Node values are tabulated once; evaluation between nodes is adaptive.
class CumulativeTable {
 public:
  CumulativeTable(std::shared_ptr<const RadialSolution> sol, double anchor, const Tolerances& tol = {});

  [[nodiscard]] double anchor() const { return anchor_; }
  [[nodiscard]] double branch_lo() const { return lo_; }
  [[nodiscard]] double branch_hi() const { return hi_; }
  [[nodiscard]] bool hi_is_root() const { return hi_is_root_; }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }

  [[nodiscard]] double value(double s) const;
  /// s in the branch with value(s) = target; OutOfRange when unreachable in the window.
  [[nodiscard]] double inverse(double target) const;

 private:
  [[nodiscard]] double piece(double a, double b) const;

  std::shared_ptr<const RadialSolution> sol_;
  Tolerances tol_;
  double anchor_, lo_, hi_;
  bool hi_is_root_ = false;
  std::vector<double> nodes_, values_;
};

enum class RootCase { TwoRoots, SinglePositive, SingleNegative, OnePerInterval };

[[nodiscard]] const char* to_string(RootCase c);

struct RootCaseReport {
  RootCase predicted = RootCase::TwoRoots;
  std::string label;  // "R=0", "(a)", "(b)", "(c)", "R>0"
  double C = 0;
  std::optional<double> C0;     // (1/(n-1)) int_theta^inf r/(r')^2, R < 0
  std::optional<double> theta;
  std::optional<Phase> phase;   // R > 0
  int lambda_at_zero_sign = 0;  // predicted sign of lambda(0)
  RootSet observed;
  bool consistent = false;
};

[[nodiscard]] RootCaseReport classify_roots(const Profile& profile, const Tolerances& tol = {});

/// (1/(n-1)) int_theta^inf r/(r')^2 for R < 0.
[[nodiscard]] double critical_C0(const RadialSolution& sol, const Tolerances& tol = {});
/// zeta in (0, theta) with int_zeta^theta = int_theta^inf (R < 0).
[[nodiscard]] double exclusion_zeta(std::shared_ptr<const RadialSolution> sol, const Tolerances& tol = {});

struct MatchResult {
  double zeta1 = 0;
  double zeta2 = 0;         // from the integral relation
  double zeta2_direct = 0;  // negative root of lambda_0 + C r' with lambda(zeta1) = 0
  double C = 0;
  double theta = 0;
  double outer_integral = 0;  // int_theta^zeta1
  double inner_integral = 0;  // int_-theta^zeta2_direct, evaluated on the negative side
  double discrepancy = 0;     // |outer - inner| / max(1, |outer|, |inner|)
};

[[nodiscard]] MatchResult match_boundary(std::shared_ptr<const RadialSolution> sol, double zeta1,
                                         const Tolerances& tol = {});
[[nodiscard]] MatchResult match_boundary(const Profile& profile, double zeta1, const Tolerances& tol = {});

struct MatchedDomain {
  std::shared_ptr<const Profile> profile;
  double zeta2 = 0, zeta1 = 0;
  FiberSpec fiber;
  std::optional<QuotientRecord> quotient;
  int boundary_components = 2;
  double radius1 = 0, radius2 = 0;        // r(zeta1), r(zeta2)
  double mean_curv1 = 0, mean_curv2 = 0;  // outward-normal mean curvatures
  double flux1 = 0, flux2 = 0;            // H * d(lambda)/d(nu) at each end
  int interior_sign = 1;                  // sign of lambda on (zeta2, zeta1)
  MatchResult match;
};

struct BuildOptions {
  double s_max = 10;
  GridOptions grid{};
};

/// Two-boundary domain [zeta2, zeta1] on an existing solution (any a).
[[nodiscard]] MatchedDomain matched_domain(std::shared_ptr<const RadialSolution> sol, double zeta1,
                                           const Tolerances& tol = {});
[[nodiscard]] MatchedDomain build_example1(const OdeParams& params, double r0, double zeta1,
                                           const BuildOptions& opt = {});
[[nodiscard]] MatchedDomain build_example2(const OdeParams& params, double r0,
                                           std::optional<FiberSpec> fiber = std::nullopt,
                                           const BuildOptions& opt = {});

struct SchwarzschildForm {
  OdeParams params;
  double horizon_radius = 0;     // root of 1 - F(r)
  double horizon_from_flow = 0;  // r where an off-horizon trajectory has r' = 0
  std::shared_ptr<const RadialSolution> solution;  // kappa0 = 1, r(0) = horizon
  std::optional<double> theta;
  std::optional<double> exclusion_zeta;  // R < 0 only
  Tolerances tol;

  /// g_rr = 1 / (1 - R r^2/(n(n-1)) - 2a r^(2-n)/(n-2)).
  [[nodiscard]] double coefficient(double r) const;
  /// s > 0 with r(s) = radius.
  [[nodiscard]] double zeta_for_radius(double radius) const;
  [[nodiscard]] MatchResult match_outer_radius(double radius) const;
};

[[nodiscard]] SchwarzschildForm schwarzschild_form(const OdeParams& params, double fiber_kappa0 = 1.0,
                                                   const BuildOptions& opt = {});

}  // namespace warpcrit
