#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "warpcrit/profile_ode.hpp"

namespace warpcrit {

enum class SpectralSign { Positive, Zero, Negative };

[[nodiscard]] const char* to_string(SpectralSign s);

/// Which zeroth-order coefficient multiplies phi next to (n-1) Delta.
enum class Convention { FullR, ROverNMinus1 };

[[nodiscard]] const char* to_string(Convention c);

/// Smallest eigenvalue of the symmetric tridiagonal discretization on one grid.
struct DiscreteEigen {
  double gamma = 0;
  double h = 0;
  double rayleigh = 0;   // psi^T T psi / psi^T psi for the computed eigenvector
  double matrix_norm = 0;
  std::vector<double> s;    // nodes including both Dirichlet ends
  std::vector<double> phi;  // ground state, max |phi| = 1 and positive inside
};

[[nodiscard]] DiscreteEigen discrete_first_eigen(const Profile& profile, double b1, double b2, std::size_t cells,
                                                 Convention conv = Convention::FullR, bool with_vector = true);

struct SpectralResult {
  double gamma1 = 0;       // Richardson estimate, operator -[(n-1) Delta + R]
  double error_bound = 0;  // |R2 - R1| plus a round-off floor
  SpectralSign sign = SpectralSign::Zero;
  double h = 0;                 // coarsest step; refinements use h/2 and h/4
  std::array<double, 3> levels{};  // raw eigenvalues at h, h/2, h/4
  double observed_order = 0;       // log2 of successive difference ratio
  double rayleigh = 0;             // finest-grid Rayleigh quotient
  double gamma1_literal = 0;       // same with zeroth-order term R/(n-1)
  double literal_error_bound = 0;
  SpectralSign literal_sign = SpectralSign::Zero;
  std::string convention = "(n-1)Delta+R";
  double b1 = 0, b2 = 0;
  std::vector<double> eigen_s, eigen_phi;  // finest-grid ground state
};

struct SpectralOptions {
  std::size_t cells = 200;  // on the coarsest grid
};

/// Dirichlet problem on [b1, b2] for the radial (fiber-constant) reduction.
/// Throws GridTooCoarse when the two finest levels disagree in sign beyond the bound.
[[nodiscard]] SpectralResult first_dirichlet_eigenvalue(const Profile& profile, double b1, double b2,
                                                        const SpectralOptions& opt = {});

/// gamma int lambda phi w / (n int phi w), extrapolated over refinements; exact value 1.
struct IdentityCheck {
  double ratio = 0;
  double relative_error = 0;
  std::vector<double> levels;
};

[[nodiscard]] IdentityCheck green_identity(const Profile& profile, double b1, double b2,
                                           std::size_t cells = 800, std::size_t refinements = 3);

struct Prop36Report {
  Phase phase = Phase::Min;
  double s1 = 0, theta = 0, zeta1 = 0, zeta2 = 0, C = 0;
  SpectralResult zero_mode;      // [0, s1]
  SpectralResult enlarged;       // an interval strictly containing [0, s1]
  SpectralResult matched;        // [zeta2, zeta1] for the requested C
  SpectralResult quotient;       // [-theta, theta], C = 0
  double eigenvector_deviation = 0;  // ground state of [0, s1] vs r'
  IdentityCheck identity;            // on the matched domain
  SpectralSign expected_matched = SpectralSign::Positive;
  bool zero_ok = false, enlarged_ok = false, matched_ok = false, quotient_ok = false, identity_ok = false;
  [[nodiscard]] bool all_ok() const { return zero_ok && enlarged_ok && matched_ok && quotient_ok && identity_ok; }
};

[[nodiscard]] Prop36Report verify_prop36(const OdeParams& params, double r0, double C,
                                         const SpectralOptions& opt = {}, const GridOptions& grid = {});

/// max | phi/|phi|_inf - r'/|r'|_inf | over the eigenvector nodes.
[[nodiscard]] double deviation_from_rp(const Profile& profile, const std::vector<double>& s,
                                       const std::vector<double>& phi);

}  // namespace warpcrit
