#include "warpcrit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "warpcrit/errors.hpp"

namespace warpcrit {

const char* to_string(SpectralSign s) {
  switch (s) {
    case SpectralSign::Positive:
      return "POSITIVE";
    case SpectralSign::Zero:
      return "ZERO";
    case SpectralSign::Negative:
      return "NEGATIVE";
  }
  return "UNKNOWN";
}

const char* to_string(Convention c) { return c == Convention::FullR ? "(n-1)Delta+R" : "(n-1)Delta+R/(n-1)"; }

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Tridiagonal {
  std::vector<double> d, e;  // e[i] couples i and i+1
  double norm = 0;           // Gershgorin radius bound
};

// Number of eigenvalues strictly below x (Sturm sequence via LDL^T pivots).
std::size_t sturm_count(const Tridiagonal& t, double x) {
  const double tiny = kEps * std::max(t.norm, 1.0) * 1e-3;
  std::size_t count = 0;
  double q = 1;
  for (std::size_t i = 0; i < t.d.size(); ++i) {
    const double off = i == 0 ? 0.0 : t.e[i - 1] * t.e[i - 1] / q;
    q = t.d[i] - x - off;
    if (q == 0) q = -tiny;
    if (q < 0) ++count;
  }
  return count;
}

double smallest_eigenvalue(const Tridiagonal& t) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < t.d.size(); ++i) {
    double rad = 0;
    if (i > 0) rad += std::abs(t.e[i - 1]);
    if (i + 1 < t.d.size()) rad += std::abs(t.e[i]);
    lo = std::min(lo, t.d[i] - rad);
    hi = std::max(hi, t.d[i] + rad);
  }
  lo -= 1;  // strict lower bound, count(lo) = 0
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(t, mid) >= 1) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Inverse iteration with the Thomas algorithm; the shifted matrix is nearly
// singular by design, so zero pivots are nudged rather than rejected.
std::vector<double> ground_vector(const Tridiagonal& t, double shift) {
  const std::size_t n = t.d.size();
  const double tiny = kEps * std::max(t.norm, 1.0);
  std::vector<double> x(n, 1.0), c(n), g(n);
  for (int it = 0; it < 4; ++it) {
    double pivot = t.d[0] - shift;
    if (std::abs(pivot) < tiny) pivot = tiny;
    c[0] = n > 1 ? t.e[0] / pivot : 0.0;
    g[0] = x[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
      pivot = t.d[i] - shift - t.e[i - 1] * c[i - 1];
      if (std::abs(pivot) < tiny) pivot = tiny;
      c[i] = i + 1 < n ? t.e[i] / pivot : 0.0;
      g[i] = (x[i] - t.e[i - 1] * g[i - 1]) / pivot;
    }
    x[n - 1] = g[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = g[i] - c[i] * x[i + 1];
    double norm = 0;
    for (double v : x) norm = std::max(norm, std::abs(v));
    for (double& v : x) v /= norm;
  }
  return x;
}

double rayleigh_quotient(const Tridiagonal& t, const std::vector<double>& x) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double tx = t.d[i] * x[i];
    if (i > 0) tx += t.e[i - 1] * x[i - 1];
    if (i + 1 < x.size()) tx += t.e[i] * x[i + 1];
    num += x[i] * tx;
    den += x[i] * x[i];
  }
  return num / den;
}

SpectralSign verdict(double gamma, double bound) {
  if (std::abs(gamma) <= bound) return SpectralSign::Zero;
  return gamma > 0 ? SpectralSign::Positive : SpectralSign::Negative;
}

void check_interval(const Profile& profile, double b1, double b2) {
  if (!(b1 < b2)) fail(ErrorKind::InvalidArgument, "interval must satisfy b1 < b2");
  if (b1 < profile.grid().front() || b2 > profile.grid().back())
    fail(ErrorKind::OutOfGrid, "interval outside the profile window");
}

}  // namespace

DiscreteEigen discrete_first_eigen(const Profile& profile, double b1, double b2, std::size_t cells, Convention conv,
                                   bool with_vector) {
  check_interval(profile, b1, b2);
  if (cells < 3) fail(ErrorKind::InvalidArgument, "need at least three cells");
  const auto& p = profile.params();
  const auto& base = profile.base();
  const double n = p.n;
  const double h = (b2 - b1) / static_cast<double>(cells);
  auto node = [&](std::size_t i) { return i == cells ? b2 : b1 + h * static_cast<double>(i); };
  auto weight = [&](double s) {
    const double r = base.r_at(s);
    if (!(r > 0)) fail(ErrorKind::InvalidArgument, "r must be positive on the interval");
    return std::pow(r, n - 1);
  };

  const std::size_t m = cells - 1;
  std::vector<double> w(m), half(cells);
  for (std::size_t j = 0; j < cells; ++j) half[j] = weight(b1 + h * (static_cast<double>(j) + 0.5));
  for (std::size_t i = 0; i < m; ++i) w[i] = weight(node(i + 1));

  const double zeroth = conv == Convention::FullR ? p.R : p.R / (n - 1);
  Tridiagonal t;
  t.d.resize(m);
  t.e.resize(m > 0 ? m - 1 : 0);
  const double k = (n - 1) / (h * h);
  for (std::size_t i = 0; i < m; ++i) t.d[i] = k * (half[i] + half[i + 1]) / w[i] - zeroth;
  for (std::size_t i = 0; i + 1 < m; ++i) t.e[i] = -k * half[i + 1] / std::sqrt(w[i] * w[i + 1]);
  for (std::size_t i = 0; i < m; ++i) {
    double row = std::abs(t.d[i]);
    if (i > 0) row += std::abs(t.e[i - 1]);
    if (i + 1 < m) row += std::abs(t.e[i]);
    t.norm = std::max(t.norm, row);
  }

  DiscreteEigen out;
  out.h = h;
  out.matrix_norm = t.norm;
  out.gamma = smallest_eigenvalue(t);
  out.rayleigh = out.gamma;
  if (with_vector) {
    auto psi = ground_vector(t, out.gamma);
    out.rayleigh = rayleigh_quotient(t, psi);
    out.s.resize(cells + 1);
    out.phi.assign(cells + 1, 0.0);
    for (std::size_t i = 0; i <= cells; ++i) out.s[i] = node(i);
    double peak = 0;
    for (std::size_t i = 0; i < m; ++i) {
      out.phi[i + 1] = psi[i] / std::sqrt(w[i]);
      if (std::abs(out.phi[i + 1]) > std::abs(peak)) peak = out.phi[i + 1];
    }
    for (double& v : out.phi) v /= peak;
  }
  return out;
}

SpectralResult first_dirichlet_eigenvalue(const Profile& profile, double b1, double b2, const SpectralOptions& opt) {
  SpectralResult res;
  res.b1 = b1;
  res.b2 = b2;
  res.convention = to_string(Convention::FullR);

  auto extrapolate = [&](Convention conv, std::array<double, 3>& lv, double& gamma, double& bound,
                         DiscreteEigen* finest) {
    double norm = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      const bool last = k == 2;
      auto e = discrete_first_eigen(profile, b1, b2, opt.cells << k, conv, last && finest != nullptr);
      lv[k] = e.gamma;
      norm = e.matrix_norm;
      if (last && finest) *finest = std::move(e);
    }
    const double r1 = (4 * lv[1] - lv[0]) / 3;
    const double r2 = (4 * lv[2] - lv[1]) / 3;
    gamma = r2;
    bound = std::abs(r2 - r1) + 10 * kEps * (norm + std::abs(r2));
  };

  DiscreteEigen finest;
  extrapolate(Convention::FullR, res.levels, res.gamma1, res.error_bound, &finest);
  res.h = (b2 - b1) / static_cast<double>(opt.cells);
  res.sign = verdict(res.gamma1, res.error_bound);
  res.rayleigh = finest.rayleigh;
  res.eigen_s = std::move(finest.s);
  res.eigen_phi = std::move(finest.phi);
  const double d1 = res.levels[0] - res.levels[1], d2 = res.levels[1] - res.levels[2];
  res.observed_order = d2 != 0 ? std::log2(std::abs(d1 / d2)) : std::numeric_limits<double>::infinity();

  const double a = res.levels[1], b = res.levels[2];
  if ((a > 0) != (b > 0) && std::min(std::abs(a), std::abs(b)) > res.error_bound)
    fail(ErrorKind::GridTooCoarse, "the two finest grids disagree in sign");

  std::array<double, 3> lit{};
  extrapolate(Convention::ROverNMinus1, lit, res.gamma1_literal, res.literal_error_bound, nullptr);
  res.literal_sign = verdict(res.gamma1_literal, res.literal_error_bound);
  return res;
}

IdentityCheck green_identity(const Profile& profile, double b1, double b2, std::size_t cells,
                             std::size_t refinements) {
  if (refinements < 2) fail(ErrorKind::InvalidArgument, "need at least two refinements");
  const auto& base = profile.base();
  const double n = profile.params().n;
  IdentityCheck out;
  for (std::size_t k = 0; k < refinements; ++k) {
    const auto e = discrete_first_eigen(profile, b1, b2, cells << k);
    double lam_phi = 0, phi_sum = 0;
    for (std::size_t i = 1; i + 1 < e.s.size(); ++i) {
      const double w = std::pow(base.r_at(e.s[i]), n - 1);
      lam_phi += profile.lam_at(e.s[i]) * e.phi[i] * w;
      phi_sum += e.phi[i] * w;
    }
    out.levels.push_back(e.gamma * lam_phi / (n * phi_sum));
  }
  const auto& lv = out.levels;
  out.ratio = (4 * lv.back() - lv[lv.size() - 2]) / 3;
  out.relative_error = std::abs(out.ratio - 1);
  return out;
}

double deviation_from_rp(const Profile& profile, const std::vector<double>& s, const std::vector<double>& phi) {
  const auto& base = profile.base();
  std::vector<double> rp(s.size());
  double rp_max = 0, phi_max = 0, dot = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    rp[i] = base.rp_at(s[i]);
    rp_max = std::max(rp_max, std::abs(rp[i]));
    phi_max = std::max(phi_max, std::abs(phi[i]));
    dot += rp[i] * phi[i];
  }
  const double sgn = dot < 0 ? -1.0 : 1.0;
  double dev = 0;
  for (std::size_t i = 0; i < s.size(); ++i) dev = std::max(dev, std::abs(sgn * phi[i] / phi_max - rp[i] / rp_max));
  return dev;
}

Prop36Report verify_prop36(const OdeParams& params, double r0, double C, const SpectralOptions& opt,
                           const GridOptions& grid) {
  params.validate();
  if (!(params.R > 0)) fail(ErrorKind::InvalidRegime, "sign predictions need R > 0");
  if (!(params.a > 0)) fail(ErrorKind::InvalidArgument, "sign predictions need a > 0");
  if (std::abs(r0 - *params.equilibrium_radius()) <= grid.tol.constant_detect * r0)
    fail(ErrorKind::InvalidArgument, "r0 is the constant solution");

  Prop36Report rep;
  rep.C = C;
  const auto [s1, s2] = first_positive_rp_roots(params, r0, grid);
  (void)s2;
  rep.s1 = s1;
  auto sol = integrate_r(params, r0, 1.25 * s1 + 10 * grid.step, grid);
  rep.phase = *sol->phase();
  if (!sol->theta() || *sol->theta() >= s1) fail(ErrorKind::OutOfRange, "no root of lambda_0 in (0, s1)");
  rep.theta = *sol->theta();

  const Profile even(sol, 0.0);
  const Profile shifted(sol, C);

  rep.zero_mode = first_dirichlet_eigenvalue(even, 0.0, s1, opt);
  rep.eigenvector_deviation = deviation_from_rp(even, rep.zero_mode.eigen_s, rep.zero_mode.eigen_phi);
  rep.enlarged = first_dirichlet_eigenvalue(even, -0.1 * s1, 1.1 * s1, opt);
  rep.quotient = first_dirichlet_eigenvalue(even, -rep.theta, rep.theta, opt);

  const auto roots = find_roots(shifted, grid.tol.root).lam_roots;
  std::optional<double> z1, z2;
  for (double s : roots) {
    if (s > 0 && s < s1 && !z1) z1 = s;
    if (s < 0 && s > -s1) z2 = s;
  }
  if (!z1 || !z2) fail(ErrorKind::OutOfRange, "lambda has no root pair around 0");
  rep.zeta1 = *z1;
  rep.zeta2 = *z2;
  rep.matched = first_dirichlet_eigenvalue(shifted, rep.zeta2, rep.zeta1, opt);
  rep.identity = green_identity(shifted, rep.zeta2, rep.zeta1, 4 * opt.cells, 3);

  rep.expected_matched = rep.phase == Phase::Min ? SpectralSign::Positive : SpectralSign::Negative;
  auto clear = [](const SpectralResult& r) { return std::abs(r.gamma1) > 3 * r.error_bound; };
  rep.zero_ok = rep.zero_mode.sign == SpectralSign::Zero && rep.eigenvector_deviation <= 1e-4;
  rep.enlarged_ok = rep.enlarged.sign == SpectralSign::Negative;
  rep.matched_ok = rep.matched.sign == rep.expected_matched && clear(rep.matched);
  rep.quotient_ok = rep.quotient.sign == rep.expected_matched && clear(rep.quotient);
  rep.identity_ok = rep.identity.relative_error <= 1e-6;
  return rep;
}

}  // namespace warpcrit
