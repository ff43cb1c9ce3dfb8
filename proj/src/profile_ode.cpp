#include "warpcrit/profile_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "warpcrit/errors.hpp"
#include "warpcrit/integrator.hpp"

namespace warpcrit {

double OdeParams::growth_rate() const { return R < 0 ? std::sqrt(-curvature()) : 0.0; }

double OdeParams::rpp(double r) const {
  return (a == 0 ? 0.0 : a * std::pow(r, 1 - n)) - curvature() * r;
}

double OdeParams::potential(double r) const {
  return curvature() * r * r + (a == 0 ? 0.0 : 2 * a / (n - 2.0) * std::pow(r, 2 - n));
}

double OdeParams::lambda_coeff(double r) const {
  return (a == 0 ? 0.0 : (n - 1.0) * a * std::pow(r, -n)) + curvature();
}

double OdeParams::lambda_pp(double r, double lam) const {
  return -lambda_coeff(r) * lam - 1.0 / (n - 1);
}

std::optional<double> OdeParams::equilibrium_radius() const {
  if (R <= 0 || a <= 0) return std::nullopt;
  return std::pow(n * (n - 1.0) * a / R, 1.0 / n);
}

void OdeParams::validate() const {
  if (n < 3) fail(ErrorKind::InvalidArgument, "dimension n must be >= 3");
  if (!std::isfinite(R) || !std::isfinite(a)) fail(ErrorKind::InvalidArgument, "R and a must be finite");
}

namespace {

// Root of F(r) = kappa0 on [lo, hi] where F - kappa0 changes sign; bisects in log r.
double solve_potential(const OdeParams& p, double kappa0, double lo, double hi) {
  auto g = [&](double logr) { return p.potential(std::exp(logr)) - kappa0; };
  return std::exp(bisect(g, std::log(lo), std::log(hi), 1e-16, 400));
}

}  // namespace

RadiusBounds radius_bounds(const OdeParams& params, double kappa0) {
  params.validate();
  if (params.a <= 0) fail(ErrorKind::InvalidArgument, "radius bounds need a > 0");
  const double c = params.curvature();
  auto above = [&](double r) { return params.potential(r) > kappa0; };

  if (c <= 0) {
    if (c == 0 && kappa0 <= 0) fail(ErrorKind::OutOfRange, "R = 0 requires kappa0 > 0");
    double lo = 1.0, hi = 1.0;
    while (!above(lo)) lo *= 0.5;
    while (above(hi)) hi *= 2.0;
    return {solve_potential(params, kappa0, lo, hi), std::nullopt};
  }

  const double r_eq = *params.equilibrium_radius();
  const double f_min = params.potential(r_eq);
  if (kappa0 < f_min) fail(ErrorKind::OutOfRange, "kappa0 below the minimum of F; no solution");
  if (kappa0 == f_min) return {r_eq, r_eq};
  double lo = r_eq, hi = r_eq;
  while (!above(lo)) lo *= 0.5;
  while (!above(hi)) hi *= 2.0;
  return {solve_potential(params, kappa0, lo, r_eq), solve_potential(params, kappa0, r_eq, hi)};
}

RadialSolution::RadialSolution(OdeParams params, double kappa0, Columns columns, bool constant,
                               std::optional<double> period)
    : params_(params), kappa0_(kappa0), cols_(std::move(columns)), constant_(constant), period_(period) {
  const auto n = cols_.grid.size();
  if (n < 2) fail(ErrorKind::InvalidArgument, "profile needs at least two samples");
  if (cols_.r.size() != n || cols_.rp.size() != n || cols_.energy_residual.size() != n)
    fail(ErrorKind::InvalidArgument, "column length mismatch");
  if (!cols_.lam0.empty() && (cols_.lam0.size() != n || cols_.lam0p.size() != n))
    fail(ErrorKind::InvalidArgument, "lambda column length mismatch");
  for (std::size_t i = 1; i < n; ++i)
    if (!(cols_.grid[i] > cols_.grid[i - 1])) fail(ErrorKind::InvalidArgument, "grid must be strictly increasing");

  if (has_lambda0()) {
    const auto& g = cols_.grid;
    const auto& v = cols_.lam0;
    auto i = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), 0.0) - g.begin());
    for (; i + 1 < n; ++i) {
      if (g[i] > 0 && v[i] == 0) {
        theta_ = g[i];
        break;
      }
      if (v[i + 1] == 0) {
        theta_ = g[i + 1];
        break;
      }
      if (v[i] != 0 && (v[i] < 0) != (v[i + 1] < 0)) {
        theta_ = bisect([&](double s) { return lam0_at(s); }, g[i], g[i + 1], 1e-12);
        break;
      }
    }
  }
}

std::optional<Phase> RadialSolution::phase() const {
  if (params_.R <= 0 || constant_) return std::nullopt;
  const double s0 = std::clamp(0.0, front(), back());
  return params_.rpp(r_at(s0)) > 0 ? Phase::Min : Phase::Max;
}

std::size_t RadialSolution::locate(double s) const {
  const auto& g = cols_.grid;
  if (!(s >= g.front() && s <= g.back())) fail(ErrorKind::OutOfGrid, "s outside the profile window");
  auto it = std::upper_bound(g.begin(), g.end(), s);
  std::size_t i = it == g.begin() ? 0 : static_cast<std::size_t>(it - g.begin()) - 1;
  return std::min(i, g.size() - 2);
}

double RadialSolution::r_at(double s) const {
  const auto i = locate(s);
  const auto& c = cols_;
  return hermite(c.grid[i], c.grid[i + 1], c.r[i], c.r[i + 1], c.rp[i], c.rp[i + 1], s);
}

double RadialSolution::rp_at(double s) const {
  const auto i = locate(s);
  const auto& c = cols_;
  return hermite(c.grid[i], c.grid[i + 1], c.rp[i], c.rp[i + 1], params_.rpp(c.r[i]), params_.rpp(c.r[i + 1]), s);
}

double RadialSolution::lam0_at(double s) const {
  if (!has_lambda0()) fail(ErrorKind::DegenerateInitial, "lambda_0 unavailable for this solution");
  const auto i = locate(s);
  const auto& c = cols_;
  return hermite(c.grid[i], c.grid[i + 1], c.lam0[i], c.lam0[i + 1], c.lam0p[i], c.lam0p[i + 1], s);
}

double RadialSolution::lam0p_at(double s) const {
  if (!has_lambda0()) fail(ErrorKind::DegenerateInitial, "lambda_0 unavailable for this solution");
  const auto i = locate(s);
  const auto& c = cols_;
  return hermite(c.grid[i], c.grid[i + 1], c.lam0p[i], c.lam0p[i + 1], params_.lambda_pp(c.r[i], c.lam0[i]),
                 params_.lambda_pp(c.r[i + 1], c.lam0[i + 1]), s);
}

Profile::Profile(std::shared_ptr<const RadialSolution> base, double C) : base_(std::move(base)), C_(C) {
  if (!base_) fail(ErrorKind::InvalidArgument, "null radial solution");
  if (!base_->has_lambda0()) fail(ErrorKind::DegenerateInitial, "r''(0) vanishes; lambda_0 is undefined");
  const auto n = base_->size();
  lam_.resize(n);
  lamp_.resize(n);
  const auto& p = base_->params();
  for (std::size_t i = 0; i < n; ++i) {
    lam_[i] = base_->lam0()[i] + C * base_->rp()[i];
    lamp_[i] = base_->lam0p()[i] + C * p.rpp(base_->r()[i]);
  }
}

Profile::Profile(std::shared_ptr<const RadialSolution> base, double C, std::vector<double> lam,
                 std::vector<double> lamp)
    : base_(std::move(base)), C_(C), lam_(std::move(lam)), lamp_(std::move(lamp)) {
  if (!base_) fail(ErrorKind::InvalidArgument, "null radial solution");
  if (lam_.size() != base_->size() || lamp_.size() != base_->size())
    fail(ErrorKind::InvalidArgument, "lambda column length mismatch");
}

ProfilePoint Profile::node(std::size_t i) const {
  const auto& p = params();
  const double r = base_->r()[i];
  return {base_->grid()[i], r, base_->rp()[i], p.rpp(r), lam_[i], lamp_[i], p.lambda_pp(r, lam_[i])};
}

double Profile::lam_at(double s) const {
  const auto i = base_->locate(s);
  const auto g = grid();
  return hermite(g[i], g[i + 1], lam_[i], lam_[i + 1], lamp_[i], lamp_[i + 1], s);
}

ProfilePoint Profile::at(double s) const {
  const auto i = base_->locate(s);
  const auto g = grid();
  const auto& p = params();
  ProfilePoint pt{};
  pt.s = s;
  pt.r = base_->r_at(s);
  pt.rp = base_->rp_at(s);
  pt.rpp = p.rpp(pt.r);
  pt.lam = hermite(g[i], g[i + 1], lam_[i], lam_[i + 1], lamp_[i], lamp_[i + 1], s);
  pt.lamp = hermite(g[i], g[i + 1], lamp_[i], lamp_[i + 1], p.lambda_pp(r()[i], lam_[i]),
                    p.lambda_pp(r()[i + 1], lam_[i + 1]), s);
  pt.lampp = p.lambda_pp(pt.r, pt.lam);
  return pt;
}

double Profile::max_abs_lambda() const {
  double m = 0;
  for (double v : lam_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

constexpr std::size_t kState = 5;  // r, r', lambda_0, lambda_0', u = r' - m r
using State = std::array<double, kState>;

struct RadialRhs {
  OdeParams p;
  bool with_lambda;
  bool with_u;

  void operator()(double, const State& y, State& dy) const {
    const double r = y[0];
    const double r1n = p.a == 0 ? 0.0 : p.a * std::pow(r, 1 - p.n);
    dy[0] = y[1];
    dy[1] = r1n - p.curvature() * r;
    if (with_lambda) {
      dy[2] = y[3];
      // a = 0 drops the r^-n term, which keeps a ball centre (r = 0) finite
      const double pull = p.a == 0 ? 0.0 : r1n * (p.n - 1.0) / r;
      dy[3] = -(pull + p.curvature()) * y[2] - 1.0 / (p.n - 1);
    } else {
      dy[2] = dy[3] = 0;
    }
    dy[4] = with_u ? -p.growth_rate() * y[4] + r1n : 0.0;
  }
};

std::size_t node_count(double s_max, double step) {
  if (!(s_max > 0) || !(step > 0)) fail(ErrorKind::InvalidArgument, "s_max and step must be positive");
  return static_cast<std::size_t>(std::ceil(s_max / step - 1e-9));
}

IntegratorOptions integrator_options(const Tolerances& tol) {
  IntegratorOptions io;
  io.rtol = tol.rtol;
  io.atol = tol.atol;
  return io;
}

}  // namespace

std::pair<double, double> first_positive_rp_roots(const OdeParams& params, double r0, const GridOptions& opt) {
  params.validate();
  if (params.R <= 0) fail(ErrorKind::InvalidRegime, "periodic solutions need R > 0");
  const double h = opt.step;
  RadialRhs rhs{params, false, false};
  State y0{r0, 0, 0, 0, 0};
  const double sign0 = params.rpp(r0) >= 0 ? 1.0 : -1.0;

  std::vector<double> roots;
  double s_prev = 0, r_prev = r0, rp_prev = 0;
  const double floor = opt.tol.positivity_floor * r0;
  constexpr std::size_t kMaxNodes = 100'000'000;
  integrate_nodes<kState>(
      rhs, 0.0, y0, h, kMaxNodes, integrator_options(opt.tol),
      [&](std::size_t k, double s, const State& y) {
        if (y[0] < floor) fail(ErrorKind::NonPositiveR, "r reached the positivity floor");
        const double expected = roots.size() % 2 == 0 ? sign0 : -sign0;
        if (k > 1 && y[1] * expected <= 0) {
          const double s0 = s_prev, s1 = s, ra = r_prev, rb = y[0], pa = rp_prev, pb = y[1];
          auto rp_at = [&](double x) { return hermite(s0, s1, pa, pb, params.rpp(ra), params.rpp(rb), x); };
          roots.push_back(y[1] == 0 ? s : bisect(rp_at, s0, s1, opt.tol.root));
        }
        s_prev = s;
        r_prev = y[0];
        rp_prev = y[1];
        return roots.size() < 2;
      });
  if (roots.size() < 2) fail(ErrorKind::StepFailure, "no oscillation detected");
  return {roots[0], roots[1]};
}

std::shared_ptr<const RadialSolution> integrate_r(const OdeParams& params, double r0, double s_max,
                                                  const GridOptions& opt) {
  params.validate();
  if (!(r0 > 0)) fail(ErrorKind::InvalidArgument, "r0 must be positive");
  const auto count = node_count(s_max, opt.step);
  const double h = s_max / static_cast<double>(count);
  const auto& tol = opt.tol;

  const double rpp0 = params.rpp(r0);
  const bool with_lambda = std::abs(rpp0) > tol.degenerate;
  const bool with_u = params.R < 0;
  const double m = params.growth_rate();
  const double kappa0 = params.potential(r0);
  const double d = params.a == 0 ? 0.0 : 2 * params.a / (params.n - 2.0);

  auto energy = [&](const State& y) {
    if (with_u) {
      const double u = y[4];
      return u * (u + 2 * m * y[0]) + d * std::pow(y[0], 2 - params.n) - kappa0;
    }
    return params.first_integral(y[0], y[1]) - kappa0;
  };

  RadialSolution::Columns cols;
  const std::size_t total = 2 * count + 1;
  cols.grid.resize(total);
  cols.r.resize(total);
  cols.rp.resize(total);
  cols.energy_residual.resize(total);
  if (with_lambda) {
    cols.lam0.resize(total);
    cols.lam0p.resize(total);
  }
  auto store = [&](std::size_t k, const State& y) {
    const std::size_t up = count + k, down = count - k;
    cols.grid[up] = h * static_cast<double>(k);
    cols.grid[down] = -cols.grid[up];
    cols.r[up] = cols.r[down] = y[0];
    cols.rp[up] = y[1];
    cols.rp[down] = k == 0 ? y[1] : -y[1];
    cols.energy_residual[up] = cols.energy_residual[down] = energy(y);
    if (with_lambda) {
      cols.lam0[up] = cols.lam0[down] = y[2];
      cols.lam0p[up] = y[3];
      cols.lam0p[down] = k == 0 ? y[3] : -y[3];
    }
  };

  const State y0{r0, 0.0, with_lambda ? r0 / ((params.n - 1.0) * rpp0) : 0.0, 0.0, -m * r0};
  store(0, y0);
  const double floor = tol.positivity_floor * r0;
  State last = y0;
  try {
    integrate_nodes<kState>(RadialRhs{params, with_lambda, with_u}, 0.0, y0, h, count,
                            integrator_options(tol), [&](std::size_t k, double, const State& y) {
                              if (!(y[0] >= floor))
                                fail(ErrorKind::NonPositiveR, "r reached the positivity floor");
                              store(k, y);
                              last = y;
                              return true;
                            });
  } catch (const Error& e) {
    // With a <= 0 nothing stops r from collapsing, and the a r^(1-n) force
    // blows up on the way down; the step size gives out before the floor test.
    if (e.kind() == ErrorKind::StepFailure && params.a <= 0 && last[1] < 0)
      fail(ErrorKind::NonPositiveR, "r collapses to zero inside the window");
    throw;
  }
  cols.grid[count] = 0.0;

  bool constant = true;
  for (std::size_t i = 0; i < total && constant; ++i)
    constant = std::abs(cols.rp[i]) < tol.constant_detect && std::abs(params.rpp(cols.r[i])) < tol.constant_detect;

  std::optional<double> period;
  if (params.R > 0 && params.a > 0 && !constant) period = first_positive_rp_roots(params, r0, opt).second;

  return std::make_shared<const RadialSolution>(params, kappa0, std::move(cols), constant, period);
}

std::shared_ptr<const RadialSolution> integrate_r_from_kappa(const OdeParams& params, double kappa0,
                                                             double s_max, Phase phase, const GridOptions& opt) {
  const auto bounds = radius_bounds(params, kappa0);
  const double r0 = (phase == Phase::Max && bounds.upper) ? *bounds.upper : bounds.lower;
  return integrate_r(params, r0, s_max, opt);
}

Profile solve_lambda(std::shared_ptr<const RadialSolution> base, double C) { return Profile(std::move(base), C); }

RootSet find_roots(const Profile& profile, double width) {
  RootSet out;
  const auto& base = profile.base();
  out.constant_solution = base.constant_solution();
  const auto g = profile.grid();

  auto scan = [&](std::span<const double> v, auto&& eval, std::vector<double>& roots) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == 0) {
        roots.push_back(g[i]);
        continue;
      }
      if (i + 1 < v.size() && v[i + 1] != 0 && (v[i] < 0) != (v[i + 1] < 0))
        roots.push_back(bisect(eval, g[i], g[i + 1], width));
    }
  };

  if (!out.constant_solution) {
    scan(profile.rp(), [&](double s) { return base.rp_at(s); }, out.rp_roots);
    for (double s : out.rp_roots) {
      const double curv = profile.params().rpp(base.r_at(s));
      out.rp_kinds.push_back(profile.params().R > 0 ? (curv > 0 ? RootKind::Min : RootKind::Max)
                                                    : (curv > 0 ? RootKind::Min : RootKind::Plain));
    }
  }
  scan(profile.lam(), [&](double s) { return profile.lam_at(s); }, out.lam_roots);
  return out;
}

namespace {

struct SpaceForm {
  double r, rp, lam, lamp;
};

SpaceForm space_form_at(int n, int kappa, double lambda_p, double s) {
  const double k = 1.0 / (n - 1);
  switch (kappa) {
    case 0:
      return {s, 1.0, -s * s / (2.0 * (n - 1)) + lambda_p, -s / (n - 1.0)};
    case 1:
      return {std::sin(s), std::cos(s), (lambda_p + k) * std::cos(s) - k, -(lambda_p + k) * std::sin(s)};
    default:
      return {std::sinh(s), std::cosh(s), (lambda_p - k) * std::cosh(s) + k, (lambda_p - k) * std::sinh(s)};
  }
}

void check_ball(int n, int kappa, double s_max) {
  if (n < 3) fail(ErrorKind::InvalidArgument, "dimension n must be >= 3");
  if (kappa < -1 || kappa > 1) fail(ErrorKind::InvalidArgument, "kappa must be -1, 0 or 1");
  if (kappa == 1 && s_max >= std::numbers::pi) fail(ErrorKind::RangeError, "kappa = 1 needs s_max < pi");
}

Profile ball_profile(int n, int kappa, double s_max, std::vector<double> grid, std::vector<double> r,
                     std::vector<double> rp, std::vector<double> lam, std::vector<double> lamp) {
  OdeParams params{n, n * (n - 1.0) * kappa, 0.0};
  RadialSolution::Columns cols;
  cols.energy_residual.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) cols.energy_residual[i] = params.first_integral(r[i], rp[i]) - 1.0;
  cols.grid = std::move(grid);
  cols.r = std::move(r);
  cols.rp = std::move(rp);
  cols.lam0 = lam;
  cols.lam0p = lamp;
  (void)s_max;
  auto base = std::make_shared<const RadialSolution>(params, 1.0, std::move(cols), false, std::nullopt);
  return Profile(std::move(base), 0.0, std::move(lam), std::move(lamp));
}

}  // namespace

Profile space_form_profile(int n, int kappa, double lambda_p, double s_max, double step) {
  check_ball(n, kappa, s_max);
  const auto count = node_count(s_max, step);
  const double h = s_max / static_cast<double>(count);
  std::vector<double> grid(count + 1), r(count + 1), rp(count + 1), lam(count + 1), lamp(count + 1);
  for (std::size_t k = 0; k <= count; ++k) {
    grid[k] = h * static_cast<double>(k);
    const auto v = space_form_at(n, kappa, lambda_p, grid[k]);
    r[k] = v.r;
    rp[k] = v.rp;
    lam[k] = v.lam;
    lamp[k] = v.lamp;
  }
  return ball_profile(n, kappa, s_max, std::move(grid), std::move(r), std::move(rp), std::move(lam), std::move(lamp));
}

Profile integrate_geodesic_ball(int n, int kappa, double lambda_p, double s_max, const GridOptions& opt) {
  check_ball(n, kappa, s_max);
  const auto count = node_count(s_max, opt.step);
  const double h = s_max / static_cast<double>(count);
  const OdeParams params{n, n * (n - 1.0) * kappa, 0.0};
  std::vector<double> grid(count + 1), r(count + 1), rp(count + 1), lam(count + 1), lamp(count + 1);
  auto store = [&](std::size_t k, double s, const State& y) {
    grid[k] = s;
    r[k] = y[0];
    rp[k] = y[1];
    lam[k] = y[2];
    lamp[k] = y[3];
  };
  const State y0{0.0, 1.0, lambda_p, 0.0, 0.0};
  store(0, 0.0, y0);
  integrate_nodes<kState>(RadialRhs{params, true, false}, 0.0, y0, h, count, integrator_options(opt.tol),
                          [&](std::size_t k, double s, const State& y) {
                            store(k, s, y);
                            return true;
                          });
  return ball_profile(n, kappa, s_max, std::move(grid), std::move(r), std::move(rp), std::move(lam), std::move(lamp));
}

Profile warped_hyperbolic_profile(int n, double A, double s_max, double step) {
  if (n < 3) fail(ErrorKind::InvalidArgument, "dimension n must be >= 3");
  const auto count = node_count(s_max, step);
  const double h = s_max / static_cast<double>(count);
  const OdeParams params{n, -n * (n - 1.0), 0.0};
  RadialSolution::Columns cols;
  const std::size_t total = 2 * count + 1;
  for (auto* v : {&cols.grid, &cols.r, &cols.rp, &cols.lam0, &cols.lam0p, &cols.energy_residual}) v->resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    const double s = h * (static_cast<double>(i) - static_cast<double>(count));
    cols.grid[i] = s;
    cols.r[i] = std::cosh(s);
    cols.rp[i] = std::sinh(s);
    cols.lam0[i] = 1.0 / (n - 1);
    cols.lam0p[i] = 0.0;
    cols.energy_residual[i] = params.first_integral(cols.r[i], cols.rp[i]) + 1.0;
  }
  auto base = std::make_shared<const RadialSolution>(params, -1.0, std::move(cols), false, std::nullopt);
  return Profile(std::move(base), A);
}

}  // namespace warpcrit
