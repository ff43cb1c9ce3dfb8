#include "warpcrit/boundary_match.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "warpcrit/errors.hpp"
#include "warpcrit/integrator.hpp"

namespace warpcrit {

namespace {

double integrand(const RadialSolution& sol, double s) {
  const double rp = sol.rp_at(s);
  return sol.r_at(s) / (rp * rp);
}

// Gauss-Kronrod on [a, b], a < b, one panel per grid cell: the dense output
// is a smooth cubic inside each cell but only C1 across nodes.
double quad(const RadialSolution& sol, double a, double b, double rel_tol) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  auto f = [&](double s) { return integrand(sol, s); };
  const auto g = sol.grid();
  std::size_t i = sol.locate(a);
  double total = 0;
  double x0 = a;
  while (x0 < b) {
    const double x1 = std::min(b, g[i + 1]);
    if (x1 > x0) total += GK::integrate(f, x0, x1, 6, rel_tol);
    x0 = x1;
    if (++i + 1 >= g.size()) break;
  }
  return total;
}

int sign_of(double v) { return (v > 0) - (v < 0); }

// Checks that r' keeps a strict sign on [a, b].
void require_monotone(const RadialSolution& sol, double a, double b) {
  const int sa = sign_of(sol.rp_at(a));
  const int sb = sign_of(sol.rp_at(b));
  if (sa == 0 || sb == 0 || sa != sb) fail(ErrorKind::SingularEndpoint, "a root of r' lies in the integration range");
  const auto g = sol.grid();
  const auto rp = sol.rp();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] > a && g[i] < b && sign_of(rp[i]) != sa)
      fail(ErrorKind::SingularEndpoint, "a root of r' lies in the integration range");
}

// First positive root of r' stored in the window, if any.
std::optional<double> first_positive_rp_root(const RadialSolution& sol, double width) {
  const auto g = sol.grid();
  const auto rp = sol.rp();
  auto i = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), 0.0) - g.begin());
  if (i < g.size() && g[i] == 0) ++i;
  const int s0 = i < g.size() ? sign_of(rp[i]) : 0;
  for (; i + 1 < g.size(); ++i) {
    if (rp[i + 1] == 0) return g[i + 1];
    if (sign_of(rp[i + 1]) != s0) return bisect([&](double s) { return sol.rp_at(s); }, g[i], g[i + 1], width);
  }
  return std::nullopt;
}

// Bisection for an increasing function that may be unbounded at one end.
template <class F>
double bisect_increasing(F&& f, double lo, double hi, double target, double width) {
  for (int it = 0; it < 200 && hi - lo > width; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FiberSpec FiberSpec::for_solution(const RadialSolution& sol) {
  return {sol.params().n - 1, sol.kappa0(), sol.kappa0() > 0};
}

void FiberSpec::validate(const OdeParams& params) const {
  if (dim != params.n - 1) fail(ErrorKind::InvalidArgument, "fiber dimension must be n-1");
  if (params.R >= 0 && !(kappa0 > 0)) fail(ErrorKind::InvalidArgument, "kappa0 must be positive when R >= 0");
}

ImproperResult improper_integral_ex(const RadialSolution& sol, double from, double to, const Tolerances& tol,
                                    std::optional<double> truncation) {
  const auto& p = sol.params();
  if (std::isinf(to)) {
    if (to < 0) fail(ErrorKind::InvalidArgument, "lower infinite limit is not supported");
    if (p.R >= 0) fail(ErrorKind::DivergentIntegral, "integral to +inf diverges when R >= 0");
    if (!(from > 0)) fail(ErrorKind::SingularEndpoint, "r' vanishes at s = 0");
    if (from > sol.back()) fail(ErrorKind::OutOfGrid, "lower limit outside the window");
    const double m = p.growth_rate();
    auto tail = [&](double s) { return 1.0 / (m * m * sol.rp_at(s)); };
    // Neglected part of the tail: (a/m^2) int_S^inf r^(1-n)/(r')^2.
    auto remainder = [&](double s) {
      const double rp = sol.rp_at(s);
      return p.a / (m * m) * std::pow(sol.r_at(s), 1 - p.n) / (rp * rp * (p.n + 1) * m);
    };

    double S = from;
    if (truncation) {
      S = *truncation;
      if (S < from || S > sol.back()) fail(ErrorKind::OutOfGrid, "truncation point outside [from, window end]");
    } else {
      bool found = remainder(from) <= tol.tail * tail(from);
      if (!found) {
        const auto g = sol.grid();
        for (std::size_t i = sol.locate(from) + 1; i < g.size(); ++i) {
          if (remainder(g[i]) <= tol.tail * tail(g[i])) {
            S = g[i];
            found = true;
            break;
          }
        }
      }
      if (!found) fail(ErrorKind::OutOfGrid, "window too short for the asymptotic tail");
    }
    ImproperResult out;
    out.truncation = S;
    out.tail = tail(S);
    out.value = (S > from ? quad(sol, from, S, tol.quadrature) : 0.0) + out.tail;
    return out;
  }

  if (from == to) return {};
  const double a = std::min(from, to), b = std::max(from, to);
  if (a < sol.front() || b > sol.back()) fail(ErrorKind::OutOfGrid, "limits outside the window");
  require_monotone(sol, a, b);
  const double v = quad(sol, a, b, tol.quadrature);
  return {from < to ? v : -v, 0, 0};
}

double improper_integral(const RadialSolution& sol, double from, double to, const Tolerances& tol) {
  return improper_integral_ex(sol, from, to, tol).value;
}

double improper_integral(const Profile& profile, double from, double to, const Tolerances& tol) {
  return improper_integral(profile.base(), from, to, tol);
}

CumulativeTable::CumulativeTable(std::shared_ptr<const RadialSolution> sol, double anchor, const Tolerances& tol)
    : sol_(std::move(sol)), tol_(tol), anchor_(anchor), lo_(0), hi_(0) {
  if (!sol_) fail(ErrorKind::InvalidArgument, "null radial solution");
  hi_ = sol_->back();
  if (sol_->params().R > 0) {
    if (auto s1 = first_positive_rp_root(*sol_, tol.root)) {
      hi_ = *s1;
      hi_is_root_ = true;
    }
  }
  if (!(anchor > lo_ && anchor < hi_)) fail(ErrorKind::OutOfRange, "anchor outside the monotone branch");

  for (double s : sol_->grid()) {
    if (s <= lo_) continue;
    if (hi_is_root_ ? s >= hi_ : s > hi_) break;
    nodes_.push_back(s);
  }
  if (nodes_.size() < 2) fail(ErrorKind::OutOfGrid, "branch holds too few grid nodes");
  values_.assign(nodes_.size(), 0.0);

  const auto up = std::upper_bound(nodes_.begin(), nodes_.end(), anchor);
  std::size_t right = static_cast<std::size_t>(up - nodes_.begin());
  if (right > 0) {
    std::size_t j = right - 1;
    values_[j] = -piece(nodes_[j], anchor);
    for (std::size_t k = j; k-- > 0;) values_[k] = values_[k + 1] - piece(nodes_[k], nodes_[k + 1]);
  }
  if (right < nodes_.size()) {
    values_[right] = piece(anchor, nodes_[right]);
    for (std::size_t k = right + 1; k < nodes_.size(); ++k) values_[k] = values_[k - 1] + piece(nodes_[k - 1], nodes_[k]);
  }
}

double CumulativeTable::piece(double a, double b) const {
  if (a == b) return 0;
  return quad(*sol_, a, b, tol_.quadrature);
}

double CumulativeTable::value(double s) const {
  if (!(s > lo_) || (hi_is_root_ ? !(s < hi_) : s > hi_))
    fail(ErrorKind::OutOfRange, "point outside the monotone branch");
  if (s < nodes_.front()) return values_.front() - piece(s, nodes_.front());
  const auto up = std::upper_bound(nodes_.begin(), nodes_.end(), s);
  const auto j = static_cast<std::size_t>(up - nodes_.begin()) - 1;
  return values_[j] + piece(nodes_[j], s);
}

double CumulativeTable::inverse(double target) const {
  auto width = [&](double s) { return std::max(tol_.root, 8 * std::numeric_limits<double>::epsilon() * std::abs(s)); };
  auto f = [&](double s) { return value(s); };
  if (target <= values_.front()) {
    const double x = bisect_increasing(f, lo_, nodes_.front(), target, width(nodes_.front()));
    return x;
  }
  if (target >= values_.back()) {
    if (!hi_is_root_) {
      if (target == values_.back()) return nodes_.back();
      fail(ErrorKind::OutOfRange, "matching target lies beyond the integration window");
    }
    return bisect_increasing(f, nodes_.back(), hi_, target, width(hi_));
  }
  const auto up = std::upper_bound(values_.begin(), values_.end(), target);
  const auto j = static_cast<std::size_t>(up - values_.begin()) - 1;
  if (values_[j] == target) return nodes_[j];
  return bisect_increasing(f, nodes_[j], nodes_[j + 1], target, width(nodes_[j + 1]));
}

const char* to_string(RootCase c) {
  switch (c) {
    case RootCase::TwoRoots:
      return "two_roots";
    case RootCase::SinglePositive:
      return "single_positive";
    case RootCase::SingleNegative:
      return "single_negative";
    case RootCase::OnePerInterval:
      return "one_per_interval";
  }
  return "unknown";
}

double critical_C0(const RadialSolution& sol, const Tolerances& tol) {
  if (sol.params().R >= 0) fail(ErrorKind::InvalidRegime, "C0 is defined for R < 0");
  if (!sol.theta()) fail(ErrorKind::OutOfRange, "lambda_0 has no positive root in the window");
  return improper_integral(sol, *sol.theta(), kInfinity, tol) / (sol.params().n - 1.0);
}

double exclusion_zeta(std::shared_ptr<const RadialSolution> sol, const Tolerances& tol) {
  if (!sol->theta()) fail(ErrorKind::OutOfRange, "lambda_0 has no positive root in the window");
  const double far = improper_integral(*sol, *sol->theta(), kInfinity, tol);
  CumulativeTable table(sol, *sol->theta(), tol);
  return table.inverse(-far);
}

RootCaseReport classify_roots(const Profile& profile, const Tolerances& tol) {
  RootCaseReport rep;
  const auto& sol = profile.base();
  const auto& p = profile.params();
  rep.C = profile.C();
  rep.theta = sol.theta();
  rep.observed = find_roots(profile, tol.root);
  const auto& roots = rep.observed.lam_roots;
  const double lam0_here = profile.lam_at(std::clamp(0.0, sol.front(), sol.back()));

  auto two_roots = [&] { return roots.size() == 2 && roots[0] < 0 && roots[1] > 0; };
  if (p.R == 0) {
    rep.predicted = RootCase::TwoRoots;
    rep.label = "R=0";
    rep.lambda_at_zero_sign = 1;
    rep.consistent = two_roots() && lam0_here > 0;
  } else if (p.R < 0) {
    rep.C0 = critical_C0(sol, tol);
    rep.lambda_at_zero_sign = 1;
    if (rep.C <= -*rep.C0) {
      rep.predicted = RootCase::SinglePositive;
      rep.label = "(a)";
      rep.consistent = roots.size() == 1 && roots[0] > 0;
    } else if (rep.C >= *rep.C0) {
      rep.predicted = RootCase::SingleNegative;
      rep.label = "(b)";
      rep.consistent = roots.size() == 1 && roots[0] < 0;
    } else {
      rep.predicted = RootCase::TwoRoots;
      rep.label = "(c)";
      rep.consistent = two_roots();
    }
    rep.consistent = rep.consistent && lam0_here > 0;
  } else {
    rep.predicted = RootCase::OnePerInterval;
    rep.label = "R>0";
    rep.phase = sol.phase();
    rep.lambda_at_zero_sign = rep.phase == Phase::Min ? 1 : -1;
    const auto& rr = rep.observed.rp_roots;
    bool ok = rr.size() >= 2 && sign_of(lam0_here) == rep.lambda_at_zero_sign;
    for (std::size_t k = 0; ok && k + 1 < rr.size(); ++k) {
      const auto count = std::count_if(roots.begin(), roots.end(), [&](double s) { return s > rr[k] && s < rr[k + 1]; });
      ok = count == 1;
    }
    rep.consistent = ok;
  }
  return rep;
}

MatchResult match_boundary(std::shared_ptr<const RadialSolution> sol, double zeta1, const Tolerances& tol) {
  if (!sol->has_lambda0()) fail(ErrorKind::DegenerateInitial, "lambda_0 unavailable");
  if (!sol->theta()) fail(ErrorKind::OutOfRange, "lambda_0 has no positive root in the window");
  if (!(zeta1 > 0)) fail(ErrorKind::OutOfRange, "zeta1 must be positive");
  const double theta = *sol->theta();
  CumulativeTable table(sol, theta, tol);
  if (table.hi_is_root() ? zeta1 >= table.branch_hi() : zeta1 > table.branch_hi())
    fail(ErrorKind::OutOfRange, "zeta1 outside the monotone branch of r'");
  if (sol->params().R < 0) {
    const double zeta = exclusion_zeta(sol, tol);
    if (zeta1 <= zeta) fail(ErrorKind::OutOfRange, "zeta1 must exceed the exclusion bound zeta");
  }

  MatchResult out;
  out.zeta1 = zeta1;
  out.theta = theta;
  out.outer_integral = table.value(zeta1);
  out.zeta2 = -table.inverse(-out.outer_integral);

  // Direct route: pick C so that lambda(zeta1) = 0, then find the negative root.
  out.C = -sol->lam0_at(zeta1) / sol->rp_at(zeta1);
  auto lam = [&](double s) { return sol->lam0_at(s) + out.C * sol->rp_at(s); };
  const auto g = sol->grid();
  const auto lam0 = sol->lam0();
  const auto rp = sol->rp();
  const double limit = table.hi_is_root() ? -table.branch_hi() : g.front();
  auto i = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), 0.0) - g.begin());
  const int s0 = sign_of(lam(0.0));
  bool found = false;
  for (; i > 0 && g[i - 1] >= limit; --i) {
    const double v = lam0[i - 1] + out.C * rp[i - 1];
    if (sign_of(v) != s0) {
      out.zeta2_direct = v == 0 ? g[i - 1] : bisect(lam, g[i - 1], g[i], tol.root);
      found = true;
      break;
    }
  }
  if (!found && table.hi_is_root() && i > 0) {
    // root between the last node and -s_1
    if (sign_of(lam(limit)) != s0) {
      out.zeta2_direct = bisect(lam, limit, g[i], tol.root);
      found = true;
    }
  }
  if (!found) fail(ErrorKind::OutOfRange, "no negative root of lambda inside the window");

  out.inner_integral = improper_integral(*sol, -theta, out.zeta2_direct, tol);
  const double scale = std::max({1.0, std::abs(out.outer_integral), std::abs(out.inner_integral)});
  out.discrepancy = std::abs(out.outer_integral - out.inner_integral) / scale;
  return out;
}

MatchResult match_boundary(const Profile& profile, double zeta1, const Tolerances& tol) {
  return match_boundary(profile.base_ptr(), zeta1, tol);
}

namespace {

double window_for(const OdeParams& params, double r0, const BuildOptions& opt) {
  double s_max = opt.s_max;
  if (params.R > 0 && params.a > 0) {
    const auto [s1, s2] = first_positive_rp_roots(params, r0, opt.grid);
    (void)s2;
    s_max = std::max(s_max, s1 + 20 * opt.grid.step);
  }
  return s_max;
}

void fill_boundary(MatchedDomain& d) {
  const auto& p = d.profile->params();
  const auto a = d.profile->at(d.zeta1);
  const auto b = d.profile->at(d.zeta2);
  d.radius1 = a.r;
  d.radius2 = b.r;
  d.mean_curv1 = (p.n - 1) * a.rp / a.r;
  d.mean_curv2 = -(p.n - 1) * b.rp / b.r;
  d.flux1 = d.mean_curv1 * a.lamp;
  d.flux2 = d.mean_curv2 * -b.lamp;

  const auto g = d.profile->grid();
  const auto lam = d.profile->lam();
  const double mid = d.profile->lam_at(0.5 * (d.zeta1 + d.zeta2));
  d.interior_sign = sign_of(mid);
  const double margin = 1e-9;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] <= d.zeta2 + margin || g[i] >= d.zeta1 - margin) continue;
    if (sign_of(lam[i]) != d.interior_sign) fail(ErrorKind::OutOfRange, "lambda changes sign inside the domain");
  }
}

}  // namespace

MatchedDomain matched_domain(std::shared_ptr<const RadialSolution> sol, double zeta1, const Tolerances& tol) {
  MatchedDomain d;
  d.fiber = FiberSpec::for_solution(*sol);
  d.fiber.validate(sol->params());
  d.match = match_boundary(sol, zeta1, tol);
  d.profile = std::make_shared<const Profile>(sol, d.match.C);
  d.zeta1 = zeta1;
  d.zeta2 = d.match.zeta2_direct;
  d.boundary_components = 2;
  fill_boundary(d);
  return d;
}

MatchedDomain build_example1(const OdeParams& params, double r0, double zeta1, const BuildOptions& opt) {
  params.validate();
  if (!(params.a > 0)) fail(ErrorKind::InvalidArgument, "two-boundary examples need a > 0");
  return matched_domain(integrate_r(params, r0, window_for(params, r0, opt), opt.grid), zeta1, opt.grid.tol);
}

MatchedDomain build_example2(const OdeParams& params, double r0, std::optional<FiberSpec> fiber,
                             const BuildOptions& opt) {
  params.validate();
  if (!(params.a > 0)) fail(ErrorKind::InvalidArgument, "quotient examples need a > 0");
  auto sol = integrate_r(params, r0, window_for(params, r0, opt), opt.grid);
  MatchedDomain d;
  d.fiber = fiber.value_or(FiberSpec::for_solution(*sol));
  d.fiber.validate(params);
  const auto& tol = opt.grid.tol;
  if (std::abs(d.fiber.kappa0 - sol->kappa0()) > tol.fiber * (1 + std::abs(sol->kappa0())))
    fail(ErrorKind::FiberMismatch, "fiber curvature does not match the first integral");
  if (!d.fiber.free_involution) fail(ErrorKind::NoFreeInvolution, "fiber carries no free involution");
  if (!sol->theta()) fail(ErrorKind::OutOfRange, "lambda_0 has no positive root in the window");

  const double theta = *sol->theta();
  d.profile = std::make_shared<const Profile>(sol, 0.0);
  d.match = match_boundary(sol, theta, tol);
  d.zeta1 = theta;
  d.zeta2 = -theta;
  d.quotient = QuotientRecord{};
  d.boundary_components = 1;

  const auto g = sol->grid();
  const auto lam0 = sol->lam0();
  for (std::size_t i = 0, j = g.size() - 1; i < j; ++i, --j) {
    if (std::abs(g[i]) > theta) continue;
    if (std::abs(lam0[i] - lam0[j]) > tol.root * (1 + std::abs(lam0[i])))
      fail(ErrorKind::OutOfRange, "lambda_0 is not even on the quotient interval");
  }
  fill_boundary(d);
  return d;
}

double SchwarzschildForm::coefficient(double r) const { return 1.0 / (1.0 - params.potential(r)); }

double SchwarzschildForm::zeta_for_radius(double radius) const {
  if (!(radius > horizon_radius)) fail(ErrorKind::OutOfRange, "outer radius must exceed the horizon");
  if (radius > solution->r().back()) fail(ErrorKind::OutOfRange, "outer radius beyond the integration window");
  const auto g = solution->grid();
  const auto r = solution->r();
  auto i = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), 0.0) - g.begin());
  for (; i + 1 < g.size(); ++i)
    if (r[i + 1] >= radius)
      return bisect([&](double s) { return solution->r_at(s) - radius; }, g[i], g[i + 1], tol.root);
  fail(ErrorKind::OutOfRange, "outer radius beyond the integration window");
}

MatchResult SchwarzschildForm::match_outer_radius(double radius) const {
  return match_boundary(solution, zeta_for_radius(radius), tol);
}

SchwarzschildForm schwarzschild_form(const OdeParams& params, double fiber_kappa0, const BuildOptions& opt) {
  params.validate();
  if (params.R > 0) fail(ErrorKind::InvalidRegime, "radial form needs R <= 0");
  if (std::abs(fiber_kappa0 - 1.0) > 1e-12) fail(ErrorKind::InvalidRegime, "radial form needs kappa0 = 1");
  if (!(params.a > 0)) fail(ErrorKind::InvalidArgument, "positive mass a > 0 required");

  SchwarzschildForm out;
  out.params = params;
  out.tol = opt.grid.tol;

  // Denominator 1 - F(r) is increasing in r for R <= 0.
  auto denom = [&](double r) { return 1.0 - params.potential(r); };
  double lo = 1, hi = 1;
  while (denom(lo) >= 0) lo *= 0.5;
  while (denom(hi) <= 0) hi *= 2;
  out.horizon_radius = bisect(denom, lo, hi, 1e-15 * hi, 400);

  // Off-horizon start: integrate inward until r' changes sign.
  double start = 1;
  while (denom(start) < 0.5) start *= 2;
  using S2 = std::array<double, 2>;
  auto rhs = [&](double, const S2& y, S2& dy) {
    dy[0] = y[1];
    dy[1] = params.rpp(y[0]);
  };
  const double h = -opt.grid.step;
  S2 prev{start, std::sqrt(denom(start))};
  double s_prev = 0;
  bool found = false;
  IntegratorOptions io;
  io.rtol = out.tol.rtol;
  io.atol = out.tol.atol;
  integrate_nodes<2>(rhs, 0.0, prev, h, 100'000'000, io, [&](std::size_t, double s, const S2& y) {
    if (y[1] <= 0) {
      const double s0 = s, s1 = s_prev;
      const S2 a = y, b = prev;
      auto rp = [&](double x) { return hermite(s0, s1, a[1], b[1], params.rpp(a[0]), params.rpp(b[0]), x); };
      const double root = y[1] == 0 ? s : bisect(rp, s0, s1, out.tol.root);
      out.horizon_from_flow = hermite(s0, s1, a[0], b[0], a[1], b[1], root);
      found = true;
      return false;
    }
    prev = y;
    s_prev = s;
    return true;
  });
  if (!found) fail(ErrorKind::StepFailure, "trajectory never reached the horizon");

  out.solution = integrate_r(params, out.horizon_radius, opt.s_max, opt.grid);
  out.theta = out.solution->theta();
  if (params.R < 0) out.exclusion_zeta = exclusion_zeta(out.solution, out.tol);
  return out;
}

}  // namespace warpcrit
