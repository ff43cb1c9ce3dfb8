#include "warpcrit/geometry_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "warpcrit/errors.hpp"

namespace warpcrit {

CurvatureSample curvature_sample(const ProfilePoint& pt, const OdeParams& params, double kappa0) {
  const double n = params.n;
  const double R = params.R;
  CurvatureSample c;
  c.s = pt.s;
  c.r = pt.r;
  c.rp = pt.rp;
  c.rpp = pt.rpp;
  c.lam = pt.lam;
  c.lamp = pt.lamp;

  const double q = pt.rp / pt.r;
  const double acc = pt.rpp / pt.r;
  c.ric_ss = -(n - 1) * acc;
  c.ric_tan = (n - 2) * kappa0 / (pt.r * pt.r) - (n - 2) * q * q - acc;
  c.scal = -2 * (n - 1) * acc + (n - 1) * (n - 2) * kappa0 / (pt.r * pt.r) - (n - 1) * (n - 2) * q * q;
  c.hess_ss = pt.lampp;
  c.hess_tan = q * pt.lamp;
  c.lap = c.hess_ss + (n - 1) * c.hess_tan;
  c.sec_rad = -acc;
  c.sec_tan = (kappa0 - pt.rp * pt.rp) / (pt.r * pt.r);
  c.mean_curv = (n - 1) * q;
  const double shift = R / (2 * (n - 1));
  c.schouten_ss = (c.ric_ss - shift) / (n - 2);
  c.schouten_tan = (c.ric_tan - shift) / (n - 2);
  return c;
}

CurvatureSample curvature_at(const Profile& profile, const FiberSpec& fiber, double s) {
  const auto pt = profile.at(s);
  if (!(pt.r > 0)) fail(ErrorKind::InvalidArgument, "r must be positive at the sample");
  return curvature_sample(pt, profile.params(), fiber.kappa0);
}

double implied_kappa0(const Profile& profile) {
  const auto rp = profile.rp();
  const auto r = profile.r();
  std::size_t best = 0;
  for (std::size_t i = 1; i < rp.size(); ++i)
    if (r[i] > 0 && (std::abs(rp[i]) < std::abs(rp[best]) || !(r[best] > 0))) best = i;
  return profile.params().first_integral(r[best], rp[best]);
}

namespace {

bool inside(const VerifyOptions& opt, double s) {
  if (!opt.interval) return true;
  return s >= opt.interval->first && s <= opt.interval->second;
}

// Largest |lambda| over the nodes that will be evaluated.
double interval_lambda_max(const Profile& profile, const VerifyOptions& opt) {
  double m = 0;
  const auto g = profile.grid();
  const auto lam = profile.lam();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (inside(opt, g[i])) m = std::max(m, std::abs(lam[i]));
  return m;
}

// Positivity cut for geodesic-ball centres where r -> 0.
double r_floor(const Profile& profile, const Tolerances& tol) {
  double rmax = 0;
  for (double v : profile.r()) rmax = std::max(rmax, v);
  return tol.positivity_floor * rmax;
}

struct Rebuilt {
  double sec_rad, sec_tan;
};

// Sectional curvatures assembled from lambda, its Hessian and R alone.
Rebuilt rebuild_from_lambda(const CurvatureSample& c, const OdeParams& p) {
  const double n = p.n;
  const double base = (p.R + 2 / c.lam) / ((n - 1) * (n - 2));
  return {base + (c.hess_ss + c.hess_tan) / ((n - 2) * c.lam), base + 2 * c.hess_tan / ((n - 2) * c.lam)};
}

}  // namespace

ResidualReport verify_critical(const Profile& profile, const FiberSpec& fiber, const VerifyOptions& opt) {
  const auto& p = profile.params();
  const auto& tol = opt.tol;
  const double kappa0 = fiber.kappa0;
  if (fiber.dim != p.n - 1) fail(ErrorKind::InvalidArgument, "fiber dimension must be n-1");
  if (opt.check_fiber) {
    const double implied = implied_kappa0(profile);
    if (std::abs(implied - kappa0) > tol.fiber * (1 + std::abs(implied)))
      fail(ErrorKind::FiberMismatch, "fiber kappa0 disagrees with the profile's first integral");
  }

  ResidualReport rep;
  rep.tolerances = tol;
  const double floor = r_floor(profile, tol);
  const double lam_cut = tol.lambda_floor * interval_lambda_max(profile, opt);
  const double n = p.n;
  double lam_max = 0;
  double ric_gap = std::numeric_limits<double>::infinity();
  double einstein = 0;
  bool any_weyl = false;

  const auto energy = profile.base().energy_residual();
  const double kappa_shift = profile.kappa0() - kappa0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto pt = profile.node(i);
    if (!inside(opt, pt.s) || !(pt.r > floor)) continue;
    const auto c = curvature_sample(pt, p, kappa0);
    ++rep.grid_size;
    lam_max = std::max(lam_max, std::abs(c.lam));

    const double ss = -c.lap + c.hess_ss - c.lam * c.ric_ss - 1;
    const double tan = -c.lap + c.hess_tan - c.lam * c.ric_tan - 1;
    rep.max_ss_residual = std::max(rep.max_ss_residual, std::abs(ss));
    rep.max_tan_residual = std::max(rep.max_tan_residual, std::abs(tan));
    rep.max_trace_residual = std::max(rep.max_trace_residual, std::abs(c.lap + (p.R * c.lam + n) / (n - 1)));
    rep.max_scal_deviation = std::max(rep.max_scal_deviation, std::abs(c.scal - p.R));
    rep.max_gauss_residual = std::max(
        rep.max_gauss_residual, std::abs(c.scal - (2 * (n - 1) * c.sec_rad + (n - 1) * (n - 2) * c.sec_tan)));
    rep.max_lambda_identity =
        std::max(rep.max_lambda_identity, std::abs(pt.rp * pt.lamp - pt.rpp * pt.lam + pt.r / (n - 1)));
    rep.max_conservation = std::max(rep.max_conservation, std::abs(energy[i] + kappa_shift));

    const double gap = std::abs(c.ric_ss - c.ric_tan);
    einstein = std::max(einstein, gap);
    ric_gap = std::min(ric_gap, gap);

    if (std::abs(c.lam) > lam_cut) {
      const auto k = rebuild_from_lambda(c, p);
      rep.max_weyl_residual =
          std::max({rep.max_weyl_residual, std::abs(k.sec_rad - c.sec_rad), std::abs(k.sec_tan - c.sec_tan)});
      any_weyl = true;
    } else {
      ++rep.masked_points;
    }
  }
  if (rep.grid_size == 0) fail(ErrorKind::OutOfGrid, "no grid node inside the requested interval");
  rep.max_critical_residual = std::max({rep.max_ss_residual, rep.max_tan_residual, rep.max_trace_residual});
  if (p.a == 0) rep.max_einstein_residual = einstein;
  else rep.min_ricci_gap = ric_gap;

  rep.passed = rep.max_critical_residual <= tol.critical &&
               rep.max_scal_deviation <= tol.scalar * (1 + std::abs(p.R)) &&
               rep.max_lambda_identity <= tol.lambda_identity * (1 + lam_max) &&
               (!any_weyl || rep.max_weyl_residual <= tol.weyl) &&
               (!rep.max_einstein_residual || *rep.max_einstein_residual <= tol.einstein);
  return rep;
}

ConformalReport verify_conformally_flat(const Profile& profile, const FiberSpec& fiber, const VerifyOptions& opt) {
  const auto& p = profile.params();
  const double floor = r_floor(profile, opt.tol);
  const double lam_cut = opt.tol.lambda_floor * interval_lambda_max(profile, opt);
  ConformalReport rep;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto pt = profile.node(i);
    if (!inside(opt, pt.s) || !(pt.r > floor)) continue;
    const auto c = curvature_sample(pt, p, fiber.kappa0);
    // The Kulkarni-Nomizu identity needs no division by lambda.
    rep.max_kulkarni_nomizu = std::max({rep.max_kulkarni_nomizu, std::abs(c.schouten_ss + c.schouten_tan - c.sec_rad),
                                        std::abs(2 * c.schouten_tan - c.sec_tan)});
    if (!(std::abs(c.lam) > lam_cut)) {
      ++rep.masked_points;
      continue;
    }
    const auto k = rebuild_from_lambda(c, p);
    rep.max_residual = std::max({rep.max_residual, std::abs(k.sec_rad - c.sec_rad), std::abs(k.sec_tan - c.sec_tan)});
    ++rep.used_points;
  }
  if (rep.used_points == 0) fail(ErrorKind::AllPointsMasked, "every grid point falls under the lambda floor");
  return rep;
}

LevelSetGeometry level_set_geometry(const Profile& profile, double s) {
  const auto pt = profile.at(s);
  if (pt.lamp == 0) fail(ErrorKind::CriticalLevel, "lambda' vanishes: not a regular level");
  const auto& p = profile.params();
  LevelSetGeometry out;
  out.grad_norm = std::abs(pt.lamp);
  out.umbilic = pt.rp / pt.r;
  out.mean_curv = (p.n - 1) * out.umbilic;
  if (p.a == 0) {
    const double kappa = p.curvature();
    out.einstein_umbilic = (-kappa * pt.lam - 1.0 / (p.n - 1)) / out.grad_norm;
    const double oriented = (pt.lamp > 0 ? 1.0 : -1.0) * out.umbilic;
    out.einstein_residual = std::abs(*out.einstein_umbilic - oriented);
  }
  return out;
}

}  // namespace warpcrit
