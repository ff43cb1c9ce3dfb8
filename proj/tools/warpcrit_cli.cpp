// Batch front-end: reads a JSON config, runs one command and writes JSON/CSV
// artifacts. Exit codes: 0 pass, 1 verification failure, 2 input error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "warpcrit/boundary_match.hpp"
#include "warpcrit/errors.hpp"
#include "warpcrit/geometry_check.hpp"
#include "warpcrit/io.hpp"
#include "warpcrit/profile_ode.hpp"
#include "warpcrit/spectral.hpp"

namespace fs = std::filesystem;
using namespace warpcrit;
using io::json;

namespace {

enum Exit { kPass = 0, kVerifyFail = 1, kInputError = 2, kNumericalError = 3 };

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::RangeError:
    case ErrorKind::OutOfRange:
    case ErrorKind::InvalidRegime:
    case ErrorKind::NoFreeInvolution:
    case ErrorKind::OutOfGrid:
      return kInputError;
    case ErrorKind::FiberMismatch:
      return kVerifyFail;
    default:
      return kNumericalError;
  }
}

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::set<std::string> kCommon = {"params", "tolerances", "grid_step", "s_max"};

const std::map<std::string, std::set<std::string>> kCommandKeys = {
    {"construct", {"r0", "kappa0", "phase", "C", "name"}},
    {"verify", {"profile", "r0", "kappa0", "phase", "C", "fiber", "interval", "perturb"}},
    {"match", {"r0", "kappa0", "phase", "zeta1", "table"}},
    {"spectrum", {"r0", "kappa0", "phase", "C", "interval", "cells", "prop36"}},
    {"schwarzschild", {"fiber_kappa0", "outer_radii"}},
    {"example1", {"r0", "kappa0", "phase", "zeta1"}},
    {"example2", {"r0", "kappa0", "phase", "fiber"}},
};

struct Context {
  std::string command;
  json config;
  fs::path config_dir;
  fs::path out;
  Tolerances tol;
  GridOptions grid;
  double s_max = 10;
};

double number(const json& j, const std::string& key) {
  if (!j.contains(key)) throw InputError("missing key: " + key);
  if (!j[key].is_number()) throw InputError(key + " must be a number");
  return j[key].get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

void validate_keys(const Context& ctx) {
  if (!ctx.config.is_object()) throw InputError("config must be a JSON object");
  const auto& allowed = kCommandKeys.at(ctx.command);
  for (const auto& [key, value] : ctx.config.items()) {
    (void)value;
    if (!kCommon.count(key) && !allowed.count(key)) throw InputError("unknown config key for " + ctx.command + ": " + key);
  }
  if (!ctx.config.contains("params") && !(ctx.command == "verify" && ctx.config.contains("profile")))
    throw InputError("missing key: params");
}

Phase phase_of(const json& cfg) {
  const std::string p = cfg.value("phase", "min");
  if (p == "min") return Phase::Min;
  if (p == "max") return Phase::Max;
  throw InputError("phase must be \"min\" or \"max\"");
}

std::shared_ptr<const RadialSolution> solution_from(const Context& ctx, const OdeParams& params, double s_max) {
  const auto& c = ctx.config;
  const bool has_r0 = c.contains("r0"), has_kappa = c.contains("kappa0");
  if (has_r0 == has_kappa) throw InputError("give exactly one of r0 or kappa0");
  if (has_r0) return integrate_r(params, number(c, "r0"), s_max, ctx.grid);
  return integrate_r_from_kappa(params, number(c, "kappa0"), s_max, phase_of(c), ctx.grid);
}

// R > 0 windows must reach past the first positive root of r'.
double window_for(const Context& ctx, const OdeParams& params) {
  double s_max = ctx.s_max;
  const auto& c = ctx.config;
  if (params.R > 0 && params.a > 0 && c.contains("r0")) {
    const double r0 = number(c, "r0");
    if (auto eq = params.equilibrium_radius(); eq && std::abs(r0 - *eq) > 1e-12 * r0)
      s_max = std::max(s_max, 1.25 * first_positive_rp_roots(params, r0, ctx.grid).first + 20 * ctx.grid.step);
  }
  return s_max;
}

json envelope(const Context& ctx, const OdeParams& params) {
  return {{"command", ctx.command},
          {"params", io::to_json(params)},
          {"tolerances", io::to_json(ctx.tol)},
          {"grid_step", ctx.grid.step},
          {"timestamp", io::utc_timestamp()}};
}

void emit(const Context& ctx, const std::string& file, const json& doc) {
  const auto text = doc.dump(2) + "\n";
  io::write_text_atomic(ctx.out / file, text);
  std::cout << text;
}

int cmd_construct(const Context& ctx) {
  const auto params = io::params_from_json(ctx.config["params"]);
  auto sol = solution_from(ctx, params, ctx.s_max);
  const Profile profile = solve_lambda(sol, number_or(ctx.config, "C", 0.0));
  const std::string name = ctx.config.value("name", "profile");
  io::write_text_atomic(ctx.out / (name + ".csv"), io::profile_csv(profile));
  auto env = io::profile_envelope(profile, ctx.tol, name + ".csv", io::utc_timestamp());
  env["command"] = ctx.command;
  env["grid_step"] = ctx.grid.step;
  double drift = 0;
  for (double e : sol->energy_residual()) drift = std::max(drift, std::abs(e));
  env["max_conservation_drift"] = drift;
  emit(ctx, name + ".json", env);
  return kPass;
}

fs::path resolve(const Context& ctx, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : ctx.config_dir / path;
}

int cmd_verify(const Context& ctx) {
  const auto& c = ctx.config;
  std::optional<Profile> profile;
  if (c.contains("profile")) {
    const auto& src = c["profile"];
    if (!src.is_object() || !src.contains("csv") || !src.contains("json") || !src["csv"].is_string() ||
        !src["json"].is_string())
      throw InputError("profile must be {\"csv\": path, \"json\": path}");
    for (const auto& [key, value] : src.items()) {
      (void)value;
      if (key != "csv" && key != "json") throw InputError("unknown profile key: " + key);
    }
    profile.emplace(io::load_profile(resolve(ctx, src["csv"]), resolve(ctx, src["json"])));
    if (c.contains("params") && io::params_from_json(c["params"]).R != profile->params().R)
      throw InputError("params disagree with the profile envelope");
  } else {
    const auto params = io::params_from_json(c["params"]);
    profile.emplace(solve_lambda(solution_from(ctx, params, ctx.s_max), number_or(c, "C", 0.0)));
  }
  const auto& params = profile->params();

  FiberSpec fiber{params.n - 1, profile->kappa0(), profile->kappa0() > 0};
  if (c.contains("fiber")) {
    const auto& f = c["fiber"];
    if (!f.is_object()) throw InputError("fiber must be an object");
    for (const auto& [key, value] : f.items()) {
      (void)value;
      if (key != "kappa0" && key != "dim") throw InputError("unknown fiber key: " + key);
    }
    fiber.kappa0 = number_or(f, "kappa0", fiber.kappa0);
    fiber.dim = static_cast<int>(number_or(f, "dim", fiber.dim));
  }

  // Negative controls: deliberately break lambda or the fiber curvature.
  if (c.contains("perturb")) {
    const auto& pj = c["perturb"];
    if (!pj.is_object()) throw InputError("perturb must be an object");
    for (const auto& [key, value] : pj.items()) {
      (void)value;
      if (key != "lambda_slope" && key != "kappa0_shift") throw InputError("unknown perturb key: " + key);
    }
    const double eps = number_or(pj, "lambda_slope", 0.0);
    fiber.kappa0 += number_or(pj, "kappa0_shift", 0.0);
    if (eps != 0) {
      std::vector<double> lam(profile->lam().begin(), profile->lam().end());
      std::vector<double> lamp(profile->lamp().begin(), profile->lamp().end());
      for (std::size_t i = 0; i < lam.size(); ++i) {
        lam[i] += eps * profile->grid()[i];
        lamp[i] += eps;
      }
      profile.emplace(profile->base_ptr(), profile->C(), std::move(lam), std::move(lamp));
    }
  }

  VerifyOptions opt;
  opt.tol = ctx.tol;
  if (c.contains("interval")) {
    const auto& iv = c["interval"];
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
      throw InputError("interval must be [b1, b2]");
    opt.interval = std::pair{iv[0].get<double>(), iv[1].get<double>()};
  }

  json doc = envelope(ctx, params);
  bool mismatch = false;
  ResidualReport rep;
  try {
    rep = verify_critical(*profile, fiber, opt);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::FiberMismatch) throw;
    mismatch = true;
    doc["error"] = e.what();
    opt.check_fiber = false;
    rep = verify_critical(*profile, fiber, opt);
  }
  doc["residuals"] = io::to_json(rep);
  doc["fiber"] = io::to_json(fiber);
  doc["fiber_mismatch"] = mismatch;
  bool conformal_ok = true;
  try {
    const auto cf = verify_conformally_flat(*profile, fiber, opt);
    doc["conformal"] = io::to_json(cf);
    conformal_ok = cf.max_residual <= ctx.tol.weyl;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AllPointsMasked) throw;
    doc["conformal"] = nullptr;
  }
  const bool ok = rep.passed && !mismatch && conformal_ok;
  doc["verdict"] = ok ? "pass" : "fail";
  emit(ctx, "verify.json", doc);
  return ok ? kPass : kVerifyFail;
}

int cmd_match(const Context& ctx) {
  const auto& c = ctx.config;
  const auto params = io::params_from_json(c["params"]);
  auto sol = solution_from(ctx, params, window_for(ctx, params));
  if (!sol->theta()) throw Error(ErrorKind::OutOfRange, "lambda_0 has no positive root in the window");
  double zeta1 = *sol->theta();
  if (c.contains("zeta1") && !(c["zeta1"].is_string() && c["zeta1"] == "theta")) zeta1 = number(c, "zeta1");
  const auto domain = matched_domain(sol, zeta1, ctx.tol);
  const auto roots = classify_roots(*domain.profile, ctx.tol);

  json doc = envelope(ctx, params);
  doc["domain"] = io::to_json(domain);
  doc["roots"] = io::to_json(roots);
  const bool ok = domain.match.discrepancy <= ctx.tol.matching;
  if (c.value("table", false)) {
    const CumulativeTable table(sol, *sol->theta(), ctx.tol);
    io::write_text_atomic(ctx.out / "cumulative.csv", io::cumulative_csv(table));
    doc["table_csv"] = "cumulative.csv";
  }
  doc["verdict"] = ok ? "pass" : "fail";
  emit(ctx, "match.json", doc);
  return ok ? kPass : kVerifyFail;
}

int cmd_spectrum(const Context& ctx) {
  const auto& c = ctx.config;
  const auto params = io::params_from_json(c["params"]);
  SpectralOptions sopt;
  if (c.contains("cells")) {
    const double cells = number(c, "cells");
    if (!(cells >= 3) || cells != std::floor(cells)) throw InputError("cells must be an integer >= 3");
    sopt.cells = static_cast<std::size_t>(cells);
  }
  json doc = envelope(ctx, params);
  const double C = number_or(c, "C", 0.0);

  if (c.value("prop36", false)) {
    if (!c.contains("r0")) throw InputError("prop36 needs r0");
    const auto rep = verify_prop36(params, number(c, "r0"), C, sopt, ctx.grid);
    doc["prop36"] = io::to_json(rep);
    doc["verdict"] = rep.all_ok() ? "pass" : "fail";
    io::write_text_atomic(ctx.out / "eigenvector.csv", io::eigenvector_csv(rep.zero_mode));
    emit(ctx, "spectrum.json", doc);
    return rep.all_ok() ? kPass : kVerifyFail;
  }

  auto sol = solution_from(ctx, params, window_for(ctx, params));
  const Profile profile = solve_lambda(sol, C);
  double b1 = 0, b2 = 0;
  const json iv = c.value("interval", json("s1"));
  if (iv.is_array()) {
    if (iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) throw InputError("interval must be [b1, b2]");
    b1 = iv[0].get<double>();
    b2 = iv[1].get<double>();
  } else if (iv == "s1") {
    const auto roots = find_roots(profile, ctx.tol.root).rp_roots;
    auto it = std::find_if(roots.begin(), roots.end(), [](double s) { return s > 0; });
    if (it == roots.end()) throw Error(ErrorKind::OutOfRange, "no positive root of r' in the window");
    b2 = *it;
  } else if (iv == "quotient") {
    if (!sol->theta()) throw Error(ErrorKind::OutOfRange, "lambda_0 has no positive root in the window");
    b1 = -*sol->theta();
    b2 = *sol->theta();
  } else if (iv == "matched") {
    const auto lr = find_roots(profile, ctx.tol.root).lam_roots;
    auto pos = std::find_if(lr.begin(), lr.end(), [](double s) { return s > 0; });
    if (pos == lr.end() || pos == lr.begin()) throw Error(ErrorKind::OutOfRange, "lambda has no root pair around 0");
    b1 = *(pos - 1);
    b2 = *pos;
  } else {
    throw InputError("interval must be [b1, b2], \"s1\", \"matched\" or \"quotient\"");
  }
  const auto res = first_dirichlet_eigenvalue(profile, b1, b2, sopt);
  doc["spectrum"] = io::to_json(res);
  doc["eigenvector_csv"] = "eigenvector.csv";
  doc["verdict"] = "pass";
  io::write_text_atomic(ctx.out / "eigenvector.csv", io::eigenvector_csv(res));
  emit(ctx, "spectrum.json", doc);
  return kPass;
}

int cmd_schwarzschild(const Context& ctx) {
  const auto& c = ctx.config;
  const auto params = io::params_from_json(c["params"]);
  BuildOptions bopt{ctx.s_max, ctx.grid};
  std::vector<double> radii;
  if (c.contains("outer_radii")) {
    if (!c["outer_radii"].is_array()) throw InputError("outer_radii must be an array");
    for (const auto& v : c["outer_radii"]) {
      if (!v.is_number()) throw InputError("outer_radii entries must be numbers");
      radii.push_back(v.get<double>());
    }
    std::sort(radii.begin(), radii.end());
    // r' <= 1 when kappa0 = 1 and R <= 0, so s must reach at least the radius.
    if (!radii.empty() && !c.contains("s_max")) bopt.s_max = std::max(bopt.s_max, 2 * radii.back() + 2);
  }
  const auto form = schwarzschild_form(params, number_or(c, "fiber_kappa0", 1.0), bopt);
  json doc = envelope(ctx, params);
  doc["schwarzschild"] = io::to_json(form);

  json pairs = json::array();
  bool monotone = true;
  double prev_abs = std::numeric_limits<double>::infinity();
  {
    for (double rho : radii) {
      const auto m = form.match_outer_radius(rho);
      const double inner = form.solution->r_at(m.zeta2_direct);
      pairs.push_back({{"outer_radius", rho},
                       {"zeta1", m.zeta1},
                       {"zeta2", m.zeta2_direct},
                       {"inner_radius", inner},
                       {"discrepancy", m.discrepancy}});
      monotone = monotone && std::abs(m.zeta2_direct) < prev_abs;
      prev_abs = std::abs(m.zeta2_direct);
    }
  }
  doc["matched_spheres"] = pairs;
  doc["pairing_monotone"] = monotone;
  doc["verdict"] = monotone ? "pass" : "fail";
  emit(ctx, "schwarzschild.json", doc);
  return monotone ? kPass : kVerifyFail;
}

json verify_domain(const Context& ctx, const MatchedDomain& d, bool& ok) {
  VerifyOptions opt;
  opt.tol = ctx.tol;
  opt.interval = std::pair{d.zeta2, d.zeta1};
  const auto rep = verify_critical(*d.profile, d.fiber, opt);
  const auto cf = verify_conformally_flat(*d.profile, d.fiber, opt);
  ok = rep.passed && cf.max_residual <= ctx.tol.weyl;
  return {{"residuals", io::to_json(rep)}, {"conformal", io::to_json(cf)}};
}

int cmd_example1(const Context& ctx) {
  const auto& c = ctx.config;
  const auto params = io::params_from_json(c["params"]);
  if (!c.contains("r0")) throw InputError("missing key: r0");
  const double r0 = number(c, "r0");
  BuildOptions bopt{ctx.s_max, ctx.grid};
  double zeta1;
  if (c.contains("zeta1") && c["zeta1"].is_number()) {
    zeta1 = c["zeta1"].get<double>();
  } else {
    auto sol = integrate_r(params, r0, window_for(ctx, params), ctx.grid);
    if (!sol->theta()) throw Error(ErrorKind::OutOfRange, "lambda_0 has no positive root in the window");
    zeta1 = *sol->theta();
  }
  const auto d = build_example1(params, r0, zeta1, bopt);
  bool ok = false;
  json doc = envelope(ctx, params);
  doc["domain"] = io::to_json(d);
  doc["verification"] = verify_domain(ctx, d, ok);
  ok = ok && d.match.discrepancy <= ctx.tol.matching;
  doc["verdict"] = ok ? "pass" : "fail";
  emit(ctx, "example1.json", doc);
  return ok ? kPass : kVerifyFail;
}

int cmd_example2(const Context& ctx) {
  const auto& c = ctx.config;
  const auto params = io::params_from_json(c["params"]);
  const BuildOptions bopt{ctx.s_max, ctx.grid};
  double r0;
  if (c.contains("r0")) {
    r0 = number(c, "r0");
  } else if (c.contains("kappa0")) {
    const auto b = radius_bounds(params, number(c, "kappa0"));
    r0 = phase_of(c) == Phase::Max && b.upper ? *b.upper : b.lower;
  } else {
    throw InputError("give r0 or kappa0");
  }
  std::optional<FiberSpec> fiber;
  if (c.contains("fiber")) {
    const auto& f = c["fiber"];
    if (!f.is_object()) throw InputError("fiber must be an object");
    for (const auto& [key, value] : f.items()) {
      (void)value;
      if (key != "kappa0" && key != "dim" && key != "free_involution") throw InputError("unknown fiber key: " + key);
    }
    FiberSpec spec;
    spec.dim = static_cast<int>(number_or(f, "dim", params.n - 1));
    spec.kappa0 = number_or(f, "kappa0", params.potential(r0));
    spec.free_involution = f.value("free_involution", spec.kappa0 > 0);
    fiber = spec;
  }
  const auto d = build_example2(params, r0, fiber, bopt);
  bool ok = false;
  json doc = envelope(ctx, params);
  doc["domain"] = io::to_json(d);
  doc["verification"] = verify_domain(ctx, d, ok);
  doc["verdict"] = ok ? "pass" : "fail";
  emit(ctx, "example2.json", doc);
  return ok ? kPass : kVerifyFail;
}

int run(Context& ctx) {
  validate_keys(ctx);
  const auto& c = ctx.config;
  ctx.s_max = number_or(c, "s_max", ctx.s_max);
  if (!(ctx.s_max > 0)) throw InputError("s_max must be positive");
  ctx.grid.tol = ctx.tol;
  if (ctx.command == "construct") return cmd_construct(ctx);
  if (ctx.command == "verify") return cmd_verify(ctx);
  if (ctx.command == "match") return cmd_match(ctx);
  if (ctx.command == "spectrum") return cmd_spectrum(ctx);
  if (ctx.command == "schwarzschild") return cmd_schwarzschild(ctx);
  if (ctx.command == "example1") return cmd_example1(ctx);
  return cmd_example2(ctx);
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--seedless=", 0) == 0) {
      std::cerr << "error: --seedless takes no value\n";
      return kInputError;
    }
  }

  CLI::App app{"Construct and verify warped-product critical metrics"};
  std::string command, config_path, out_dir = ".";
  std::vector<std::string> tol_overrides;
  std::optional<double> grid_step;
  bool seedless = false;
  app.add_option("command", command, "construct | verify | match | spectrum | schwarzschild | example1 | example2")
      ->required()
      ->check(CLI::IsMember({"construct", "verify", "match", "spectrum", "schwarzschild", "example1", "example2"}));
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--tol", tol_overrides, "tolerance override NAME=VALUE (repeatable)");
  app.add_option("--grid-step", grid_step, "uniform output step");
  app.add_flag("--seedless", seedless, "no randomness is used anywhere; accepted for batch scripts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  Context ctx;
  ctx.command = command;
  ctx.out = out_dir;
  try {
    const fs::path cfg(config_path);
    ctx.config_dir = cfg.has_parent_path() ? cfg.parent_path() : fs::path(".");
    try {
      ctx.config = json::parse(io::read_text(cfg));
    } catch (const json::exception& e) {
      throw InputError(std::string("malformed config: ") + e.what());
    }
    if (ctx.config.is_object() && ctx.config.contains("grid_step")) ctx.grid.step = number(ctx.config, "grid_step");
    if (grid_step) ctx.grid.step = *grid_step;
    if (!(ctx.grid.step > 0)) throw InputError("grid step must be positive");
    // Config tolerances first, then command-line overrides on top.
    if (ctx.config.is_object() && ctx.config.contains("tolerances")) {
      io::apply_tolerances(ctx.tol, ctx.config["tolerances"]);
      ctx.config.erase("tolerances");
    }
    for (const auto& item : tol_overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InputError("--tol expects NAME=VALUE, got " + item);
      const auto name = item.substr(0, eq);
      double value = 0;
      try {
        std::size_t used = 0;
        value = std::stod(item.substr(eq + 1), &used);
        if (used != item.size() - eq - 1) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InputError("bad tolerance value in " + item);
      }
      if (!ctx.tol.set(name, value)) throw InputError("unknown tolerance: " + name);
    }
    return run(ctx);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalError;
  }
}
