#include "warpcrit/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "warpcrit/errors.hpp"

namespace warpcrit::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
    os << text;
    if (!os) fail(ErrorKind::InvalidArgument, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::InvalidArgument, "cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(const OdeParams& p) { return {{"n", p.n}, {"R", p.R}, {"a", p.a}}; }

json to_json(const Tolerances& t) {
  json j = json::object();
  for (const auto& [name, value] : t.entries()) j[name] = value;
  return j;
}

json to_json(const RootSet& r) {
  json kinds = json::array();
  for (auto k : r.rp_kinds) kinds.push_back(k == RootKind::Min ? "MIN" : k == RootKind::Max ? "MAX" : "CRITICAL");
  return {{"rp_roots", r.rp_roots}, {"rp_kinds", kinds}, {"lam_roots", r.lam_roots},
          {"constant_solution", r.constant_solution}};
}

json to_json(const FiberSpec& f) {
  return {{"dim", f.dim}, {"kappa0", f.kappa0}, {"free_involution", f.free_involution}};
}

json to_json(const MatchResult& m) {
  return {{"zeta1", m.zeta1},
          {"zeta2", m.zeta2},
          {"zeta2_direct", m.zeta2_direct},
          {"C", m.C},
          {"theta", m.theta},
          {"outer_integral", m.outer_integral},
          {"inner_integral", m.inner_integral},
          {"discrepancy", m.discrepancy}};
}

json to_json(const MatchedDomain& d) {
  json j = {{"params", to_json(d.profile->params())},
            {"kappa0", d.profile->kappa0()},
            {"C", d.profile->C()},
            {"interval", {d.zeta2, d.zeta1}},
            {"fiber", to_json(d.fiber)},
            {"boundary_components", d.boundary_components},
            {"boundary_radii", {d.radius2, d.radius1}},
            {"boundary_mean_curvatures", {d.mean_curv2, d.mean_curv1}},
            {"boundary_flux", {d.flux2, d.flux1}},
            {"interior_sign", d.interior_sign},
            {"quotient", d.quotient.has_value()},
            {"match", to_json(d.match)}};
  if (d.quotient) j["quotient_record"] = {{"involution", d.quotient->involution}, {"group", d.quotient->group}};
  return j;
}

json to_json(const RootCaseReport& r) {
  json j = {{"predicted", to_string(r.predicted)},
            {"label", r.label},
            {"C", r.C},
            {"lambda_at_zero_sign", r.lambda_at_zero_sign},
            {"observed", to_json(r.observed)},
            {"consistent", r.consistent}};
  if (r.C0) j["C0"] = *r.C0;
  if (r.theta) j["theta"] = *r.theta;
  if (r.phase) j["phase"] = *r.phase == Phase::Min ? "min" : "max";
  return j;
}

json to_json(const ResidualReport& r) {
  json j = {{"max_critical_residual", r.max_critical_residual},
            {"max_ss_residual", r.max_ss_residual},
            {"max_tan_residual", r.max_tan_residual},
            {"max_trace_residual", r.max_trace_residual},
            {"max_scal_deviation", r.max_scal_deviation},
            {"max_weyl_residual", r.max_weyl_residual},
            {"max_gauss_residual", r.max_gauss_residual},
            {"max_lambda_identity", r.max_lambda_identity},
            {"max_conservation", r.max_conservation},
            {"grid_size", r.grid_size},
            {"masked_points", r.masked_points},
            {"passed", r.passed}};
  if (r.max_einstein_residual) j["max_einstein_residual"] = *r.max_einstein_residual;
  if (r.min_ricci_gap) j["min_ricci_gap"] = *r.min_ricci_gap;
  return j;
}

json to_json(const ConformalReport& r) {
  return {{"max_residual", r.max_residual},
          {"max_kulkarni_nomizu", r.max_kulkarni_nomizu},
          {"used_points", r.used_points},
          {"masked_points", r.masked_points}};
}

json to_json(const SpectralResult& r) {
  return {{"gamma1", r.gamma1},
          {"error_bound", r.error_bound},
          {"sign", to_string(r.sign)},
          {"h", r.h},
          {"levels", r.levels},
          {"observed_order", r.observed_order},
          {"rayleigh", r.rayleigh},
          {"convention", r.convention},
          {"interval", {r.b1, r.b2}},
          {"literal",
           {{"convention", to_string(Convention::ROverNMinus1)},
            {"gamma1", r.gamma1_literal},
            {"error_bound", r.literal_error_bound},
            {"sign", to_string(r.literal_sign)}}}};
}

json to_json(const IdentityCheck& r) {
  return {{"ratio", r.ratio}, {"relative_error", r.relative_error}, {"levels", r.levels}};
}

json to_json(const Prop36Report& r) {
  return {{"phase", r.phase == Phase::Min ? "min" : "max"},
          {"s1", r.s1},
          {"theta", r.theta},
          {"C", r.C},
          {"matched_interval", {r.zeta2, r.zeta1}},
          {"zero_mode", to_json(r.zero_mode)},
          {"eigenvector_deviation", r.eigenvector_deviation},
          {"enlarged", to_json(r.enlarged)},
          {"matched", to_json(r.matched)},
          {"quotient", to_json(r.quotient)},
          {"identity", to_json(r.identity)},
          {"expected_matched_sign", to_string(r.expected_matched)},
          {"checks",
           {{"zero_mode", r.zero_ok},
            {"enlarged_negative", r.enlarged_ok},
            {"matched_sign", r.matched_ok},
            {"quotient_sign", r.quotient_ok},
            {"identity", r.identity_ok}}},
          {"passed", r.all_ok()}};
}

json to_json(const SchwarzschildForm& s) {
  json j = {{"params", to_json(s.params)},
            {"fiber_kappa0", 1.0},
            {"coefficient", "1/(1 - R r^2/(n(n-1)) - 2a r^(2-n)/(n-2))"},
            {"horizon_radius", s.horizon_radius},
            {"horizon_from_flow", s.horizon_from_flow},
            {"horizon_profile_r0", s.solution->r_at(0.0)}};
  if (s.theta) j["theta"] = *s.theta;
  if (s.exclusion_zeta) j["exclusion_zeta"] = *s.exclusion_zeta;
  return j;
}

OdeParams params_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidArgument, "params must be an object with n, R, a");
  for (const auto& [key, value] : j.items()) {
    if (key != "n" && key != "R" && key != "a") fail(ErrorKind::InvalidArgument, "unknown params key: " + key);
    if (!value.is_number()) fail(ErrorKind::InvalidArgument, "params." + key + " must be a number");
  }
  if (!j.contains("n") || !j.contains("R") || !j.contains("a"))
    fail(ErrorKind::InvalidArgument, "params needs n, R and a");
  if (!j["n"].is_number_integer()) fail(ErrorKind::InvalidArgument, "params.n must be an integer");
  OdeParams p{j["n"].get<int>(), j["R"].get<double>(), j["a"].get<double>()};
  p.validate();
  return p;
}

void apply_tolerances(Tolerances& tol, const json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidArgument, "tolerances must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) fail(ErrorKind::InvalidArgument, "tolerance " + key + " must be a number");
    if (!tol.set(key, value.get<double>())) fail(ErrorKind::InvalidArgument, "unknown tolerance: " + key);
  }
}

void write_profile_csv(std::ostream& os, const Profile& profile) {
  os << "s,r,rp,lam,lamp\n";
  const auto g = profile.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << format_double(g[i]) << ',' << format_double(profile.r()[i]) << ',' << format_double(profile.rp()[i]) << ','
       << format_double(profile.lam()[i]) << ',' << format_double(profile.lamp()[i]) << '\n';
  }
}

std::string profile_csv(const Profile& profile) {
  std::ostringstream os;
  write_profile_csv(os, profile);
  return os.str();
}

json profile_envelope(const Profile& profile, const Tolerances& tol, const std::string& csv_name,
                      const std::string& timestamp) {
  json j = {{"params", to_json(profile.params())},
            {"kappa0", profile.kappa0()},
            {"C", profile.C()},
            {"tolerances", to_json(tol)},
            {"roots", to_json(find_roots(profile, tol.root))},
            {"period", nullptr},
            {"theta", nullptr},
            {"grid_size", profile.size()},
            {"csv", csv_name},
            {"timestamp", timestamp}};
  if (profile.period()) j["period"] = *profile.period();
  if (profile.base().theta()) j["theta"] = *profile.base().theta();
  return j;
}

Profile profile_from_text(const std::string& csv, const json& envelope) {
  if (!envelope.is_object() || !envelope.contains("params") || !envelope.contains("kappa0"))
    fail(ErrorKind::InvalidArgument, "profile envelope needs params and kappa0");
  const auto params = params_from_json(envelope["params"]);
  const double kappa0 = envelope["kappa0"].get<double>();
  const double C = envelope.value("C", 0.0);

  std::istringstream is(csv);
  std::string line;
  if (!std::getline(is, line)) fail(ErrorKind::InvalidArgument, "empty profile CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "s,r,rp,lam,lamp") fail(ErrorKind::InvalidArgument, "profile CSV header must be s,r,rp,lam,lamp");

  RadialSolution::Columns cols;
  std::vector<double> lam, lamp;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    double v[5];
    const char* p = line.c_str();
    for (int k = 0; k < 5; ++k) {
      char* end = nullptr;
      v[k] = std::strtod(p, &end);
      if (end == p || !std::isfinite(v[k]))
        fail(ErrorKind::InvalidArgument, "malformed number in profile CSV row " + std::to_string(row));
      p = end;
      if (k < 4) {
        if (*p != ',') fail(ErrorKind::InvalidArgument, "expected 5 columns in row " + std::to_string(row));
        ++p;
      }
    }
    cols.grid.push_back(v[0]);
    cols.r.push_back(v[1]);
    cols.rp.push_back(v[2]);
    lam.push_back(v[3]);
    lamp.push_back(v[4]);
  }
  const auto n = cols.grid.size();
  cols.lam0.resize(n);
  cols.lam0p.resize(n);
  cols.energy_residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(cols.r[i] >= 0)) fail(ErrorKind::InvalidArgument, "negative r in profile CSV");
    cols.lam0[i] = lam[i] - C * cols.rp[i];
    cols.lam0p[i] = lamp[i] - C * params.rpp(cols.r[i]);
    cols.energy_residual[i] = cols.r[i] > 0 ? params.first_integral(cols.r[i], cols.rp[i]) - kappa0 : 0.0;
  }
  std::optional<double> period;
  if (envelope.contains("period") && envelope["period"].is_number()) period = envelope["period"].get<double>();
  auto base = std::make_shared<const RadialSolution>(params, kappa0, std::move(cols), false, period);
  return Profile(std::move(base), C, std::move(lam), std::move(lamp));
}

Profile load_profile(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
  json envelope;
  try {
    envelope = json::parse(read_text(json_path));
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed profile envelope: ") + e.what());
  }
  return profile_from_text(read_text(csv_path), envelope);
}

std::string cumulative_csv(const CumulativeTable& table) {
  std::ostringstream os;
  os << "s,G\n";
  for (std::size_t i = 0; i < table.nodes().size(); ++i)
    os << format_double(table.nodes()[i]) << ',' << format_double(table.values()[i]) << '\n';
  return os.str();
}

std::string curvature_csv(const Profile& profile, const FiberSpec& fiber,
                          std::optional<std::pair<double, double>> interval) {
  std::ostringstream os;
  os << "s,r,rp,lam,lamp,ric_ss,ric_tan,scal,hess_ss,hess_tan,lap,sec_rad,sec_tan,mean_curv,schouten_ss,schouten_tan\n";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto pt = profile.node(i);
    if (interval && (pt.s < interval->first || pt.s > interval->second)) continue;
    if (!(pt.r > 0)) continue;
    const auto c = curvature_sample(pt, profile.params(), fiber.kappa0);
    const double row[] = {c.s,   c.r,       c.rp,       c.lam,     c.lamp,    c.ric_ss,    c.ric_tan,   c.scal,
                          c.hess_ss, c.hess_tan, c.lap, c.sec_rad, c.sec_tan, c.mean_curv, c.schouten_ss,
                          c.schouten_tan};
    for (std::size_t k = 0; k < std::size(row); ++k) os << (k ? "," : "") << format_double(row[k]);
    os << '\n';
  }
  return os.str();
}

std::string eigenvector_csv(const SpectralResult& r) {
  std::ostringstream os;
  os << "s,phi\n";
  for (std::size_t i = 0; i < r.eigen_s.size(); ++i)
    os << format_double(r.eigen_s[i]) << ',' << format_double(r.eigen_phi[i]) << '\n';
  return os.str();
}

}  // namespace warpcrit::io
