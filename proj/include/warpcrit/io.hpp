#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "warpcrit/boundary_match.hpp"
#include "warpcrit/geometry_check.hpp"
#include "warpcrit/profile_ode.hpp"
#include "warpcrit/spectral.hpp"

namespace warpcrit::io {

using nlohmann::json;

/// 17 significant digits, enough to reproduce any double exactly.
[[nodiscard]] std::string format_double(double v);

/// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
[[nodiscard]] std::string read_text(const std::filesystem::path& path);

[[nodiscard]] std::string utc_timestamp();

[[nodiscard]] json to_json(const OdeParams& p);
[[nodiscard]] json to_json(const Tolerances& t);
[[nodiscard]] json to_json(const RootSet& r);
[[nodiscard]] json to_json(const FiberSpec& f);
[[nodiscard]] json to_json(const MatchResult& m);
[[nodiscard]] json to_json(const MatchedDomain& d);
[[nodiscard]] json to_json(const RootCaseReport& r);
[[nodiscard]] json to_json(const ResidualReport& r);
[[nodiscard]] json to_json(const ConformalReport& r);
[[nodiscard]] json to_json(const SpectralResult& r);
[[nodiscard]] json to_json(const IdentityCheck& r);
[[nodiscard]] json to_json(const Prop36Report& r);
[[nodiscard]] json to_json(const SchwarzschildForm& s);

/// Parses {"n", "R", "a"}; throws Error(InvalidArgument) on bad input.
[[nodiscard]] OdeParams params_from_json(const json& j);
/// Applies {"name": value} overrides; unknown names are rejected.
void apply_tolerances(Tolerances& tol, const json& j);

/// CSV with header s,r,rp,lam,lamp.
void write_profile_csv(std::ostream& os, const Profile& profile);
[[nodiscard]] std::string profile_csv(const Profile& profile);

/// Envelope describing a profile: params, kappa0, C, tolerances, roots, period,
/// the CSV file name and a timestamp (the only non-deterministic field).
[[nodiscard]] json profile_envelope(const Profile& profile, const Tolerances& tol, const std::string& csv_name,
                                    const std::string& timestamp);

/// Rebuilds a Profile from its CSV columns and JSON envelope.
[[nodiscard]] Profile load_profile(const std::filesystem::path& csv_path, const std::filesystem::path& json_path);
[[nodiscard]] Profile profile_from_text(const std::string& csv, const json& envelope);

[[nodiscard]] std::string cumulative_csv(const CumulativeTable& table);
[[nodiscard]] std::string curvature_csv(const Profile& profile, const FiberSpec& fiber,
                                        std::optional<std::pair<double, double>> interval = std::nullopt);
[[nodiscard]] std::string eigenvector_csv(const SpectralResult& r);

}  // namespace warpcrit::io
