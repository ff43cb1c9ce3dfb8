#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "warpcrit/errors.hpp"
#include "warpcrit/io.hpp"

using namespace warpcrit;
using io::json;

TEST_SUITE("io") {
  TEST_CASE("format_double reproduces the value exactly") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.904437239733059}) {
      CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
    }
  }

  TEST_CASE("profile round trip through CSV and envelope") {
    const Profile p = solve_lambda(integrate_r({4, -6, 2}, 1.0, 2.0), 0.37);
    const auto csv = io::profile_csv(p);
    CHECK(csv.rfind("s,r,rp,lam,lamp\n", 0) == 0);
    const auto env = io::profile_envelope(p, Tolerances{}, "p.csv", "2000-01-01T00:00:00Z");
    const auto back = io::profile_from_text(csv, json::parse(env.dump()));
    REQUIRE(back.size() == p.size());
    CHECK(back.kappa0() == p.kappa0());
    CHECK(back.C() == p.C());
    for (std::size_t i = 0; i < p.size(); i += 37) {
      CHECK(back.grid()[i] == p.grid()[i]);
      CHECK(back.r()[i] == p.r()[i]);
      CHECK(back.lam()[i] == p.lam()[i]);
      CHECK(back.base().lam0()[i] == doctest::Approx(p.base().lam0()[i]).epsilon(1e-15));
    }
    CHECK(back.lam_at(0.123) == doctest::Approx(p.lam_at(0.123)).epsilon(1e-15));
  }

  TEST_CASE("envelope contents") {
    const Profile p = solve_lambda(integrate_r({3, 6, 1}, 0.8, 8.0), 0.0);
    const auto env = io::profile_envelope(p, Tolerances{}, "p.csv", "T");
    for (const char* key : {"params", "kappa0", "C", "tolerances", "roots", "period", "theta", "grid_size", "csv"})
      CHECK(env.contains(key));
    CHECK(env["period"].is_number());
    CHECK(env["params"]["n"] == 3);
    CHECK(env["tolerances"]["rtol"] == 1e-10);
  }

  TEST_CASE("params and tolerance parsing") {
    const auto p = io::params_from_json(json::parse(R"({"n": 4, "R": -6, "a": 0.5})"));
    CHECK(p.n == 4);
    CHECK(p.R == -6);
    CHECK_THROWS_AS((void)io::params_from_json(json::parse(R"({"n": 4.5, "R": 0, "a": 1})")), Error);
    CHECK_THROWS_AS((void)io::params_from_json(json::parse(R"({"n": 4, "R": 0})")), Error);
    CHECK_THROWS_AS((void)io::params_from_json(json::parse(R"({"n": 4, "R": 0, "a": 1, "b": 2})")), Error);
    Tolerances t;
    io::apply_tolerances(t, json::parse(R"({"critical": 1e-6})"));
    CHECK(t.critical == 1e-6);
    CHECK_THROWS_AS(io::apply_tolerances(t, json::parse(R"({"nonsense": 1})")), Error);
  }

  TEST_CASE("malformed CSV is rejected") {
    const auto env = json::parse(R"({"params": {"n": 3, "R": 0, "a": 1}, "kappa0": 2, "C": 0})");
    CHECK_THROWS_AS((void)io::profile_from_text("x,y\n", env), Error);
    CHECK_THROWS_AS((void)io::profile_from_text("s,r,rp,lam,lamp\n0,1,0,abc,0\n", env), Error);
    CHECK_THROWS_AS((void)io::profile_from_text("s,r,rp,lam,lamp\n0,1,0\n", env), Error);
  }

  TEST_CASE("atomic write leaves no temporary behind") {
    const auto dir = std::filesystem::temp_directory_path() / "warpcrit_io_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    io::write_text_atomic(dir / "a.txt", "hello\n");
    io::write_text_atomic(dir / "a.txt", "world\n");
    CHECK(io::read_text(dir / "a.txt") == "world\n");
    CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("report serialization") {
    const auto d = build_example2({3, 0, 1}, 1.0);
    const auto j = io::to_json(d);
    CHECK(j.contains("quotient_record"));
    const auto m = io::to_json(d.match);
    CHECK(m["zeta1"].get<double>() == d.match.zeta1);
  }
}
