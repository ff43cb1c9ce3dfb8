#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "warpcrit/io.hpp"

namespace fs = std::filesystem;
using warpcrit::io::json;

#ifdef WARPCRIT_CLI_PATH

namespace {

struct Sandbox {
  fs::path dir;
  explicit Sandbox(const std::string& name) : dir(fs::temp_directory_path() / ("warpcrit_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }

  fs::path write(const std::string& file, const std::string& text) const {
    warpcrit::io::write_text_atomic(dir / file, text);
    return dir / file;
  }

  int run(const std::string& command, const fs::path& config, const std::string& extra = "") const {
    const std::string cmd = std::string("\"") + WARPCRIT_CLI_PATH + "\" " + command + " --config \"" +
                            config.string() + "\" --out \"" + dir.string() + "\" " + extra + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  json read(const std::string& file) const { return json::parse(warpcrit::io::read_text(dir / file)); }
};

const char* kBase = R"({"params": {"n": 3, "R": 0, "a": 1}, "r0": 1.0, "s_max": 3})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("construct then verify from disk") {
    Sandbox box("construct");
    CHECK(box.run("construct", box.write("c.json", kBase)) == 0);
    CHECK(fs::exists(box.dir / "profile.csv"));
    const auto env = box.read("profile.json");
    CHECK(env["kappa0"].get<double>() == doctest::Approx(2.0));
    const auto v = box.write("v.json", R"({"profile": {"csv": "profile.csv", "json": "profile.json"}})");
    CHECK(box.run("verify", v) == 0);
    const auto rep = box.read("verify.json");
    for (const char* key : {"command", "params", "residuals", "verdict", "tolerances"}) CHECK(rep.contains(key));
    CHECK(rep["verdict"] == "pass");
  }

  TEST_CASE("construct is deterministic apart from the timestamp") {
    Sandbox a("det_a"), b("det_b");
    REQUIRE(a.run("construct", a.write("c.json", kBase), "--seedless") == 0);
    REQUIRE(b.run("construct", b.write("c.json", kBase)) == 0);
    auto ja = a.read("profile.json"), jb = b.read("profile.json");
    ja.erase("timestamp");
    jb.erase("timestamp");
    CHECK(ja == jb);
    CHECK(warpcrit::io::read_text(a.dir / "profile.csv") == warpcrit::io::read_text(b.dir / "profile.csv"));
  }

  TEST_CASE("verification failures exit with 1") {
    Sandbox box("fail");
    const auto slope = box.write(
        "p.json", R"({"params": {"n": 3, "R": 0, "a": 1}, "r0": 1.0, "s_max": 3, "perturb": {"lambda_slope": 1e-3}})");
    CHECK(box.run("verify", slope) == 1);
    CHECK(box.read("verify.json")["verdict"] == "fail");
    const auto fiber = box.write(
        "f.json", R"({"params": {"n": 3, "R": 0, "a": 1}, "r0": 1.0, "s_max": 3, "fiber": {"kappa0": 2.01, "dim": 2}})");
    CHECK(box.run("verify", fiber) == 1);
  }

  TEST_CASE("input errors exit with 2") {
    Sandbox box("input");
    CHECK(box.run("construct", box.write("bad.json", "{not json")) == 2);
    CHECK(box.run("construct", box.dir / "missing.json") == 2);
    CHECK(box.run("construct", box.write("k.json", R"({"params": {"n": 3, "R": 0, "a": 1}, "r0": 1, "bogus": 1})")) == 2);
    CHECK(box.run("construct", box.write("n.json", R"({"params": {"n": 2, "R": 0, "a": 1}, "r0": 1})")) == 2);
    CHECK(box.run("construct", box.write("ok.json", kBase), "--seedless=1") == 2);
    CHECK(box.run("construct", box.dir / "ok.json", "--tol nonsense=1") == 2);
    CHECK(box.run("example2", box.write("e.json", R"({"params": {"n": 3, "R": 0, "a": 1}, "r0": 1,
        "fiber": {"kappa0": 2, "free_involution": false}})")) == 2);
    CHECK(box.run("schwarzschild", box.write("s.json", R"({"params": {"n": 3, "R": 6, "a": 1}})")) == 2);
  }

  TEST_CASE("other commands succeed") {
    Sandbox box("others");
    CHECK(box.run("match", box.write("m.json", R"({"params": {"n": 3, "R": -6, "a": 1}, "r0": 1, "zeta1": 1.2,
        "table": true})")) == 0);
    CHECK(fs::exists(box.dir / "cumulative.csv"));
    CHECK(box.run("spectrum", box.write("sp.json", R"({"params": {"n": 3, "R": 6, "a": 1}, "r0": 0.8, "C": 0.3,
        "prop36": true})")) == 0);
    CHECK(box.run("schwarzschild", box.write("sw.json", R"({"params": {"n": 3, "R": 0, "a": 0.5},
        "outer_radii": [2, 4, 10]})")) == 0);
    CHECK(box.run("example1", box.write("e1.json", R"({"params": {"n": 3, "R": 0, "a": 1}, "r0": 1, "zeta1": 1.5})")) == 0);
    CHECK(box.run("example2", box.write("e2.json", R"({"params": {"n": 3, "R": 0, "a": 1}, "r0": 1})")) == 0);
    CHECK(box.read("example2.json")["domain"].contains("quotient_record"));
  }
}

#endif
