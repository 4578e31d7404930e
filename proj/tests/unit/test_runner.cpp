#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "kbsyk/runner.hpp"
#include "support.hpp"

using namespace kbsyk;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kbsyk_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

RunConfig small_quench(const fs::path& out) {
  RunConfig c;
  c["scenario"] = "quench";
  c["j"] = 0.5;
  c["beta_init"] = 2.4;
  c["baths"] = RunConfig::array({"beta=0.5,v=0.4,n=3"});
  c["lambda_t"] = 5.0;
  c["dt"] = 0.1;
  c["out"] = out.string();
  return c;
}

std::string error_of(const RunConfig& c) {
  try {
    validate_config(c);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int cli(const std::string& args) {
  const char* exe = std::getenv("KBSYK_CLI");
  if (!exe) return -1;
  const int status = std::system((std::string(exe) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config validation names every problem") {
  RunConfig c = RunConfig::object();
  c["scenario"] = "quench";
  c["betta"] = 1.0;
  c["colour"] = "red";
  const std::string msg = error_of(c);
  for (const char* k : {"betta", "colour", "j", "beta_init", "baths", "lambda_t", "dt"}) {
    CAPTURE(k);
    CHECK(msg.find(k) != std::string::npos);
  }
  CHECK(error_of(RunConfig::object()).find("scenario") != std::string::npos);

  RunConfig e;
  e["scenario"] = "sideways";
  CHECK(error_of(e).find("unknown scenario") != std::string::npos);
  CHECK(error_of(small_quench("x")).empty());
}

TEST_CASE("overrides") {
  RunConfig c = small_quench("x");
  apply_override(c, "dt=0.05");
  apply_override(c, "method=causal");
  apply_override(c, "baths=[\"beta=1,v=0.2\"]");
  CHECK(c["dt"].get<double>() == 0.05);
  CHECK(c["method"] == "causal");
  CHECK(c["baths"].size() == 1);
  CHECK_THROWS_AS(apply_override(c, "novalue"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "=3"), ConfigError);
}

TEST_CASE("bad values surface as config errors") {
  const auto dir = scratch_dir("bad");
  RunConfig c = small_quench(dir);
  c["baths"] = RunConfig::array({"beta=0.5,w=0.4"});
  CHECK_THROWS_AS(run(c, std::cout), ConfigError);
  c = small_quench(dir);
  c["dt"] = "fine";
  CHECK_THROWS_AS(run(c, std::cout), ConfigError);
  c = small_quench(dir);
  c["method"] = "leapfrog";
  CHECK_THROWS_AS(run(c, std::cout), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("runs are reproducible and replayable from their manifest") {
  const auto dir = scratch_dir("repro");
  std::ostringstream log;
  run(small_quench(dir / "a"), log);
  run(small_quench(dir / "b"), log);
  CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
  CHECK(slurp(dir / "a" / "greater.snap") == slurp(dir / "b" / "greater.snap"));

  RunConfig replay = load_config((dir / "a" / "manifest.json").string());
  CHECK(replay == small_quench(dir / "a"));
  replay["out"] = (dir / "c").string();
  run(replay, log);
  CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "c" / "trace.csv"));

  const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  for (const char* k : {"scenario", "config", "versions", "timings", "outputs", "summary"}) CHECK(manifest.contains(k));

  SUBCASE("comparing a run with itself finds no crossing") {
    const auto j = compare_runs({(dir / "a").string(), (dir / "b").string()}, {}, log);
    REQUIRE(j["pairs"].size() == 1);
    CHECK(j["pairs"][0]["crossings"].empty());
  }
  SUBCASE("comparison refuses runs on different lattices") {
    RunConfig other = small_quench(dir / "d");
    other["lambda_t"] = 4.0;
    run(other, log);
    CHECK_THROWS_AS(compare_runs({(dir / "a").string(), (dir / "d").string()}, {}, log), DomainError);
  }
  fs::remove_all(dir);
}

TEST_CASE("equilibrium scenario") {
  const auto dir = scratch_dir("eq");
  RunConfig c;
  c["scenario"] = "equilibrium";
  c["j"] = 0.5;
  c["beta"] = 1.0;
  c["out"] = dir.string();
  std::ostringstream log;
  const auto r = run(c, log);
  CHECK(r.summary["sum_rule"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(fs::exists(dir / "spectral.csv"));
  CHECK(slurp(dir / "spectral.csv").rfind("omega,re_gr,im_gr,a\n", 0) == 0);
  const auto g = read_snapshot((dir / "greater.snap").string());
  CHECK(diagonal_residual(g) == 0.0);
  fs::remove_all(dir);
}

TEST_CASE("command-line exit codes") {
  if (!std::getenv("KBSYK_CLI")) {
    MESSAGE("KBSYK_CLI not set; skipping");
    return;
  }
  const auto dir = scratch_dir("cli");
  CHECK(cli("--help") == 0);
  CHECK(cli("quench --beta-init 1 --frobnicate 2") == kExitConfig);
  CHECK(cli("run " + (dir / "missing.json").string()) == kExitConfig);
  CHECK(cli("equilibrium --beta -1 --out " + (dir / "neg").string()) == kExitConfig);
  CHECK(cli("mpc-compare --lambda-t 5") == kExitConfig);
  CHECK(cli("threshold-scan --lambda-t 5 --dt 0.1 --bath beta=0.5,n=3 --v-lo 0 --v-hi 0.02 --method causal --out " +
            (dir / "scan").string()) == kExitBracket);
  CHECK(cli("equilibrium --beta 1 --out " + (dir / "ok").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "manifest.json"));
  CHECK(cli("run " + (dir / "ok" / "manifest.json").string() + " --set out=" + (dir / "again").string()) == 0);
  CHECK(slurp(dir / "ok" / "spectral.csv") == slurp(dir / "again" / "spectral.csv"));
  fs::remove_all(dir);
}
