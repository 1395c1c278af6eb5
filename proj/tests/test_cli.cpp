#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"

using nlohmann::json;
namespace cli = envstab::cli;

namespace {

std::string config_path(const std::string& name) {
  return std::string(ENVSTAB_CONFIG_DIR) + "/" + name;
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = cli::run_command(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

TEST_CASE("certify exit codes for the bundled configurations") {
  const std::vector<std::pair<std::string, int>> expected{
      {"ricker3.cfg", 0},          {"ricker_pair.cfg", 0}, {"bh_classic.cfg", 0},
      {"mixing.cfg", 0},           {"exp_rational.cfg", 0},     {"quadratic.cfg", 0},
      {"harvesting.cfg", 0},       {"piecewise_pair.cfg", 1}};
  for (const auto& [name, code] : expected) {
    CAPTURE(name);
    Run r = run({"certify", config_path(name), "--grid-cells", "1024", "--alpha-grid", "100"});
    CHECK(r.code == code);
    json doc = json::parse(r.out);
    CHECK(doc["command"] == "certify");
    CHECK(doc["payload"]["certificate"].contains("status"));
  }
}

TEST_CASE("certify reports the Ricker certificate") {
  Run r = run({"certify", config_path("ricker3.cfg")});
  REQUIRE(r.code == cli::kExitSuccess);
  json doc = json::parse(r.out);
  CHECK(doc["payload"]["certificate"]["status"] == "CertifiedGlobal");
  CHECK(doc["payload"]["certificate"]["multiplier"].get<double>() == doctest::Approx(0.08));
  CHECK_FALSE(doc.contains("duration_seconds"));
  // Byte-identical reruns.
  CHECK(run({"certify", config_path("ricker3.cfg")}).out == r.out);

  Run timed = run({"certify", config_path("ricker3.cfg"), "--timing"});
  CHECK(json::parse(timed.out).contains("duration_seconds"));
}

TEST_CASE("failed certificates carry a diagnosis") {
  Run r = run({"certify", config_path("piecewise_pair.cfg")});
  CHECK(r.code == cli::kExitNegative);
  json doc = json::parse(r.out);
  CHECK(doc["payload"]["certificate"]["status"] == "NotPopulationModel");
  CHECK(doc["payload"].contains("diagnosis"));
}

TEST_CASE("other subcommands") {
  CHECK(run({"axioms", config_path("ricker3.cfg")}).code == 0);
  CHECK(run({"envelope-check", config_path("ricker3.cfg")}).code == 0);
  CHECK(run({"mobius-fit", config_path("ricker3.cfg"), "--alpha-grid", "100"}).code == 0);
  CHECK(run({"schwarzian", config_path("ricker3.cfg")}).code == 0);
  CHECK(run({"conditions", config_path("ricker3.cfg")}).code == 0);

  Run cycles = run({"cycles", config_path("ricker3.cfg"), "--r-max", "2"});
  CHECK(cycles.code == 0);
  CHECK(json::parse(cycles.out)["payload"].dump().find("cycles") != std::string::npos);

  Run orbit = run({"orbit", config_path("ricker3.cfg"), "--format", "csv", "--periods", "5"});
  CHECK(orbit.code == 0);
  CHECK(orbit.out.find("0.1") != std::string::npos);

  Run svg = run({"plot-data", config_path("ricker3.cfg"), "--format", "svg", "--samples", "50"});
  CHECK(svg.code == 0);
  CHECK(svg.out.find("<svg") != std::string::npos);
}

TEST_CASE("usage and input errors exit with 3") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"certify"}).code == cli::kExitUsage);
  CHECK(run({"frobnicate", config_path("ricker3.cfg")}).code == cli::kExitUsage);
  Run missing = run({"certify", config_path("nope.cfg")});
  CHECK(missing.code == cli::kExitUsage);
  CHECK_FALSE(missing.err.empty());
  CHECK(run({"conditions", config_path("piecewise_pair.cfg")}).code == cli::kExitUsage);
}

TEST_CASE("reports can be written to files") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "envstab_cli_test";
  fs::create_directories(dir);
  fs::path out = dir / "report.json";
  CHECK(run({"axioms", config_path("ricker3.cfg"), "--out", out.string()}).code == 0);
  std::ifstream in(out);
  CHECK(json::parse(in)["command"] == "axioms");
  fs::remove_all(dir);
}
