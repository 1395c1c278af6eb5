#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "envstab/config.hpp"
#include "envstab/error.hpp"
#include "envstab/report.hpp"

using namespace envstab;

namespace {

const char* kRicker = R"(description: test
models:
  - family: ricker
    params: {r: 1.8}
  - family: ricker
    params: {r: 1.2}
    x_max: 30
envelopes:
  - kind: mobius
    alpha: 0.5
grid: {seed_cells: 512, exclusion_radius: 0.001}
)";

std::string config_path(const std::string& name) {
  return std::string(ENVSTAB_CONFIG_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("parse a YAML configuration") {
  SystemConfig cfg = parse_system_config_text(kRicker);
  CHECK(cfg.description == "test");
  REQUIRE(cfg.models.size() == 2);
  CHECK(cfg.models[0].family == "ricker");
  CHECK(cfg.models[0].params.at("r") == 1.8);
  CHECK(cfg.models[1].x_max == 30.0);
  REQUIRE(cfg.envelopes.size() == 1);
  CHECK(cfg.envelopes[0].alpha == 0.5);

  GridConfig g = grid_config(cfg);
  CHECK(g.seed_cells == 512);
  CHECK(g.exclusion_radius == 0.001);
  CHECK(g.max_refinement_depth == GridConfig{}.max_refinement_depth);

  PeriodicSystem sys = build_system(cfg);
  CHECK(sys.p() == 2);
  CHECK(build_envelopes(cfg)[0].alpha() == 0.5);
}

TEST_CASE("JSON documents are accepted") {
  SystemConfig cfg = parse_system_config_text(
      R"({"models": [{"family": "generalized_beverton_holt", "params": {"mu": 3, "c": 2}}],
          "envelopes": [{"kind": "reciprocal"}]})");
  CHECK(cfg.models[0].params.at("mu") == 3.0);
  CHECK(cfg.envelopes[0].kind == "reciprocal");
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(parse_system_config_text("models: ["), ConfigError);
  CHECK_THROWS_AS(parse_system_config_text("models: []"), ConfigError);
  try {
    parse_system_config_text("models:\n  - family: ricker\n    params: {r: 1}\n    colour: red\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("colour") != std::string::npos);
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(parse_system_config_text("models:\n  - family: logistic\n    params: {r: 1}\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_system_config_text("models:\n  - family: ricker\n    params: {r: -1}\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_system_config_text(
                      "models:\n  - family: ricker\n    params: {r: 1}\nenvelopes:\n  - kind: mobius\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_system_config(config_path("does_not_exist.cfg")), ConfigError);
}

TEST_CASE("configurations round-trip through serialization") {
  SystemConfig cfg = parse_system_config_text(kRicker);
  CHECK(parse_system_config_text(serialize_config(cfg)) == cfg);

  for (const char* name : {"ricker3.cfg", "bh_counterexample.cfg", "piecewise_pair.cfg",
                           "harvesting.cfg", "ricker_pair.cfg"}) {
    CAPTURE(name);
    SystemConfig c = parse_system_config(config_path(name));
    CHECK(parse_system_config_text(serialize_config(c)) == c);
  }
}

TEST_CASE("custom tables in configurations") {
  SystemConfig cfg = parse_system_config_text(R"(models:
  - family: custom_table
    pieces:
      - from: 0
        atoms: [{type: exp, k: 2.718281828459045, e: 1, s: -1}]
)");
  PopulationModel m = build_model(cfg.models[0]);
  CHECK(m.eval(0.5) == doctest::Approx(0.5 * std::exp(0.5)));
  CHECK(parse_system_config_text(serialize_config(cfg)) == cfg);
}

TEST_CASE("JSON numbers and reports") {
  CHECK(number(1.5) == Json(1.5));
  CHECK(number(std::numeric_limits<double>::infinity()) == Json("inf"));
  CHECK(number(-std::numeric_limits<double>::infinity()) == Json("-inf"));
  CHECK(number(std::nan("")) == Json("nan"));

  ReportDocument doc{"axioms", Json{{"b", 1}, {"a", 2}}, Json::object(), GridConfig{}, std::nullopt};
  std::string text = emit_json(doc);
  Json parsed = Json::parse(text);
  CHECK(parsed["command"] == "axioms");
  CHECK(parsed.contains("tolerances"));
  CHECK_FALSE(parsed.contains("duration_seconds"));
  // Keys are sorted.
  CHECK(text.find("\"a\"") < text.find("\"b\""));
  CHECK(emit_json(doc) == text);

  doc.duration_seconds = 0.25;
  CHECK(Json::parse(emit_json(doc))["duration_seconds"] == 0.25);
}

TEST_CASE("CSV output") {
  CHECK(csv_number(0.1) == "0.1");
  CHECK(csv_number(std::nan("")).empty());
  CHECK(std::stod(csv_number(1.0 / 3.0)) == 1.0 / 3.0);

  CsvTable t = orbit_table({0.1, 0.2});
  t.comments.push_back("orbit");
  std::string csv = emit_csv(t);
  CHECK(csv.rfind("# orbit\n", 0) == 0);
  CHECK(csv.find("0.2") != std::string::npos);
}

TEST_CASE("plot data") {
  std::vector<PlotSeries> series{{"identity", [](double x) { return x; }},
                                 {"reciprocal", [](double x) { return 1.0 / x; }}};
  PlotData d = sample_plot(series, {0.0, 2.0}, 5);
  REQUIRE(d.xs.size() == 5);
  CHECK(d.xs.front() == 0.0);
  CHECK(d.xs.back() == 2.0);
  CHECK(d.values[0][2] == 1.0);
  CHECK_THROWS_AS(sample_plot(series, {0.0, 1.0}, 1), InvalidArgument);

  CsvTable t = plot_table(d);
  CHECK(t.header.size() == 3);
  std::string svg = plot_svg(d);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
}
