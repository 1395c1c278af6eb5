#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include "envstab/axioms.hpp"
#include "envstab/certifier.hpp"
#include "envstab/config.hpp"
#include "envstab/envelope.hpp"
#include "envstab/error.hpp"
#include "envstab/periodic_system.hpp"
#include "envstab/report.hpp"

namespace envstab::cli {

namespace {

struct Options {
  std::string command;
  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<int> grid_cells;
  std::optional<double> tol;
  double x0 = 0.1;
  std::size_t periods = 100;
  std::size_t r_max = 2;
  std::size_t samples = 500;
  std::size_t alpha_grid = 1000;
  bool timing = false;
};

struct Outcome {
  int exit_code = kExitSuccess;
  Json payload;
  CsvTable table;
  std::optional<PlotData> plot;
};

int worst(int a, int b) {
  // negative results dominate inconclusive ones
  if (a == kExitNegative || b == kExitNegative) return kExitNegative;
  return std::max(a, b);
}

int axiom_code(const AxiomReport& r) {
  if (r.is_population_model) return kExitSuccess;
  return r.only_unresolved() ? kExitInconclusive : kExitNegative;
}

CsvTable witness_table(const StabilityCertificate& cert) {
  CsvTable t;
  t.header = {"label", "x", "value"};
  t.comments.push_back("status " + std::string(to_string(cert.status)) + ", multiplier " + csv_number(cert.multiplier));
  for (const auto& w : cert.witnesses) t.rows.push_back({w.label, csv_number(w.x), csv_number(w.value)});
  for (const auto& u : cert.unresolved) t.rows.push_back({"unresolved", csv_number(u.lo), ""});
  return t;
}

Outcome run_certify(const SystemConfig& config, const PeriodicSystem& sys, const GridConfig& grid,
                    const Options& opt) {
  CertifyOptions co;
  co.alpha_grid = opt.alpha_grid;
  const StabilityCertificate cert = certify_global_stability(sys, build_envelopes(config), grid, co);
  Outcome o;
  o.exit_code = status_exit_code(cert.status);
  o.payload = Json{{"certificate", to_json(cert)}};
  if (cert.status == CertificateStatus::NotPopulationModel || cert.status == CertificateStatus::EnvelopeNotFound) {
    const FailureDiagnosis diag = diagnose_failure(sys, grid);
    o.payload["diagnosis"] = to_json(diag);
  }
  o.table = witness_table(cert);
  return o;
}

Outcome run_axioms(const PeriodicSystem& sys, const GridConfig& grid) {
  Outcome o;
  Json maps = Json::array();
  std::vector<NamedSignReport> rows;
  for (std::size_t i = 0; i < sys.p(); ++i) {
    const AxiomReport r = verify_population_axioms(sys.map(i), grid);
    maps.push_back(Json{{"model", sys.map(i).describe()}, {"c1", sys.map(i).is_c1()}, {"axioms", to_json(r)}});
    o.exit_code = worst(o.exit_code, axiom_code(r));
    for (const auto& c : r.checks) rows.push_back({"map" + std::to_string(i) + "." + c.name, c.report});
  }
  const FailureDiagnosis diag = diagnose_failure(sys, grid);
  o.exit_code = worst(o.exit_code, axiom_code(diag.composition));
  if (!diag.extra_fixed_points.empty()) o.exit_code = kExitNegative;
  for (const auto& c : diag.composition.checks) rows.push_back({"composition." + c.name, c.report});
  o.payload = Json{{"maps", maps},
                   {"composition", to_json(diag.composition)},
                   {"composition_extra_fixed_points", diag.extra_fixed_points}};
  o.table = sign_table(rows);
  return o;
}

Outcome run_envelope_check(const SystemConfig& config, const PeriodicSystem& sys, const GridConfig& grid) {
  const auto envelopes = build_envelopes(config);
  if (envelopes.empty()) throw InvalidArgument("envelope-check needs at least one entry under 'envelopes'");
  Outcome o;
  o.exit_code = kExitNegative;
  bool undecided = false;
  Json results = Json::array();
  std::vector<NamedSignReport> rows;
  for (std::size_t e = 0; e < envelopes.size(); ++e) {
    const Envelope& h = envelopes[e];
    const InvolutionCheck inv = check_involution(h, grid);
    const DecreasingCheck dec = check_decreasing(h, grid);
    const auto verdicts = common_envelope(h, sys, grid);
    Json sandwiches = Json::array();
    for (const auto& f : sys.maps()) sandwiches.push_back(to_json(sandwich_check(h, f, grid)));
    Json jv = Json::array();
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      jv.push_back(to_json(verdicts[i]));
      const std::string base = "envelope" + std::to_string(e) + ".map" + std::to_string(i);
      rows.push_back({base + ".below_one", verdicts[i].lower});
      rows.push_back({base + ".above_one", verdicts[i].upper});
      if (!verdicts[i].envelops && !verdicts[i].definite_failure()) undecided = true;
    }
    const bool structural = inv.passes() && dec.decreasing;
    const bool passes = structural && all_envelop(verdicts);
    if (passes) o.exit_code = kExitSuccess;
    results.push_back(Json{{"envelope", to_json(h)},
                           {"involution", to_json(inv)},
                           {"decreasing", to_json(dec)},
                           {"verdicts", jv},
                           {"sandwich", sandwiches},
                           {"passes", passes}});
  }
  if (o.exit_code != kExitSuccess && undecided) o.exit_code = kExitInconclusive;
  o.payload = Json{{"envelopes", results}};
  o.table = sign_table(rows);
  return o;
}

Outcome run_mobius_fit(const PeriodicSystem& sys, const GridConfig& grid, const Options& opt) {
  const MobiusFit fit = fit_mobius(sys, opt.alpha_grid, grid);
  Outcome o;
  o.exit_code = fit.empty() ? kExitNegative : kExitSuccess;
  o.payload = Json{{"mobius_fit", to_json(fit)}};
  o.table.header = {"alpha_lo", "alpha_hi"};
  for (const auto& r : fit.feasible) o.table.rows.push_back({csv_number(r.lo), csv_number(r.hi)});
  return o;
}

Outcome run_cycles(const PeriodicSystem& sys, const GridConfig& grid, const Options& opt) {
  const FixedPointScan fps = find_fixed_points(sys, grid);
  const CycleScan cycles = find_geometric_cycles(sys, opt.r_max, grid);
  Outcome o;
  o.payload = Json{{"fixed_points", to_json(fps)}, {"cycles", to_json(cycles)}};
  o.table.header = {"cycle", "r", "s", "t", "x", "map"};
  for (std::size_t c = 0; c < cycles.cycles.size(); ++c) {
    const auto& cy = cycles.cycles[c];
    for (std::size_t t = 0; t < cy.complete.size(); ++t) {
      o.table.rows.push_back({std::to_string(c), std::to_string(cy.r), std::to_string(cy.s), std::to_string(t),
                              csv_number(cy.complete[t].first), std::to_string(cy.complete[t].second)});
    }
  }
  return o;
}

Outcome run_orbit(const PeriodicSystem& sys, const Options& opt) {
  Outcome o;
  const std::vector<double> orbit = iterate_orbit(sys, opt.x0, opt.periods);
  const double final_x = orbit.back();
  o.payload = Json{{"x0", opt.x0},
                   {"periods", opt.periods},
                   {"orbit", [&] {
                      Json a = Json::array();
                      for (double x : orbit) a.push_back(number(x));
                      return a;
                    }()},
                   {"final", number(final_x)},
                   {"distance_to_fixed_point", number(std::abs(final_x - 1.0))}};
  o.table = orbit_table(orbit);
  return o;
}

Outcome run_schwarzian(const PeriodicSystem& sys, const GridConfig& grid) {
  Outcome o;
  Json maps = Json::array();
  o.table.header = {"map", "passes", "critical_points", "min_margin", "local_multiplier"};
  for (std::size_t i = 0; i < sys.p(); ++i) {
    const SchwarzianVerdict v = schwarzian_test(sys.map(i), grid);
    maps.push_back(Json{{"model", sys.map(i).describe()}, {"schwarzian", to_json(v)}});
    if (!v.passes) o.exit_code = kExitNegative;
    std::string crit;
    for (double c : v.critical_points) crit += (crit.empty() ? "" : ";") + csv_number(c);
    o.table.rows.push_back({std::to_string(i), v.passes ? "true" : "false", crit, csv_number(v.min_margin),
                            csv_number(v.local_multiplier)});
  }
  o.payload = Json{{"maps", maps}};
  return o;
}

Outcome run_conditions(const PeriodicSystem& sys) {
  const ClosedFormReport r = closed_form_conditions(sys);
  Outcome o;
  o.exit_code = r.all_pass ? kExitSuccess : kExitNegative;
  o.payload = Json{{"conditions", to_json(r)}};
  o.table.header = {"map", "family", "condition", "passes", "multiplier"};
  for (const auto& c : r.maps) {
    o.table.rows.push_back({std::to_string(c.index), c.family, c.condition, c.passes ? "true" : "false",
                            csv_number(c.multiplier)});
  }
  o.table.comments.push_back("product " + csv_number(r.product) + ", aggregate " + (r.all_pass ? "pass" : "fail"));
  return o;
}

Outcome run_plot(const SystemConfig& config, const PeriodicSystem& sys, const Options& opt) {
  std::vector<PlotSeries> series;
  for (std::size_t i = 0; i < sys.p(); ++i) series.push_back({"f" + std::to_string(i), sys.map(i).as_function()});
  series.push_back({"Phi_p", period_map(sys)});
  const auto envelopes = build_envelopes(config);
  for (std::size_t e = 0; e < envelopes.size(); ++e) series.push_back({"h" + std::to_string(e), envelopes[e].as_function()});
  series.push_back({"diagonal", [](double x) { return x; }});

  const Interval range = make_interval(0.0, std::min(2.5, sys.working_interval().hi));
  Outcome o;
  o.plot = sample_plot(series, range, opt.samples);
  o.table = plot_table(*o.plot);
  Json cols = Json::object();
  for (std::size_t j = 0; j < o.plot->names.size(); ++j) {
    Json a = Json::array();
    for (double v : o.plot->values[j]) a.push_back(number(v));
    cols[o.plot->names[j]] = a;
  }
  o.payload = Json{{"x", o.plot->xs}, {"series", cols}, {"notes", o.plot->notes}};
  return o;
}

std::string default_output_path(const Options& opt, const std::string& ext) {
  const char* dir = std::getenv("ENVSTAB_OUTPUT_DIR");
  if (!opt.out_path.empty()) return opt.out_path;
  if (dir == nullptr || *dir == '\0') return "";
  const std::string stem = std::filesystem::path(opt.config_path).stem().string();
  return (std::filesystem::path(dir) / (stem + "." + opt.command + "." + ext)).string();
}

int execute(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  const SystemConfig config = parse_system_config(opt.config_path);
  GridConfig grid = grid_config(config);
  if (opt.grid_cells) grid.seed_cells = *opt.grid_cells;
  if (opt.tol) grid.abs_tol = *opt.tol;
  grid.validate();
  const PeriodicSystem sys = build_system(config);

  Outcome o;
  const std::string& c = opt.command;
  if (c == "certify") {
    o = run_certify(config, sys, grid, opt);
  } else if (c == "axioms") {
    o = run_axioms(sys, grid);
  } else if (c == "envelope-check") {
    o = run_envelope_check(config, sys, grid);
  } else if (c == "mobius-fit") {
    o = run_mobius_fit(sys, grid, opt);
  } else if (c == "cycles") {
    o = run_cycles(sys, grid, opt);
  } else if (c == "orbit") {
    o = run_orbit(sys, opt);
  } else if (c == "schwarzian") {
    o = run_schwarzian(sys, grid);
  } else if (c == "conditions") {
    o = run_conditions(sys);
  } else {
    o = run_plot(config, sys, opt);
  }

  std::string format = opt.format;
  if (format.empty()) format = c == "plot-data" ? "csv" : "json";
  if (format == "svg" && !o.plot) throw InvalidArgument("--format svg is only available for plot-data");

  std::string text;
  if (format == "json") {
    ReportDocument doc;
    doc.command = c;
    doc.input = Json{{"config", to_json(config)}, {"config_path", opt.config_path}};
    doc.payload = o.payload;
    doc.tolerances = grid;
    if (opt.timing) {
      doc.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
    text = emit_json(doc);
  } else if (format == "csv") {
    text = emit_csv(o.table);
  } else {
    text = plot_svg(*o.plot);
  }

  const std::string path = default_output_path(opt, format);
  if (path.empty()) {
    out << text;
  } else {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write output file '" + path + "'");
    f << text;
    err << "wrote " << path << "\n";
  }
  return o.exit_code;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"global-stability certificates for periodic one-dimensional population models", "envstab"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"certify", "H1 + H2 certification of the system"},
      {"axioms", "population-model axioms of each map and of the period composition"},
      {"envelope-check", "check the configured envelopes against every map"},
      {"mobius-fit", "scan the Mobius family for common envelopes"},
      {"cycles", "fixed points of the period map and geometric cycles"},
      {"orbit", "iterate the system from --x0"},
      {"schwarzian", "Schwarzian-derivative test of each map"},
      {"conditions", "published closed-form parameter conditions"},
      {"plot-data", "sample maps, composition, envelopes and diagonal"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", opt.config_path, "system configuration (YAML or JSON)")->required();
    sub->add_option("--out", opt.out_path, "write the report to this file");
    sub->add_option("--format", opt.format, "json, csv, or svg (plot-data only)")
        ->check(CLI::IsMember({"json", "csv", "svg"}));
    sub->add_option("--grid-cells", opt.grid_cells, "seed cells of the verification grids")->check(CLI::PositiveNumber);
    sub->add_option("--tol", opt.tol, "absolute margin of the sign checks")->check(CLI::PositiveNumber);
    sub->add_option("--x0", opt.x0, "orbit starting point");
    sub->add_option("--periods", opt.periods, "orbit length in periods");
    sub->add_option("--r-max", opt.r_max, "largest cycle period searched")->check(CLI::PositiveNumber);
    sub->add_option("--samples", opt.samples, "plot samples")->check(CLI::Range(2, 1000000));
    sub->add_option("--alpha-grid", opt.alpha_grid, "Mobius alpha resolution (1/N)")->check(CLI::PositiveNumber);
    sub->add_flag("--timing", opt.timing, "include wall-clock duration in JSON reports");
    sub->callback([&opt, name = name] { opt.command = name; });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "envstab: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return execute(opt, out, err);
  } catch (const ConfigError& e) {
    err << "envstab: " << opt.config_path << ": " << e.what() << "\n";
  } catch (const Error& e) {
    err << "envstab: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "envstab: " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace envstab::cli
