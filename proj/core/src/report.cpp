#include "envstab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "envstab/error.hpp"

#ifndef ENVSTAB_VERSION
#define ENVSTAB_VERSION "unknown"
#endif

namespace envstab {

namespace {

template <typename T, typename F>
Json array_of(const std::vector<T>& xs, F&& f) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(f(x));
  return a;
}

Json numbers(const std::vector<double>& xs) {
  return array_of(xs, [](double x) { return number(x); });
}

Json witness(const std::optional<EnvelopeWitness>& w) {
  if (!w) return nullptr;
  return Json{{"x", number(w->x)}, {"f", number(w->fx)}, {"h", number(w->hx)}, {"unresolved", w->unresolved}};
}

}  // namespace

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json to_json(const Interval& v) { return Json{{"lo", number(v.lo)}, {"hi", number(v.hi)}}; }

Json to_json(const GridConfig& v) {
  return Json{{"seed_cells", v.seed_cells},
              {"max_refinement_depth", v.max_refinement_depth},
              {"abs_tol", v.abs_tol},
              {"rel_tol", v.rel_tol},
              {"exclusion_radius", v.exclusion_radius}};
}

Json to_json(const SignReport& v) {
  Json j{{"status", to_string(v.status)},
         {"interval", to_json(v.interval)},
         {"cells_checked", v.cells_checked},
         {"min_abs_value", number(v.min_abs_value)},
         {"unresolved", array_of(v.unresolved, [](const Interval& i) { return to_json(i); })}};
  j["witness"] = v.witness ? number(*v.witness) : Json(nullptr);
  j["witness_value"] = v.witness_value ? number(*v.witness_value) : Json(nullptr);
  return j;
}

Json to_json(const AxiomReport& v) {
  Json checks = Json::object();
  for (const auto& c : v.checks) checks[c.name] = to_json(c.report);
  return Json{{"is_population_model", v.is_population_model},
              {"monotone_rise_bound", number(v.monotone_rise_bound)},
              {"domain", to_json(v.domain)},
              {"checks", checks},
              {"violations", array_of(v.violations, [](const AxiomViolation& a) {
                 return Json{{"axiom", a.axiom}, {"kind", a.kind}, {"x", number(a.x)}, {"fx", number(a.fx)}};
               })}};
}

Json to_json(const Envelope& v) {
  Json j{{"kind", to_string(v.kind())}, {"x_h", number(v.x_h())}, {"description", v.describe()}};
  if (v.kind() == EnvelopeKind::Mobius || v.kind() == EnvelopeKind::PiecewiseBH) j["alpha"] = number(v.alpha());
  if (v.kind() == EnvelopeKind::PiecewiseBH) j["c"] = number(v.c());
  if (v.kind() == EnvelopeKind::Custom) j["expression"] = v.expression();
  return j;
}

Json to_json(const InvolutionCheck& v) {
  return Json{{"max_residual", number(v.max_residual)},
              {"worst_x", number(v.worst_x)},
              {"structural_ok", v.structural_ok},
              {"nonpositive_at", v.nonpositive_at ? number(*v.nonpositive_at) : Json(nullptr)},
              {"checked_interval", to_json(v.checked)},
              {"epsilon", v.epsilon}};
}

Json to_json(const DecreasingCheck& v) {
  return Json{{"decreasing", v.decreasing}, {"witness", v.witness ? number(*v.witness) : Json(nullptr)}};
}

Json to_json(const EnvelopeVerdict& v) {
  return Json{{"model", v.model},
              {"envelops", v.envelops},
              {"lower_witness", witness(v.lower_witness)},
              {"upper_witness", witness(v.upper_witness)},
              {"checked_interval", to_json(v.checked_interval)},
              {"exclusion_radius", v.exclusion_radius},
              {"lower_check", to_json(v.lower)},
              {"upper_check", to_json(v.upper)}};
}

Json to_json(const SandwichVerdict& v) {
  return Json{{"passes", v.passes},
              {"witnesses", array_of(v.witnesses, [](const SandwichWitness& w) {
                 return Json{{"condition", w.condition}, {"x", number(w.x)}, {"value", number(w.value)},
                             {"unresolved", w.unresolved}};
               })}};
}

Json to_json(const MobiusFit& v) {
  return Json{{"alpha_grid", v.alpha_grid},
              {"feasible_points", v.feasible_points},
              {"empty", v.empty()},
              {"feasible", array_of(v.feasible, [](const AlphaRange& r) {
                 return Json{{"lo", number(r.lo)}, {"hi", number(r.hi)}};
               })}};
}

Json to_json(const FixedPointScan& v) {
  return Json{{"points", numbers(v.points)},
              {"interval", to_json(v.interval)},
              {"resolution", v.resolution},
              {"refine_tol", v.refine_tol},
              {"suspected_tangencies", numbers(v.suspected_tangencies)}};
}

Json to_json(const CycleScan& v) {
  return Json{{"r_max", v.r_max},
              {"resolution", v.resolution},
              {"refine_tol", v.refine_tol},
              {"cycles", array_of(v.cycles, [](const GeometricCycle& c) {
                 return Json{{"r", c.r},
                             {"s", c.s},
                             {"points", numbers(c.points)},
                             {"max_residual", number(c.max_residual)},
                             {"complete", array_of(c.complete, [](const auto& pr) {
                                return Json{{"x", number(pr.first)}, {"map", pr.second}};
                              })}};
               })}};
}

Json to_json(const MonotonicityReport& v) {
  return Json{{"c_phi", number(v.c_phi)}, {"x_phi", number(v.x_phi)}};
}

Json to_json(const TwoCycleOracle& v) {
  return Json{{"verdict", to_string(v.verdict)},
              {"two_cycles", array_of(v.two_cycles, [](const auto& c) {
                 return Json::array({number(c.first), number(c.second)});
               })},
              {"extra_fixed_points", numbers(v.extra_fixed_points)},
              {"left_check", to_json(v.left)},
              {"right_check", to_json(v.right)},
              {"interval", to_json(v.interval)}};
}

Json to_json(const SchwarzianVerdict& v) {
  return Json{{"passes", v.passes},
              {"critical_points", numbers(v.critical_points)},
              {"min_margin", number(v.min_margin)},
              {"local_multiplier", number(v.local_multiplier)},
              {"reasons", v.reasons}};
}

Json to_json(const StabilityCertificate& v) {
  Json h1{{"outcome", v.h1.outcome},
          {"maps", array_of(v.h1.maps, [](const AxiomReport& r) { return to_json(r); })},
          {"c1", v.h1.c1},
          {"composition", to_json(v.h1.composition)},
          {"working_interval", to_json(v.h1.working_interval)},
          {"chaining", Json{{"verified", v.h1.chaining.verified},
                            {"samples", v.h1.chaining.samples},
                            {"max_image", numbers(v.h1.chaining.max_image)},
                            {"note", v.h1.chaining.note}}}};
  Json h2{{"outcome", v.h2.outcome},
          {"candidates", array_of(v.h2.candidates, [](const CandidateEvidence& c) {
             return Json{{"envelope", to_json(c.envelope)},
                         {"source", c.source},
                         {"passed", c.passed},
                         {"involution", to_json(c.involution)},
                         {"decreasing", to_json(c.decreasing)},
                         {"verdicts", array_of(c.verdicts, [](const EnvelopeVerdict& e) { return to_json(e); })}};
           })}};
  h2["mobius_scan"] = v.h2.mobius_scan ? to_json(*v.h2.mobius_scan) : Json(nullptr);
  return Json{{"status", to_string(v.status)},
              {"multiplier", number(v.multiplier)},
              {"local_verdict", to_string(v.local)},
              {"neutral", v.neutral},
              {"h1_evidence", h1},
              {"h2_evidence", h2},
              {"envelope_used", v.envelope_used ? to_json(*v.envelope_used) : Json(nullptr)},
              {"witnesses", array_of(v.witnesses, [](const LabeledPoint& w) {
                 return Json{{"label", w.label}, {"x", number(w.x)}, {"value", number(w.value)}};
               })},
              {"unresolved", array_of(v.unresolved, [](const Interval& i) { return to_json(i); })},
              {"two_cycle_oracle", to_json(v.oracle)},
              {"oracle_agrees", v.oracle_agrees},
              {"tolerances", Json{{"grid", to_json(v.tolerances)},
                                  {"involution_epsilon", v.involution_epsilon},
                                  {"alpha_grid", v.alpha_grid}}},
              {"notes", v.notes}};
}

Json to_json(const FailureDiagnosis& v) {
  return Json{{"failure_found", v.failure_found},
              {"conclusion", v.conclusion},
              {"composition", to_json(v.composition)},
              {"extra_fixed_points", numbers(v.extra_fixed_points)},
              {"windows", array_of(v.windows, [](const ViolationWindow& w) {
                 return Json{{"side", w.side}, {"lo", number(w.lo)}, {"hi", number(w.hi)}};
               })},
              {"notes", v.notes}};
}

Json to_json(const ClosedFormReport& v) {
  return Json{{"maps", array_of(v.maps, [](const MapCondition& c) {
                 return Json{{"index", c.index}, {"family", c.family}, {"condition", c.condition},
                             {"passes", c.passes}, {"multiplier", number(c.multiplier)}};
               })},
              {"product", number(v.product)},
              {"product_stable", v.product_stable},
              {"all_pass", v.all_pass},
              {"notes", v.notes}};
}

Json to_json(const SystemConfig& v) {
  Json models = Json::array();
  for (const auto& m : v.models) {
    Json jm{{"family", m.family}};
    if (!m.params.empty()) {
      Json params = Json::object();
      for (const auto& [k, x] : m.params) params[k] = number(x);
      jm["params"] = params;
    }
    if (m.x_max) jm["x_max"] = number(*m.x_max);
    if (!m.pieces.empty()) {
      jm["pieces"] = array_of(m.pieces, [](const Piece& p) {
        return Json{{"from", number(p.from)}, {"atoms", array_of(p.atoms, [](const Atom& a) {
                       return Json{{"type", to_string(a.kind)}, {"k", a.k}, {"e", a.e},
                                   {"s", a.s}, {"a", a.a}, {"b", a.b}};
                     })}};
      });
    }
    models.push_back(jm);
  }
  Json envs = array_of(v.envelopes, [](const EnvelopeSpec& e) {
    Json j{{"kind", e.kind}};
    if (e.alpha) j["alpha"] = number(*e.alpha);
    if (e.c) j["c"] = number(*e.c);
    if (!e.expression.empty()) j["expression"] = e.expression;
    return j;
  });
  Json j{{"models", models}, {"envelopes", envs}};
  if (!v.description.empty()) j["description"] = v.description;
  return j;
}

std::string emit_json(const ReportDocument& doc) {
  Json j{{"command", doc.command},
         {"input", doc.input},
         {"payload", doc.payload},
         {"tolerances", to_json(doc.tolerances)},
         {"tool", Json{{"name", "envstab"}, {"version", ENVSTAB_VERSION}}}};
  if (doc.duration_seconds) j["duration_seconds"] = *doc.duration_seconds;
  return j.dump(2) + "\n";
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string emit_csv(const CsvTable& table) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::ostringstream os;
  for (const auto& c : table.comments) os << "# " << c << "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << field(table.header[i]);
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << field(row[i]);
    os << "\n";
  }
  return os.str();
}

CsvTable sign_table(const std::vector<NamedSignReport>& reports) {
  CsvTable t;
  t.header = {"check", "interval_lo", "interval_hi", "status", "witness_x"};
  for (const auto& r : reports) {
    t.rows.push_back({r.name, csv_number(r.report.interval.lo), csv_number(r.report.interval.hi),
                      to_string(r.report.status), r.report.witness ? csv_number(*r.report.witness) : ""});
    for (const auto& u : r.report.unresolved) {
      t.rows.push_back({r.name, csv_number(u.lo), csv_number(u.hi), "Unresolved", ""});
    }
  }
  return t;
}

CsvTable orbit_table(const std::vector<double>& orbit) {
  CsvTable t;
  t.header = {"step", "x"};
  for (std::size_t i = 0; i < orbit.size(); ++i) t.rows.push_back({std::to_string(i), csv_number(orbit[i])});
  return t;
}

PlotData sample_plot(const std::vector<PlotSeries>& series, Interval interval, std::size_t samples) {
  if (samples < 2) throw InvalidArgument("plot needs at least 2 samples");
  PlotData d;
  for (const auto& s : series) d.names.push_back(s.name);
  d.values.assign(series.size(), std::vector<double>(samples));
  std::vector<std::size_t> empty(series.size(), 0);
  for (std::size_t k = 0; k < samples; ++k) {
    const double x = k + 1 == samples ? interval.hi
                                      : interval.lo + interval.length() * static_cast<double>(k) /
                                                          static_cast<double>(samples - 1);
    d.xs.push_back(x);
    for (std::size_t j = 0; j < series.size(); ++j) {
      double v = std::numeric_limits<double>::quiet_NaN();
      try {
        v = series[j].f(x);
      } catch (const Error&) {
      }
      if (!std::isfinite(v)) {
        v = std::numeric_limits<double>::quiet_NaN();
        ++empty[j];
      }
      d.values[j][k] = v;
    }
  }
  for (std::size_t j = 0; j < series.size(); ++j) {
    if (empty[j] > 0) {
      d.notes.push_back(series[j].name + ": " + std::to_string(empty[j]) +
                        " samples could not be evaluated and are left empty");
    }
  }
  return d;
}

CsvTable plot_table(const PlotData& data) {
  CsvTable t;
  t.comments = data.notes;
  t.header.push_back("x");
  for (const auto& n : data.names) t.header.push_back(n);
  for (std::size_t k = 0; k < data.xs.size(); ++k) {
    std::vector<std::string> row{csv_number(data.xs[k])};
    for (const auto& col : data.values) row.push_back(csv_number(col[k]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string plot_svg(const PlotData& data) {
  constexpr double W = 800.0;
  constexpr double H = 600.0;
  constexpr double M = 50.0;
  const double x0 = data.xs.front();
  const double x1 = data.xs.back();
  double y0 = std::numeric_limits<double>::infinity();
  double y1 = -y0;
  for (const auto& col : data.values) {
    for (double v : col) {
      if (std::isfinite(v)) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
      }
    }
  }
  if (!(y1 > y0)) {
    y0 = std::isfinite(y0) ? y0 - 1.0 : 0.0;
    y1 = y0 + 2.0;
  }
  auto px = [&](double x) { return M + (x - x0) / (x1 - x0) * (W - 2 * M); };
  auto py = [&](double y) { return H - M - (y - y0) / (y1 - y0) * (H - 2 * M); };

  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  os << "<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W - 2 * M << "\" height=\"" << H - 2 * M
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << M << "\" y=\"" << H - M + 20 << "\">" << csv_number(x0) << "</text>\n";
  os << "<text x=\"" << W - M << "\" y=\"" << H - M + 20 << "\" text-anchor=\"end\">" << csv_number(x1) << "</text>\n";
  os << "<text x=\"" << M - 5 << "\" y=\"" << H - M << "\" text-anchor=\"end\">" << csv_number(y0) << "</text>\n";
  os << "<text x=\"" << M - 5 << "\" y=\"" << M + 10 << "\" text-anchor=\"end\">" << csv_number(y1) << "</text>\n";
  for (std::size_t j = 0; j < data.values.size(); ++j) {
    const char* color = colors[j % (sizeof colors / sizeof *colors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    bool first = true;
    for (std::size_t k = 0; k < data.xs.size(); ++k) {
      const double v = data.values[j][k];
      if (!std::isfinite(v)) continue;
      os << (first ? "" : " ") << csv_number(px(data.xs[k])) << "," << csv_number(py(v));
      first = false;
    }
    os << "\"><title>" << data.names[j] << "</title></polyline>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace envstab
