#pragma once

// Serialization of analysis results: canonical JSON reports (sorted keys),
// CSV tables and plot data (CSV or a minimal SVG).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "envstab/axioms.hpp"
#include "envstab/certifier.hpp"
#include "envstab/config.hpp"
#include "envstab/envelope.hpp"
#include "envstab/numerics.hpp"
#include "envstab/periodic_system.hpp"

namespace envstab {

using Json = nlohmann::json;

/// Finite values as numbers; infinities and NaN as the strings "inf",
/// "-inf" and "nan".
Json number(double v);

Json to_json(const Interval& v);
Json to_json(const GridConfig& v);
Json to_json(const SignReport& v);
Json to_json(const AxiomReport& v);
Json to_json(const Envelope& v);
Json to_json(const InvolutionCheck& v);
Json to_json(const DecreasingCheck& v);
Json to_json(const EnvelopeVerdict& v);
Json to_json(const SandwichVerdict& v);
Json to_json(const MobiusFit& v);
Json to_json(const FixedPointScan& v);
Json to_json(const CycleScan& v);
Json to_json(const MonotonicityReport& v);
Json to_json(const TwoCycleOracle& v);
Json to_json(const SchwarzianVerdict& v);
Json to_json(const StabilityCertificate& v);
Json to_json(const FailureDiagnosis& v);
Json to_json(const ClosedFormReport& v);
Json to_json(const SystemConfig& v);

struct ReportDocument {
  std::string command;
  Json input;
  Json payload;
  GridConfig tolerances;
  /// Wall-clock seconds; only written when set, so that reports stay
  /// byte-identical across runs by default.
  std::optional<double> duration_seconds;
};

std::string emit_json(const ReportDocument& doc);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// Written first as "# ..." lines.
  std::vector<std::string> comments;
};

/// Shortest round-tripping decimal form; empty for NaN.
std::string csv_number(double v);
std::string emit_csv(const CsvTable& table);

/// Witness/grid table of sign reports: check, interval_lo, interval_hi, status, witness_x.
CsvTable sign_table(const std::vector<NamedSignReport>& reports);
CsvTable orbit_table(const std::vector<double>& orbit);

struct PlotSeries {
  std::string name;
  RealFn f;
};

struct PlotData {
  std::vector<std::string> names;
  std::vector<double> xs;
  /// values[j][k] is series j at xs[k]; NaN where evaluation failed.
  std::vector<std::vector<double>> values;
  std::vector<std::string> notes;
};

/// Throws InvalidArgument when samples < 2.
PlotData sample_plot(const std::vector<PlotSeries>& series, Interval interval, std::size_t samples);
CsvTable plot_table(const PlotData& data);
/// 800x600 document with one polyline per series and min/max axis labels.
std::string plot_svg(const PlotData& data);

}  // namespace envstab
