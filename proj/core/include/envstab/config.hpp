#pragma once

// System configuration files. The format is YAML (JSON documents are
// accepted too):
//
//   description: free text (optional)
//   models:
//     - family: ricker
//       params: {r: 1.8}
//       x_max: 20            # optional
//     - family: custom_table
//       pieces:
//         - from: 0
//           atoms: [{type: power, k: 4, e: 1}]
//   envelopes:
//     - kind: mobius         # mobius | reciprocal | piecewise_bh | custom
//       alpha: 0.5
//   grid: {seed_cells: 4096, max_refinement_depth: 12, abs_tol: 1e-9,
//          rel_tol: 1e-9, exclusion_radius: 1e-4}
//
// Unknown keys are rejected with their line number.

#include <optional>
#include <string>
#include <vector>

#include "envstab/envelope.hpp"
#include "envstab/model.hpp"
#include "envstab/numerics.hpp"
#include "envstab/periodic_system.hpp"

namespace envstab {

struct ModelSpec {
  std::string family;
  ParamMap params;
  std::optional<double> x_max;
  std::vector<Piece> pieces;
  int line = 0;

  friend bool operator==(const ModelSpec& a, const ModelSpec& b) {
    return a.family == b.family && a.params == b.params && a.x_max == b.x_max && a.pieces == b.pieces;
  }
};

struct EnvelopeSpec {
  std::string kind;
  std::optional<double> alpha;
  std::optional<double> c;
  std::string expression;
  int line = 0;

  friend bool operator==(const EnvelopeSpec& a, const EnvelopeSpec& b) {
    return a.kind == b.kind && a.alpha == b.alpha && a.c == b.c && a.expression == b.expression;
  }
};

struct GridOverrides {
  std::optional<int> seed_cells;
  std::optional<int> max_refinement_depth;
  std::optional<double> abs_tol;
  std::optional<double> rel_tol;
  std::optional<double> exclusion_radius;

  friend bool operator==(const GridOverrides&, const GridOverrides&) = default;
};

struct SystemConfig {
  std::string description;
  std::vector<ModelSpec> models;
  std::vector<EnvelopeSpec> envelopes;
  GridOverrides grid;

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

/// Throws ConfigError (with line information where available) on syntax
/// errors, unknown keys, unknown families or kinds, and inadmissible
/// parameters.
SystemConfig parse_system_config(const std::string& path);
SystemConfig parse_system_config_text(const std::string& text);

/// YAML text that parses back to an equal SystemConfig.
std::string serialize_config(const SystemConfig& cfg);

PopulationModel build_model(const ModelSpec& spec);
std::vector<PopulationModel> build_models(const SystemConfig& cfg);
PeriodicSystem build_system(const SystemConfig& cfg);
Envelope build_envelope(const EnvelopeSpec& spec);
std::vector<Envelope> build_envelopes(const SystemConfig& cfg);
/// `base` with the config's grid overrides applied.
GridConfig grid_config(const SystemConfig& cfg, GridConfig base = {});

}  // namespace envstab
