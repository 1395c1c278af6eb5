#include "envstab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "envstab/error.hpp"

namespace envstab {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

void only_keys(const YAML::Node& map, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!map.IsMap()) throw ConfigError(where + " must be a mapping", line_of(map));
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) throw ConfigError("unknown field '" + key + "' in " + where, line_of(kv.first));
  }
}

template <typename T>
T scalar(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) throw ConfigError(what + " must be a scalar", line_of(n));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(what + " has an invalid value '" + n.Scalar() + "'", line_of(n));
  }
}

template <typename T>
std::optional<T> optional_scalar(const YAML::Node& map, const char* key, const std::string& where) {
  const YAML::Node n = map[key];
  if (!n) return std::nullopt;
  return scalar<T>(n, where + "." + key);
}

Atom parse_atom(const YAML::Node& n) {
  only_keys(n, {"type", "k", "e", "s", "a", "b"}, "atom");
  if (!n["type"]) throw ConfigError("atom needs a 'type'", line_of(n));
  Atom a;
  try {
    a.kind = parse_atom_kind(scalar<std::string>(n["type"], "atom.type"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), line_of(n["type"]));
  }
  a.k = optional_scalar<double>(n, "k", "atom").value_or(0.0);
  a.e = optional_scalar<double>(n, "e", "atom").value_or(0.0);
  a.s = optional_scalar<double>(n, "s", "atom").value_or(0.0);
  a.a = optional_scalar<double>(n, "a", "atom").value_or(0.0);
  a.b = optional_scalar<double>(n, "b", "atom").value_or(0.0);
  return a;
}

ModelSpec parse_model(const YAML::Node& n) {
  only_keys(n, {"family", "params", "x_max", "pieces"}, "model");
  ModelSpec m;
  m.line = line_of(n);
  if (!n["family"]) throw ConfigError("model needs a 'family'", m.line);
  m.family = scalar<std::string>(n["family"], "model.family");
  if (const YAML::Node p = n["params"]) {
    if (!p.IsMap()) throw ConfigError("model.params must be a mapping", line_of(p));
    for (const auto& kv : p) {
      m.params[kv.first.as<std::string>()] = scalar<double>(kv.second, "param " + kv.first.as<std::string>());
    }
  }
  m.x_max = optional_scalar<double>(n, "x_max", "model");
  if (const YAML::Node ps = n["pieces"]) {
    if (!ps.IsSequence()) throw ConfigError("model.pieces must be a list", line_of(ps));
    for (const auto& pn : ps) {
      only_keys(pn, {"from", "atoms"}, "piece");
      Piece piece;
      if (!pn["from"]) throw ConfigError("piece needs 'from'", line_of(pn));
      piece.from = scalar<double>(pn["from"], "piece.from");
      const YAML::Node atoms = pn["atoms"];
      if (!atoms || !atoms.IsSequence()) throw ConfigError("piece needs a list of 'atoms'", line_of(pn));
      for (const auto& an : atoms) piece.atoms.push_back(parse_atom(an));
      m.pieces.push_back(std::move(piece));
    }
  }
  return m;
}

EnvelopeSpec parse_envelope(const YAML::Node& n) {
  only_keys(n, {"kind", "alpha", "c", "expression"}, "envelope");
  EnvelopeSpec e;
  e.line = line_of(n);
  if (!n["kind"]) throw ConfigError("envelope needs a 'kind'", e.line);
  e.kind = scalar<std::string>(n["kind"], "envelope.kind");
  e.alpha = optional_scalar<double>(n, "alpha", "envelope");
  e.c = optional_scalar<double>(n, "c", "envelope");
  e.expression = optional_scalar<std::string>(n, "expression", "envelope").value_or("");
  return e;
}

GridOverrides parse_grid(const YAML::Node& n) {
  only_keys(n, {"seed_cells", "max_refinement_depth", "abs_tol", "rel_tol", "exclusion_radius"}, "grid");
  GridOverrides g;
  g.seed_cells = optional_scalar<int>(n, "seed_cells", "grid");
  g.max_refinement_depth = optional_scalar<int>(n, "max_refinement_depth", "grid");
  g.abs_tol = optional_scalar<double>(n, "abs_tol", "grid");
  g.rel_tol = optional_scalar<double>(n, "rel_tol", "grid");
  g.exclusion_radius = optional_scalar<double>(n, "exclusion_radius", "grid");
  return g;
}

SystemConfig parse_root(const YAML::Node& root) {
  if (!root || root.IsNull()) throw ConfigError("empty configuration");
  only_keys(root, {"description", "models", "envelopes", "grid"}, "configuration");
  SystemConfig cfg;
  cfg.description = optional_scalar<std::string>(root, "description", "configuration").value_or("");
  const YAML::Node models = root["models"];
  if (!models || !models.IsSequence() || models.size() == 0) {
    throw ConfigError("'models' must be a non-empty list", line_of(models ? models : root));
  }
  for (const auto& m : models) cfg.models.push_back(parse_model(m));
  if (const YAML::Node envs = root["envelopes"]) {
    if (!envs.IsSequence()) throw ConfigError("'envelopes' must be a list", line_of(envs));
    for (const auto& e : envs) cfg.envelopes.push_back(parse_envelope(e));
  }
  if (const YAML::Node g = root["grid"]) cfg.grid = parse_grid(g);

  // Everything must be constructible.
  for (const auto& m : cfg.models) build_model(m);
  for (const auto& e : cfg.envelopes) build_envelope(e);
  try {
    grid_config(cfg).validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("grid: ") + e.what(), line_of(root["grid"]));
  }
  return cfg;
}

}  // namespace

SystemConfig parse_system_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error: " + e.msg, e.mark.line + 1);
  }
  return parse_root(root);
}

SystemConfig parse_system_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system_config_text(ss.str());
}

PopulationModel build_model(const ModelSpec& spec) {
  try {
    const ModelFamily family = parse_family(spec.family);
    if (family == ModelFamily::CustomTable) {
      if (!spec.params.empty()) throw InvalidArgument("custom_table takes pieces, not params");
      return make_custom_model(spec.pieces, spec.x_max);
    }
    if (!spec.pieces.empty()) throw InvalidArgument(spec.family + " does not take pieces");
    return make_model(family, spec.params, spec.x_max);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), spec.line);
  }
}

std::vector<PopulationModel> build_models(const SystemConfig& cfg) {
  std::vector<PopulationModel> out;
  for (const auto& m : cfg.models) out.push_back(build_model(m));
  return out;
}

PeriodicSystem build_system(const SystemConfig& cfg) {
  try {
    return make_system(build_models(cfg));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), cfg.models.empty() ? 0 : cfg.models.front().line);
  }
}

Envelope build_envelope(const EnvelopeSpec& spec) {
  try {
    const EnvelopeKind kind = parse_envelope_kind(spec.kind);
    auto need = [&](const std::optional<double>& v, const char* name) {
      if (!v) throw InvalidArgument(spec.kind + " envelope needs '" + name + "'");
      return *v;
    };
    switch (kind) {
      case EnvelopeKind::Mobius: return make_mobius(need(spec.alpha, "alpha"));
      case EnvelopeKind::Reciprocal: return make_reciprocal();
      case EnvelopeKind::PiecewiseBH: return make_piecewise_bh(need(spec.c, "c"));
      case EnvelopeKind::Custom:
        if (spec.expression.empty()) throw InvalidArgument("custom envelope needs 'expression'");
        return make_custom_envelope(spec.expression);
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), spec.line);
  }
  throw ConfigError("unknown envelope kind", spec.line);
}

std::vector<Envelope> build_envelopes(const SystemConfig& cfg) {
  std::vector<Envelope> out;
  for (const auto& e : cfg.envelopes) out.push_back(build_envelope(e));
  return out;
}

GridConfig grid_config(const SystemConfig& cfg, GridConfig base) {
  const GridOverrides& g = cfg.grid;
  if (g.seed_cells) base.seed_cells = *g.seed_cells;
  if (g.max_refinement_depth) base.max_refinement_depth = *g.max_refinement_depth;
  if (g.abs_tol) base.abs_tol = *g.abs_tol;
  if (g.rel_tol) base.rel_tol = *g.rel_tol;
  if (g.exclusion_radius) base.exclusion_radius = *g.exclusion_radius;
  return base;
}

std::string serialize_config(const SystemConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  if (!cfg.description.empty()) out << YAML::Key << "description" << YAML::Value << cfg.description;
  out << YAML::Key << "models" << YAML::Value << YAML::BeginSeq;
  for (const auto& m : cfg.models) {
    out << YAML::BeginMap << YAML::Key << "family" << YAML::Value << m.family;
    if (!m.params.empty()) {
      out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
      for (const auto& [k, v] : m.params) out << YAML::Key << k << YAML::Value << v;
      out << YAML::EndMap;
    }
    if (m.x_max) out << YAML::Key << "x_max" << YAML::Value << *m.x_max;
    if (!m.pieces.empty()) {
      out << YAML::Key << "pieces" << YAML::Value << YAML::BeginSeq;
      for (const auto& p : m.pieces) {
        out << YAML::BeginMap << YAML::Key << "from" << YAML::Value << p.from;
        out << YAML::Key << "atoms" << YAML::Value << YAML::BeginSeq;
        for (const auto& a : p.atoms) {
          out << YAML::Flow << YAML::BeginMap << YAML::Key << "type" << YAML::Value
              << std::string(to_string(a.kind)) << YAML::Key << "k" << YAML::Value << a.k
              << YAML::Key << "e" << YAML::Value << a.e << YAML::Key << "s" << YAML::Value << a.s
              << YAML::Key << "a" << YAML::Value << a.a << YAML::Key << "b" << YAML::Value << a.b
              << YAML::EndMap;
        }
        out << YAML::EndSeq << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  if (!cfg.envelopes.empty()) {
    out << YAML::Key << "envelopes" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : cfg.envelopes) {
      out << YAML::BeginMap << YAML::Key << "kind" << YAML::Value << e.kind;
      if (e.alpha) out << YAML::Key << "alpha" << YAML::Value << *e.alpha;
      if (e.c) out << YAML::Key << "c" << YAML::Value << *e.c;
      if (!e.expression.empty()) out << YAML::Key << "expression" << YAML::Value << YAML::DoubleQuoted << e.expression;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  const GridOverrides& g = cfg.grid;
  if (g != GridOverrides{}) {
    out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    if (g.seed_cells) out << YAML::Key << "seed_cells" << YAML::Value << *g.seed_cells;
    if (g.max_refinement_depth) out << YAML::Key << "max_refinement_depth" << YAML::Value << *g.max_refinement_depth;
    if (g.abs_tol) out << YAML::Key << "abs_tol" << YAML::Value << *g.abs_tol;
    if (g.rel_tol) out << YAML::Key << "rel_tol" << YAML::Value << *g.rel_tol;
    if (g.exclusion_radius) out << YAML::Key << "exclusion_radius" << YAML::Value << *g.exclusion_radius;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace envstab
