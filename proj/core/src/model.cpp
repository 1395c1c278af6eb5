#include "envstab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "envstab/error.hpp"

namespace envstab {

namespace {

// Iterates this close outside [0, x_max] are treated as on the boundary.
constexpr double kDomainSlack = 1e-12;

Derivatives constant(double k) { return {k, 0.0, 0.0, 0.0}; }
Derivatives linear(double c0, double c1, double x) { return {c0 + c1 * x, c1, 0.0, 0.0}; }

Derivatives operator+(const Derivatives& a, const Derivatives& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3};
}
Derivatives operator-(const Derivatives& a, const Derivatives& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3};
}
Derivatives operator*(double k, const Derivatives& a) {
  return {k * a.v, k * a.d1, k * a.d2, k * a.d3};
}
Derivatives operator*(const Derivatives& a, const Derivatives& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2,
          a.d3 * b.v + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.v * b.d3};
}
Derivatives operator/(const Derivatives& n, const Derivatives& d) {
  Derivatives q;
  q.v = n.v / d.v;
  q.d1 = (n.d1 - q.v * d.d1) / d.v;
  q.d2 = (n.d2 - 2.0 * q.d1 * d.d1 - q.v * d.d2) / d.v;
  q.d3 = (n.d3 - 3.0 * q.d2 * d.d1 - 3.0 * q.d1 * d.d2 - q.v * d.d3) / d.v;
  return q;
}
// exp(u(x))
Derivatives exp_of(const Derivatives& u) {
  const double e = std::exp(u.v);
  return {e, u.d1 * e, (u.d2 + u.d1 * u.d1) * e,
          (u.d3 + 3.0 * u.d1 * u.d2 + u.d1 * u.d1 * u.d1) * e};
}
// x^p; coefficients that vanish identically stay zero at x = 0.
Derivatives power_of_x(double x, double p) {
  auto term = [&](double coef, double exponent) {
    if (coef == 0.0) return 0.0;
    return coef * std::pow(x, exponent);
  };
  return {term(1.0, p), term(p, p - 1.0), term(p * (p - 1.0), p - 2.0),
          term(p * (p - 1.0) * (p - 2.0), p - 3.0)};
}

Derivatives atom_derivatives(const Atom& at, double x) {
  switch (at.kind) {
    case Atom::Kind::Affine: return linear(at.a, at.b, x);
    case Atom::Kind::Power: return at.k * power_of_x(x, at.e);
    case Atom::Kind::Exp: return at.k * (power_of_x(x, at.e) * exp_of(linear(0.0, at.s, x)));
    case Atom::Kind::Reciprocal: return constant(at.k) / linear(at.a, at.b, x);
  }
  return {};
}

Derivatives piece_derivatives(const Piece& p, double x) {
  Derivatives sum;
  for (const Atom& a : p.atoms) sum = sum + atom_derivatives(a, x);
  return sum;
}

bool close(double a, double b) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void expect_params(ModelFamily family, const ParamMap& params,
                   std::initializer_list<const char*> names) {
  std::set<std::string> expected(names.begin(), names.end());
  for (const auto& [k, v] : params) {
    if (!expected.count(k)) {
      throw InvalidArgument(std::string(to_string(family)) + ": unknown parameter '" + k + "'");
    }
    if (!std::isfinite(v)) {
      throw InvalidArgument(std::string(to_string(family)) + ": parameter '" + k +
                            "' must be finite");
    }
  }
  for (const auto& n : expected) {
    if (!params.count(n)) {
      throw InvalidArgument(std::string(to_string(family)) + ": missing parameter '" + n + "'");
    }
  }
}

[[noreturn]] void reject(ModelFamily family, const std::string& what, double got) {
  throw InvalidArgument(std::string(to_string(family)) + ": " + what + " (got " + fmt(got) + ")");
}

std::vector<Piece> piecewise_linear_recip_pieces(double slope, double knee) {
  const double down = (1.0 - slope * knee) / (1.0 - knee);
  Atom rise{Atom::Kind::Power, slope, 1.0, 0.0, 0.0, 0.0};
  Atom fall{Atom::Kind::Affine, 0.0, 0.0, 0.0, 1.0 - down, down};
  Atom recip{Atom::Kind::Reciprocal, 1.0, 0.0, 0.0, 0.0, 1.0};
  return {Piece{0.0, {rise}}, Piece{knee, {fall}}, Piece{1.0, {recip}}};
}

}  // namespace

std::string_view to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::Ricker: return "ricker";
    case ModelFamily::GeneralizedBevertonHolt: return "generalized_beverton_holt";
    case ModelFamily::Quadratic: return "quadratic";
    case ModelFamily::ExponentialRational: return "exponential_rational";
    case ModelFamily::BevertonHoltHarvest: return "beverton_holt_harvest";
    case ModelFamily::PiecewiseLinearRecip: return "piecewise_linear_recip";
    case ModelFamily::CustomTable: return "custom_table";
  }
  return "unknown";
}

ModelFamily parse_family(std::string_view tag) {
  for (auto f : {ModelFamily::Ricker, ModelFamily::GeneralizedBevertonHolt, ModelFamily::Quadratic,
                 ModelFamily::ExponentialRational, ModelFamily::BevertonHoltHarvest,
                 ModelFamily::PiecewiseLinearRecip, ModelFamily::CustomTable}) {
    if (to_string(f) == tag) return f;
  }
  throw InvalidArgument("unknown family '" + std::string(tag) + "'");
}

std::string_view to_string(Atom::Kind k) {
  switch (k) {
    case Atom::Kind::Affine: return "affine";
    case Atom::Kind::Power: return "power";
    case Atom::Kind::Exp: return "exp";
    case Atom::Kind::Reciprocal: return "reciprocal";
  }
  return "unknown";
}

Atom::Kind parse_atom_kind(std::string_view tag) {
  for (auto k : {Atom::Kind::Affine, Atom::Kind::Power, Atom::Kind::Exp, Atom::Kind::Reciprocal}) {
    if (to_string(k) == tag) return k;
  }
  throw InvalidArgument("unknown atom type '" + std::string(tag) + "'");
}

double PopulationModel::param(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw InvalidArgument(std::string(to_string(family_)) + " has no parameter '" + name + "'");
  }
  return it->second;
}

std::vector<double> PopulationModel::breakpoints() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < pieces_.size(); ++i) out.push_back(pieces_[i].from);
  return out;
}

double PopulationModel::clamp_to_domain(double x) const {
  if (std::isnan(x)) throw DomainError(describe() + ": NaN argument");
  if (x < 0.0) {
    if (x >= -kDomainSlack) return 0.0;
    throw DomainError(describe() + ": x=" + fmt(x) + " is negative");
  }
  if (bounded_ && x > x_max_) {
    if (x <= x_max_ + kDomainSlack * std::max(1.0, x_max_)) return x_max_;
    throw DomainError(describe() + ": x=" + fmt(x) + " exceeds domain end " + fmt(x_max_));
  }
  return x;
}

const Piece& PopulationModel::piece_at(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Piece& p) { return v < p.from; });
  return *std::prev(it);
}

Derivatives PopulationModel::closed_form(double x) const {
  switch (family_) {
    case ModelFamily::Ricker: {
      const double r = params_.at("r");
      const double u = std::exp(r * (1.0 - x));
      return {x * u, u * (1.0 - r * x), u * r * (r * x - 2.0), u * r * r * (3.0 - r * x)};
    }
    case ModelFamily::GeneralizedBevertonHolt: {
      const double mu = params_.at("mu");
      const double c = params_.at("c");
      return linear(0.0, mu, x) / (constant(1.0) + (mu - 1.0) * power_of_x(x, c));
    }
    case ModelFamily::Quadratic: {
      const double mu = params_.at("mu");
      return {x * (1.0 + mu * (1.0 - x)), 1.0 + mu - 2.0 * mu * x, -2.0 * mu, 0.0};
    }
    case ModelFamily::ExponentialRational: {
      const double a = params_.at("a");
      const double b = params_.at("b");
      const double k = 1.0 + a * std::exp(b);
      return linear(0.0, k, x) / (constant(1.0) + a * exp_of(linear(0.0, b, x)));
    }
    case ModelFamily::BevertonHoltHarvest: {
      const double r = params_.at("r");
      const double c = params_.at("c");
      const Derivatives growth = linear(0.0, r, x) / linear(1.0, r - 1.0, x);
      const Derivatives harvest{x * (x - 1.0), 2.0 * x - 1.0, 2.0, 0.0};
      return growth - c * harvest;
    }
    case ModelFamily::PiecewiseLinearRecip:
    case ModelFamily::CustomTable:
      return piece_derivatives(piece_at(x), x);
  }
  return {};
}

double PopulationModel::eval(double x) const { return closed_form(clamp_to_domain(x)).v; }

Derivatives PopulationModel::derivatives(double x) const {
  x = clamp_to_domain(x);
  for (double b : breakpoints()) {
    if (std::abs(x - b) <= 1e-12 * std::max(1.0, b)) {
      throw DomainError(describe() + ": derivative undefined at breakpoint x=" + fmt(b));
    }
  }
  return closed_form(x);
}

double PopulationModel::deriv(double x, int order) const {
  const Derivatives d = derivatives(x);
  switch (order) {
    case 1: return d.d1;
    case 2: return d.d2;
    case 3: return d.d3;
    default: throw InvalidArgument("derivative order must be 1, 2 or 3");
  }
}

RealFn PopulationModel::as_function() const {
  return [m = *this](double x) {
    try {
      return m.eval(x);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
}

std::string PopulationModel::describe() const {
  std::ostringstream os;
  os << to_string(family_);
  if (family_ == ModelFamily::CustomTable) {
    os << "(" << pieces_.size() << " pieces)";
    return os.str();
  }
  os << "(";
  bool first = true;
  for (const auto& [k, v] : params_) {
    os << (first ? "" : ", ") << k << "=" << fmt(v);
    first = false;
  }
  os << ")";
  return os.str();
}

int PopulationModel::compute_smoothness() const {
  int smooth = 3;
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    const double b = pieces_[i].from;
    const Derivatives l = piece_derivatives(pieces_[i - 1], b);
    const Derivatives r = piece_derivatives(pieces_[i], b);
    int k = -1;
    if (close(l.v, r.v)) {
      k = 0;
      if (close(l.d1, r.d1)) {
        k = 1;
        if (close(l.d2, r.d2)) k = close(l.d3, r.d3) ? 3 : 2;
      }
    }
    smooth = std::min(smooth, k);
  }
  return smooth;
}

bool operator==(const PopulationModel& a, const PopulationModel& b) {
  return a.family_ == b.family_ && a.params_ == b.params_ && a.pieces_ == b.pieces_;
}

PopulationModel make_model(ModelFamily family, const ParamMap& params,
                           std::optional<double> x_max) {
  if (family == ModelFamily::CustomTable) {
    throw InvalidArgument("custom_table models are built from pieces, not parameters");
  }
  if (x_max && !(*x_max > 1.0 && std::isfinite(*x_max))) {
    throw InvalidArgument(std::string(to_string(family)) + ": x_max must be a finite value above 1");
  }

  PopulationModel m;
  m.family_ = family;
  m.params_ = params;
  m.x_max_ = x_max.value_or(kDefaultWorkingBound);

  switch (family) {
    case ModelFamily::Ricker: {
      expect_params(family, params, {"r"});
      if (!(params.at("r") > 0.0)) reject(family, "r must be positive", params.at("r"));
      break;
    }
    case ModelFamily::GeneralizedBevertonHolt: {
      expect_params(family, params, {"mu", "c"});
      if (!(params.at("mu") > 1.0)) reject(family, "mu must exceed 1", params.at("mu"));
      if (!(params.at("c") > 0.0)) reject(family, "c must be positive", params.at("c"));
      break;
    }
    case ModelFamily::Quadratic: {
      expect_params(family, params, {"mu"});
      const double mu = params.at("mu");
      if (!(mu > 0.0)) reject(family, "mu must be positive", mu);
      m.x_max_ = 1.0 + 1.0 / mu;
      m.bounded_ = true;
      break;
    }
    case ModelFamily::ExponentialRational: {
      expect_params(family, params, {"a", "b"});
      if (!(params.at("a") > 0.0)) reject(family, "a must be positive", params.at("a"));
      if (!(params.at("b") > 0.0)) reject(family, "b must be positive", params.at("b"));
      break;
    }
    case ModelFamily::BevertonHoltHarvest: {
      expect_params(family, params, {"r", "c"});
      const double r = params.at("r");
      const double c = params.at("c");
      if (!(r > 1.0)) reject(family, "r must exceed 1", r);
      if (!(c > 0.0)) reject(family, "c must be positive", c);
      if (!(c < 1.0)) reject(family, "c must be below 1", c);
      // positive root of f(x) = 0
      const double sc = std::sqrt(c);
      m.x_max_ = ((r - 2.0) * sc + std::sqrt(r * (r * (4.0 + c) - 4.0))) / (2.0 * (r - 1.0) * sc);
      m.bounded_ = true;
      break;
    }
    case ModelFamily::PiecewiseLinearRecip: {
      expect_params(family, params, {"slope", "knee"});
      const double slope = params.at("slope");
      const double knee = params.at("knee");
      if (!(slope > 1.0)) reject(family, "slope must exceed 1", slope);
      if (!(knee > 0.0 && knee < 1.0)) reject(family, "knee must lie in (0, 1)", knee);
      m.pieces_ = piecewise_linear_recip_pieces(slope, knee);
      break;
    }
    case ModelFamily::CustomTable:
      break;
  }
  m.smoothness_ = m.compute_smoothness();
  return m;
}

PopulationModel make_custom_model(std::vector<Piece> pieces, std::optional<double> x_max) {
  if (pieces.empty()) throw InvalidArgument("custom_table: at least one piece is required");
  if (pieces.front().from != 0.0) throw InvalidArgument("custom_table: first piece must start at 0");
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    if (!(pieces[i].from > pieces[i - 1].from)) {
      throw InvalidArgument("custom_table: piece starts must be strictly increasing");
    }
  }
  for (const Piece& p : pieces) {
    if (p.atoms.empty()) throw InvalidArgument("custom_table: piece without atoms");
  }
  if (x_max && !(*x_max > 1.0 && std::isfinite(*x_max))) {
    throw InvalidArgument("custom_table: x_max must be a finite value above 1");
  }

  PopulationModel m;
  m.family_ = ModelFamily::CustomTable;
  m.pieces_ = std::move(pieces);
  m.x_max_ = x_max.value_or(kDefaultWorkingBound);
  m.smoothness_ = m.compute_smoothness();

  const double f0 = m.eval(0.0);
  const double f1 = m.eval(1.0);
  if (!(std::abs(f0) <= 1e-12)) reject(ModelFamily::CustomTable, "f(0) must equal 0", f0);
  if (!(std::abs(f1 - 1.0) <= 1e-12)) reject(ModelFamily::CustomTable, "f(1) must equal 1", f1);
  return m;
}

std::optional<double> closed_form_multiplier(const PopulationModel& m) {
  const auto& p = m.params();
  switch (m.family()) {
    case ModelFamily::Ricker: return 1.0 - p.at("r");
    case ModelFamily::GeneralizedBevertonHolt: {
      const double mu = p.at("mu");
      return (1.0 + (mu - 1.0) * (1.0 - p.at("c"))) / mu;
    }
    case ModelFamily::Quadratic: return 1.0 - p.at("mu");
    case ModelFamily::ExponentialRational: {
      const double a = p.at("a");
      const double b = p.at("b");
      const double eb = std::exp(b);
      return 1.0 - a * b * eb / (1.0 + a * eb);
    }
    case ModelFamily::BevertonHoltHarvest: return 1.0 / p.at("r") - p.at("c");
    case ModelFamily::PiecewiseLinearRecip:
    case ModelFamily::CustomTable: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace envstab
