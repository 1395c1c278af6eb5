#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "envstab/numerics.hpp"

namespace envstab {

/// Working bound used for families whose natural domain is unbounded.
inline constexpr double kDefaultWorkingBound = 20.0;

enum class ModelFamily {
  Ricker,                   // x e^{r(1-x)}
  GeneralizedBevertonHolt,  // mu x / (1 + (mu-1) x^c)
  Quadratic,                // x (1 + mu (1-x)) on [0, 1 + 1/mu]
  ExponentialRational,      // (1 + a e^b) x / (1 + a e^{b x})
  BevertonHoltHarvest,      // r x / (1 + (r-1) x) - c x (x-1)
  PiecewiseLinearRecip,     // slope*x | line to (1,1) | 1/x
  CustomTable,              // user pieces built from atoms
};

std::string_view to_string(ModelFamily f);
/// Throws InvalidArgument("unknown family ...").
ModelFamily parse_family(std::string_view tag);

using ParamMap = std::map<std::string, double>;

/// Building block of a CustomTable piece.
///   Affine:     a + b x
///   Power:      k x^e
///   Exp:        k x^e exp(s x)
///   Reciprocal: k / (a + b x)
struct Atom {
  enum class Kind { Affine, Power, Exp, Reciprocal };
  Kind kind = Kind::Affine;
  double k = 0.0;
  double e = 0.0;
  double s = 0.0;
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

std::string_view to_string(Atom::Kind k);
Atom::Kind parse_atom_kind(std::string_view tag);

/// Sum of atoms, valid on [from, next piece's from).
struct Piece {
  double from = 0.0;
  std::vector<Atom> atoms;

  friend bool operator==(const Piece&, const Piece&) = default;
};

/// Value and first three derivatives at a point.
struct Derivatives {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// An immutable instance of a population-model family with its fixed point
/// normalised to 1.
class PopulationModel {
 public:
  ModelFamily family() const { return family_; }
  const ParamMap& params() const { return params_; }
  double param(const std::string& name) const;
  /// Piece table for the piecewise families, empty otherwise.
  const std::vector<Piece>& pieces() const { return pieces_; }

  /// [0, x_max]. For unbounded families x_max is only the working bound used
  /// by grid checks and evaluation beyond it is allowed.
  Interval domain() const { return {0.0, x_max_}; }
  bool bounded_domain() const { return bounded_; }
  double x_max() const { return x_max_; }

  /// Interior piece boundaries, empty for closed-form families.
  std::vector<double> breakpoints() const;
  bool is_c1() const { return smoothness_ >= 1; }
  bool is_c3() const { return smoothness_ >= 3; }

  /// Throws DomainError outside the domain.
  double eval(double x) const;
  /// Throws DomainError outside the domain or at a breakpoint.
  double deriv(double x, int order) const;
  Derivatives derivatives(double x) const;

  /// eval() wrapped to return NaN instead of throwing.
  RealFn as_function() const;

  std::string describe() const;

  /// Same family and identical parameters (x_max is ignored).
  friend bool operator==(const PopulationModel& a, const PopulationModel& b);

 private:
  friend PopulationModel make_model(ModelFamily, const ParamMap&, std::optional<double>);
  friend PopulationModel make_custom_model(std::vector<Piece>, std::optional<double>);

  PopulationModel() = default;

  double clamp_to_domain(double x) const;
  const Piece& piece_at(double x) const;
  Derivatives closed_form(double x) const;
  int compute_smoothness() const;

  ModelFamily family_ = ModelFamily::Ricker;
  ParamMap params_;
  std::vector<Piece> pieces_;
  double x_max_ = kDefaultWorkingBound;
  bool bounded_ = false;
  int smoothness_ = 3;
};

/// Builds a closed-form or piecewise-linear family instance. Parameter names:
///   ricker {r}, generalized_beverton_holt {mu, c}, quadratic {mu},
///   exponential_rational {a, b}, beverton_holt_harvest {r, c},
///   piecewise_linear_recip {slope, knee}.
/// Quadratic and harvesting domains are fixed by their parameters and ignore x_max.
PopulationModel make_model(ModelFamily family, const ParamMap& params,
                           std::optional<double> x_max = std::nullopt);

/// CustomTable model. Pieces must start at 0, be strictly ordered, and give
/// f(0) = 0 and f(1) = 1 to within 1e-12.
PopulationModel make_custom_model(std::vector<Piece> pieces,
                                  std::optional<double> x_max = std::nullopt);

/// f'(1) from the family's closed form; nullopt for piecewise and custom models.
std::optional<double> closed_form_multiplier(const PopulationModel& m);

}  // namespace envstab
