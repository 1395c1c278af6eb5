#pragma once

// Population-model axioms: f(0) = 0, f(1) = 1, f(x) > x on (0, 1),
// f(x) < x beyond 1 and f(x) > 0 beyond 1.

#include <string>
#include <vector>

#include "envstab/model.hpp"
#include "envstab/numerics.hpp"

namespace envstab {

struct AxiomViolation {
  /// fixed_zero, fixed_one, above_diagonal, below_diagonal, positive, tail
  std::string axiom;
  /// "violation" for a definite counterexample, "unresolved" for a cell the
  /// grid could not decide.
  std::string kind = "violation";
  double x = 0.0;
  double fx = 0.0;

  bool unresolved() const { return kind == "unresolved"; }
};

struct NamedSignReport {
  std::string name;
  SignReport report;
};

struct AxiomReport {
  bool is_population_model = false;
  std::vector<AxiomViolation> violations;
  /// Right end of the first interval (0, c) on which f increases: the first
  /// sign change of f', or the domain end when there is none.
  double monotone_rise_bound = 0.0;
  Interval domain;
  std::vector<NamedSignReport> checks;

  /// True when every violation is an undecided grid cell.
  bool only_unresolved() const;
};

/// Description of an arbitrary map handed to the generic checker.
struct MapUnderTest {
  RealFn f;
  /// f' where it exists, NaN elsewhere. Optional.
  RealFn df;
  Interval domain;
  /// Whether the domain end is only a working bound (then the tail beyond it
  /// is sampled as well).
  bool unbounded = true;
};

/// Checks the axioms on the open pieces (0, 1) and (1, hi) with a band of
/// cfg.exclusion_radius cut around 0, 1 and hi. The inequalities are tested
/// in divided form (f(x)/x - 1)/(1 - x) > 0, which stays away from zero at
/// the tangency x = 1 whenever f'(1) < 1.
AxiomReport verify_population_axioms(const MapUnderTest& map, const GridConfig& cfg);
AxiomReport verify_population_axioms(const PopulationModel& model, const GridConfig& cfg);

/// Derivative of a model as a NaN-on-failure function.
RealFn derivative_function(const PopulationModel& model);

}  // namespace envstab
