#pragma once

// Stability verdicts: local multipliers, the 2-cycle oracle, the Schwarzian
// test, H1 + H2 certification, failure diagnosis and the published
// parameter-region conditions of each family.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "envstab/axioms.hpp"
#include "envstab/envelope.hpp"
#include "envstab/model.hpp"
#include "envstab/numerics.hpp"
#include "envstab/periodic_system.hpp"

namespace envstab {

/// |m| - 1 within this band counts as neutral.
inline constexpr double kNeutralBand = 1e-12;

enum class LocalVerdict { Stable, Neutral, Unstable, Undefined };
std::string_view to_string(LocalVerdict v);

struct LocalStability {
  /// Phi_p'(1); NaN when a map has no derivative at 1.
  double multiplier = 0.0;
  LocalVerdict verdict = LocalVerdict::Undefined;
  std::string note;
};

LocalStability local_stability(const PeriodicSystem& sys);
LocalVerdict classify_multiplier(double m);

enum class OracleVerdict { GloballyStable, NotGloballyStable, Inconclusive };
std::string_view to_string(OracleVerdict v);

struct TwoCycleOracle {
  OracleVerdict verdict = OracleVerdict::Inconclusive;
  /// Prime-period-2 points of Phi_p, as (x, Phi_p(x)) with x < Phi_p(x).
  std::vector<std::pair<double, double>> two_cycles;
  /// Positive fixed points of Phi_p other than 1.
  std::vector<double> extra_fixed_points;
  /// Signs of (Phi_p^2(x) - x) / (x (1 - x)) on both sides of 1.
  SignReport left;
  SignReport right;
  Interval interval;
};

/// Sign test of g(x) = Phi_p(Phi_p(x)) - x over the working interval: the system
/// is globally stable iff g > 0 left of 1, g < 0 right of 1 and 1 is the only
/// positive fixed point.
TwoCycleOracle two_cycle_oracle(const PeriodicSystem& sys, const GridConfig& cfg);
TwoCycleOracle two_cycle_oracle(const PopulationModel& f, const GridConfig& cfg);

/// Sf = f'''/f' - 1.5 (f''/f')^2. Throws DomainError at a critical point.
double schwarzian(const PopulationModel& f, double x);

struct SchwarzianVerdict {
  bool passes = false;
  std::vector<double> critical_points;
  /// Largest Sf over the sampled grid (must be negative).
  double min_margin = 0.0;
  double local_multiplier = 0.0;
  std::vector<std::string> reasons;
};

/// Throws InvalidArgument for models that are not C^3.
SchwarzianVerdict schwarzian_test(const PopulationModel& f, const GridConfig& cfg);

enum class CertificateStatus { CertifiedGlobal, LocalOnly, NotPopulationModel, EnvelopeNotFound, Inconclusive };
std::string_view to_string(CertificateStatus s);

struct H1Evidence {
  std::vector<AxiomReport> maps;
  std::vector<bool> c1;
  AxiomReport composition;
  ChainingRecord chaining;
  Interval working_interval;
  /// "passed", "failed" or "unresolved".
  std::string outcome;
};

struct CandidateEvidence {
  Envelope envelope;
  InvolutionCheck involution;
  DecreasingCheck decreasing;
  std::vector<EnvelopeVerdict> verdicts;
  bool passed = false;
  /// Where the candidate came from: "given" or "mobius_fit".
  std::string source;
};

struct H2Evidence {
  std::vector<CandidateEvidence> candidates;
  std::optional<MobiusFit> mobius_scan;
  /// "passed", "failed" or "unresolved".
  std::string outcome;
};

struct LabeledPoint {
  std::string label;
  double x = 0.0;
  double value = 0.0;
};

struct StabilityCertificate {
  CertificateStatus status = CertificateStatus::Inconclusive;
  double multiplier = 0.0;
  LocalVerdict local = LocalVerdict::Undefined;
  bool neutral = false;
  H1Evidence h1;
  H2Evidence h2;
  std::optional<Envelope> envelope_used;
  std::vector<LabeledPoint> witnesses;
  std::vector<Interval> unresolved;
  TwoCycleOracle oracle;
  /// For certified systems: whether the 2-cycle oracle agrees.
  bool oracle_agrees = true;
  GridConfig tolerances;
  double involution_epsilon = 1e-6;
  std::size_t alpha_grid = 1000;
  std::vector<std::string> notes;
};

struct CertifyOptions {
  /// Mobius alpha resolution for the fallback scan; 0 disables it.
  std::size_t alpha_grid = 1000;
  double involution_tol = 1e-9;
  double involution_epsilon = 1e-6;
};

StabilityCertificate certify_global_stability(const PeriodicSystem& sys,
                                              const std::vector<Envelope>& candidates,
                                              const GridConfig& cfg, const CertifyOptions& opt = {});

/// Exit-style classification of a certificate: 0 certified, 1 negative, 2 inconclusive.
int status_exit_code(CertificateStatus s);

struct ViolationWindow {
  /// "left" (below the fixed point) or "right".
  std::string side;
  double lo = 0.0;
  double hi = 0.0;
};

struct FailureDiagnosis {
  bool failure_found = false;
  std::string conclusion;
  AxiomReport composition;
  std::vector<double> extra_fixed_points;
  /// Intervals where no decreasing involution can pass between the graphs
  /// of the individual maps.
  std::vector<ViolationWindow> windows;
  std::vector<std::string> notes;
};

FailureDiagnosis diagnose_failure(const PeriodicSystem& sys, const GridConfig& cfg);

struct MapCondition {
  std::size_t index = 0;
  std::string family;
  std::string condition;
  bool passes = false;
  double multiplier = 0.0;
};

struct ClosedFormReport {
  std::vector<MapCondition> maps;
  double product = 0.0;
  bool product_stable = false;
  bool all_pass = false;
  std::vector<std::string> notes;
};

/// Throws InvalidArgument("no closed form available ...") for piecewise and
/// custom maps.
ClosedFormReport closed_form_conditions(const PeriodicSystem& sys);

}  // namespace envstab
