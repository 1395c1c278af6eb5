#pragma once

// Envelopes: decreasing involutions h with h(1) = 1 that bound a population
// model from above on (0, 1) and from below on (1, x_h).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "envstab/expression.hpp"
#include "envstab/model.hpp"
#include "envstab/numerics.hpp"
#include "envstab/periodic_system.hpp"

namespace envstab {

enum class EnvelopeKind { Mobius, Reciprocal, PiecewiseBH, Custom };

std::string_view to_string(EnvelopeKind k);
/// Accepts mobius, reciprocal, piecewise_bh, custom.
EnvelopeKind parse_envelope_kind(std::string_view tag);

class Envelope {
 public:
  EnvelopeKind kind() const { return kind_; }
  /// Mobius parameter; for PiecewiseBH the equivalent Mobius alpha.
  double alpha() const { return alpha_; }
  /// PiecewiseBH parameter c (> 2).
  double c() const { return c_; }
  /// Custom expression text, empty for the built-in kinds.
  const std::string& expression() const { return text_; }
  /// Positive root of h, +inf when h stays positive.
  double x_h() const { return x_h_; }

  double operator()(double x) const;
  RealFn as_function() const;
  std::string describe() const;

 private:
  friend Envelope make_mobius(double);
  friend Envelope make_reciprocal();
  friend Envelope make_piecewise_bh(double);
  friend Envelope make_custom_envelope(const std::string&);
  Envelope() = default;

  EnvelopeKind kind_ = EnvelopeKind::Mobius;
  double alpha_ = 0.0;
  double c_ = 0.0;
  std::string text_;
  std::optional<Expression> expr_;
  double x_h_ = 0.0;
};

/// h(x) = (1 - a x) / (a - (2a - 1) x), 0 <= a < 1; a = 0 is stored as 1/x.
Envelope make_mobius(double alpha);
/// h(x) = 1/x.
Envelope make_reciprocal();
/// h(x) = (c - 1 - (c - 2) x) / (c - 2 - (c - 3) x), c > 2.
Envelope make_piecewise_bh(double c);
/// Arbitrary expression in x. Throws InvalidArgument unless h(1) = 1 within 1e-12.
/// x_h is the first root of h on (1, 1280], or +inf.
Envelope make_custom_envelope(const std::string& expression);

/// Right end used when sampling h on (0, x_h): x_h, or the default working
/// bound when x_h is infinite.
double sampling_end(const Envelope& h);

struct InvolutionCheck {
  double max_residual = 0.0;
  double worst_x = 0.0;
  /// False when h is not positive (or not finite) somewhere on the sampled range.
  bool structural_ok = true;
  std::optional<double> nonpositive_at;
  Interval checked;
  double epsilon = 1e-6;

  bool passes(double tol = 1e-9) const { return structural_ok && max_residual <= tol; }
};

/// max |h(h(x)) - x| over 4 * cfg.seed_cells + 1 points of (eps, x_h - eps).
InvolutionCheck check_involution(const Envelope& h, const GridConfig& cfg, double epsilon = 1e-6);

struct DecreasingCheck {
  bool decreasing = true;
  /// First sample x_k with h(x_k) <= h(x_{k+1}).
  std::optional<double> witness;
};

DecreasingCheck check_decreasing(const Envelope& h, const GridConfig& cfg, double epsilon = 1e-6);

struct EnvelopeWitness {
  double x = 0.0;
  double fx = 0.0;
  double hx = 0.0;
  bool unresolved = false;
};

struct EnvelopeVerdict {
  bool envelops = false;
  /// Violation (or undecided cell) of h > f on (0, 1).
  std::optional<EnvelopeWitness> lower_witness;
  /// Violation (or undecided cell) of h < f on (1, x_h).
  std::optional<EnvelopeWitness> upper_witness;
  Interval checked_interval;
  double exclusion_radius = 0.0;
  SignReport lower;
  SignReport upper;
  std::string model;

  /// A genuine counterexample was found (not just an undecided cell).
  bool definite_failure() const {
    return (lower_witness && !lower_witness->unresolved) ||
           (upper_witness && !upper_witness->unresolved);
  }
};

/// Checks (h - f)/(1 - x) > 0 on [d, 1 - d] and (f - h)/(x - 1) > 0 on
/// [1 + d, min(x_h, x_max) - d] where both f and h are positive, with
/// d = cfg.exclusion_radius. For unbounded f the tail 2^k x_max (k = 1..6)
/// below x_h is sampled as well.
EnvelopeVerdict envelops(const Envelope& h, const PopulationModel& f, const GridConfig& cfg);

/// One verdict per map of the system.
std::vector<EnvelopeVerdict> common_envelope(const Envelope& h, const PeriodicSystem& sys,
                                             const GridConfig& cfg);
bool all_envelop(const std::vector<EnvelopeVerdict>& verdicts);

struct SandwichWitness {
  std::string condition;
  double x = 0.0;
  double value = 0.0;
  bool unresolved = false;
};

struct SandwichVerdict {
  bool passes = false;
  std::vector<SandwichWitness> witnesses;
};

/// On (0, 1): f < h and f(h(x)) > x. On (1, x_h): f > h and f(h(x)) < x.
/// Points where f or f(h(x)) is not positive are skipped as in the
/// enveloping definition; h(x) outside the domain of f leaves the cell
/// unresolved.
SandwichVerdict sandwich_check(const Envelope& h, const PopulationModel& f, const GridConfig& cfg);

struct AlphaRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct MobiusFit {
  std::size_t alpha_grid = 1000;
  /// Maximal runs of feasible grid values, ends refined by bisection.
  std::vector<AlphaRange> feasible;
  std::size_t feasible_points = 0;

  bool empty() const { return feasible.empty(); }
  bool contains(double alpha) const;
};

/// Scans alpha = k / alpha_grid for k = 0 .. alpha_grid - 1.
MobiusFit fit_mobius(const PopulationModel& f, std::size_t alpha_grid, const GridConfig& cfg);
MobiusFit fit_mobius(const PeriodicSystem& sys, std::size_t alpha_grid, const GridConfig& cfg);

}  // namespace envstab
