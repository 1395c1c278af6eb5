#pragma once

// Shared numerical machinery: adaptive sign verification on intervals,
// bracketed root finding, multi-root scans and finite-difference stencils.
//
// Functions handed to these routines use NaN to mean "undefined here"
// (domain escape, derivative at a breakpoint). NaN samples never satisfy or
// violate a claim; they force refinement and end up as unresolved cells.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace envstab {

using RealFn = std::function<double(double)>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Throws InvalidArgument unless lo < hi and both are finite.
Interval make_interval(double lo, double hi);

struct GridConfig {
  int seed_cells = 4096;
  int max_refinement_depth = 12;
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double exclusion_radius = 1e-4;

  /// Throws InvalidArgument on non-positive fields or depth > 30.
  void validate() const;
};

enum class Claim { Positive, Negative };

enum class SignStatus { AllPositive, AllNegative, ViolationAt, Unresolved };

std::string to_string(SignStatus s);

struct SignReport {
  SignStatus status = SignStatus::Unresolved;
  Interval interval;
  /// Set when status == ViolationAt.
  std::optional<double> witness;
  std::optional<double> witness_value;
  /// Cells that could not be decided at maximum depth, merged and in order.
  std::vector<Interval> unresolved;
  std::size_t cells_checked = 0;
  /// Smallest |g| among finite samples.
  double min_abs_value = 0.0;

  bool verified() const {
    return status == SignStatus::AllPositive || status == SignStatus::AllNegative;
  }
  bool violated() const { return status == SignStatus::ViolationAt; }
};

/// Verifies that g has the claimed sign on [lo, hi].
///
/// The interval is cut into cfg.seed_cells cells. A cell is sampled at its
/// endpoints, quartiles and midpoint and is accepted when every sample lies
/// on the claimed side of zero by more than cfg.abs_tol. Any sample on the
/// wrong side by more than cfg.abs_tol is reported as a violation. Anything
/// else is bisected up to cfg.max_refinement_depth; leftovers are Unresolved.
/// Cells are visited left to right and the first violation found is reported.
SignReport adaptive_sign_check(const RealFn& g, Interval interval, Claim claim,
                               const GridConfig& cfg);

/// Root of g on [a, b] within tol, by bisection with secant steps.
/// Throws NumericalError if g(a) and g(b) do not differ in sign or if g is
/// not finite at an evaluated point.
double bracketed_root(const RealFn& g, double a, double b, double tol);

/// Every sign-change root of g at seed resolution, refined to tol.
/// Exact zeros at grid nodes are kept; roots closer than tol are merged.
std::vector<double> scan_roots(const RealFn& g, Interval interval, int seed_cells, double tol);

/// Default finite-difference step for the given derivative order at x:
/// 1e-3, 5e-3 and 1e-2 times max(0.05, |x|) for orders 1, 2 and 3.
double default_fd_step(double x, int order);

/// Central finite-difference derivative of order 1, 2 or 3 (fourth-order
/// accurate stencils reaching x +- 3h at most). h <= 0 selects the default.
/// If `domain` is given, a stencil leaving it raises DomainError.
double fd_derivative(const RealFn& g, double x, int order, double h = 0.0,
                     std::optional<Interval> domain = std::nullopt);

}  // namespace envstab
