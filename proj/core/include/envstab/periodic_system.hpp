#pragma once

// p-periodic non-autonomous equations x_{n+1} = f_{n mod p}(x_n) and the
// composition operator Phi_n^i = f_{n+i-1} o ... o f_{i+1} o f_i.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "envstab/model.hpp"
#include "envstab/numerics.hpp"

namespace envstab {

/// Result of the grid check that every partial composition Phi_i (i < p)
/// maps the working interval into the domain of the next map.
struct ChainingRecord {
  bool verified = true;
  std::size_t samples = 0;
  /// Largest image reached at each phase, for reference.
  std::vector<double> max_image;
  std::string note;
};

class PeriodicSystem {
 public:
  const std::vector<PopulationModel>& maps() const { return maps_; }
  std::size_t p() const { return maps_.size(); }
  /// Map applied at time n (indices reduce mod p).
  const PopulationModel& map(std::size_t n) const { return maps_[n % maps_.size()]; }

  /// [0, m] where scans of the compositions run. For systems built only from
  /// unbounded families this is [0, smallest working bound]; when a map has a
  /// bounded domain it is J = [0, min_n max_{x in I} f_n(x)] with I the
  /// intersection of the domains.
  Interval working_interval() const { return working_; }
  /// True when some map has a genuinely bounded domain.
  bool bounded() const { return bounded_; }
  const ChainingRecord& chaining() const { return chaining_; }

 private:
  friend PeriodicSystem make_system(std::vector<PopulationModel> models);
  PeriodicSystem() = default;

  std::vector<PopulationModel> maps_;
  Interval working_;
  bool bounded_ = false;
  ChainingRecord chaining_;
};

/// Throws InvalidArgument for an empty list, a non-minimal period, maps not
/// sharing the fixed points 0 and 1, or a domain-chaining failure (message
/// names the phase and the witness x).
PeriodicSystem make_system(std::vector<PopulationModel> models);

/// Phi_n^i(x). Throws DomainError naming the step when an iterate leaves the
/// domain of the map about to be applied.
double compose_eval(const PeriodicSystem& sys, double x, std::size_t n, std::size_t start = 0);

/// Phi_p at phase 0 as a NaN-on-failure function.
RealFn period_map(const PeriodicSystem& sys);

/// Phi_p'(x) at phase 0 by the chain rule. Throws DomainError when a visited
/// point is a breakpoint or leaves a domain.
double composition_derivative(const PeriodicSystem& sys, double x);

/// x_0, ..., x_{p * num_periods}. Throws DomainError naming the step on escape.
std::vector<double> iterate_orbit(const PeriodicSystem& sys, double x0, std::size_t num_periods);

struct FixedPointScan {
  /// Sorted fixed points of Phi_p in the working interval, 0 and 1 included.
  std::vector<double> points;
  Interval interval;
  /// Seed grid spacing and refinement tolerance of the scan.
  double resolution = 0.0;
  double refine_tol = 1e-10;
  /// Grid nodes where |Phi_p(x) - x| has a near-zero local minimum without a
  /// sign change: possible tangential fixed points the scan cannot confirm.
  std::vector<double> suspected_tangencies;

  std::vector<double> positive() const;
};

FixedPointScan find_fixed_points(const PeriodicSystem& sys, const GridConfig& cfg);

/// Geometric r-cycle: x_t = points[t mod r] along the orbit started at
/// points[0] at time 0, with its lift to the skew product of length
/// s = lcm(r, p).
struct GeometricCycle {
  std::size_t r = 1;
  std::vector<double> points;
  std::size_t s = 1;
  /// (point, map index) for t = 0 .. s-1.
  std::vector<std::pair<double, std::size_t>> complete;
  /// Largest |f_{t mod p}(x_t) - x_{t+1}| over the complete cycle.
  double max_residual = 0.0;
};

struct CycleScan {
  std::vector<GeometricCycle> cycles;
  std::size_t r_max = 1;
  double resolution = 0.0;
  double refine_tol = 1e-10;
};

/// Positive geometric cycles of minimal period r <= r_max.
CycleScan find_geometric_cycles(const PeriodicSystem& sys, std::size_t r_max,
                                const GridConfig& cfg);

struct MonotonicityReport {
  /// First critical point of Phi_p, or the working-interval end.
  double c_phi = 0.0;
  /// End of the first interval (0, x_phi) on which Phi_p > f_i for every i;
  /// the working-interval end for p = 1.
  double x_phi = 0.0;
};

/// Throws InvalidArgument when a map is not C^1.
MonotonicityReport monotonicity_bound(const PeriodicSystem& sys, const GridConfig& cfg);

}  // namespace envstab
