#include "envstab/periodic_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "envstab/error.hpp"

namespace envstab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kChainingSamples = 2048;
constexpr double kMergeTol = 1e-9;
// Two orbit points closer than this are treated as the same point when
// deciding the period of a cycle.
constexpr double kPeriodTol = 1e-7;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::vector<double> merge_sorted(std::vector<double> xs, double tol) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs) {
    if (!out.empty() && x - out.back() <= tol) continue;
    out.push_back(x);
  }
  return out;
}

// Maximum of f over [0, hi]: grid search followed by golden-section refinement.
double max_on(const PopulationModel& f, double hi) {
  const int n = 4096;
  int best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    const double v = f.eval(hi * k / n);
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  double a = hi * std::max(0, best - 1) / n;
  double b = hi * std::min(n, best + 1) / n;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double c = b - g * (b - a);
    const double d = a + g * (b - a);
    if (f.eval(c) > f.eval(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return std::max(best_v, f.eval(0.5 * (a + b)));
}

RealFn safe(const std::function<double(double)>& g) {
  return [g](double x) {
    try {
      return g(x);
    } catch (const DomainError&) {
      return kNaN;
    }
  };
}

}  // namespace

PeriodicSystem make_system(std::vector<PopulationModel> models) {
  if (models.empty()) throw InvalidArgument("a periodic system needs at least one map");
  const std::size_t p = models.size();

  for (std::size_t d = 1; d < p; ++d) {
    if (p % d != 0) continue;
    bool repeats = true;
    for (std::size_t i = 0; i < p && repeats; ++i) repeats = models[i] == models[(i + d) % p];
    if (repeats) {
      throw InvalidArgument("minimal period is " + std::to_string(d) + ", not " + std::to_string(p));
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    const double f0 = models[i].eval(0.0);
    const double f1 = models[i].eval(1.0);
    if (!(std::abs(f0) <= 1e-12) || !(std::abs(f1 - 1.0) <= 1e-12)) {
      throw InvalidArgument("map " + std::to_string(i) + " (" + models[i].describe() +
                            ") does not fix 0 and 1");
    }
  }

  PeriodicSystem sys;
  sys.maps_ = std::move(models);
  sys.bounded_ = std::any_of(sys.maps_.begin(), sys.maps_.end(),
                             [](const PopulationModel& m) { return m.bounded_domain(); });

  double hi = std::numeric_limits<double>::infinity();
  for (const auto& m : sys.maps_) hi = std::min(hi, m.x_max());
  if (sys.bounded_) {
    double j = std::numeric_limits<double>::infinity();
    for (const auto& m : sys.maps_) j = std::min(j, max_on(m, hi));
    // J always contains [0, 1] because every map fixes 1.
    hi = std::min(hi, std::max(1.0, j));
  }
  sys.working_ = make_interval(0.0, hi);

  ChainingRecord& chain = sys.chaining_;
  chain.max_image.assign(p, 0.0);
  for (int k = 0; k <= kChainingSamples; ++k) {
    const double x0 = hi * k / kChainingSamples;
    double x = x0;
    for (std::size_t i = 0; i < p; ++i) {
      try {
        x = sys.maps_[i].eval(x);
      } catch (const DomainError&) {
        throw InvalidArgument("domain chaining fails at phase " + std::to_string(i) + ": x=" +
                              fmt(x0) + " reaches " + fmt(x) + ", outside the domain of " +
                              sys.maps_[i].describe());
      }
      chain.max_image[i] = std::max(chain.max_image[i], x);
    }
    ++chain.samples;
  }
  chain.verified = true;
  chain.note = "partial compositions checked on " + std::to_string(chain.samples) +
               " grid points of the working interval";
  return sys;
}

double compose_eval(const PeriodicSystem& sys, double x, std::size_t n, std::size_t start) {
  for (std::size_t k = 0; k < n; ++k) {
    const PopulationModel& f = sys.map(start + k);
    try {
      x = f.eval(x);
    } catch (const DomainError& e) {
      throw DomainError("composition step " + std::to_string(k) + " (map " +
                        std::to_string((start + k) % sys.p()) + "): " + e.what());
    }
  }
  return x;
}

RealFn period_map(const PeriodicSystem& sys) {
  return safe([sys](double x) { return compose_eval(sys, x, sys.p()); });
}

double composition_derivative(const PeriodicSystem& sys, double x) {
  double product = 1.0;
  for (std::size_t i = 0; i < sys.p(); ++i) {
    product *= sys.map(i).deriv(x, 1);
    x = sys.map(i).eval(x);
  }
  return product;
}

std::vector<double> iterate_orbit(const PeriodicSystem& sys, double x0, std::size_t num_periods) {
  const std::size_t steps = sys.p() * num_periods;
  std::vector<double> orbit;
  orbit.reserve(steps + 1);
  orbit.push_back(x0);
  double x = x0;
  for (std::size_t t = 0; t < steps; ++t) {
    try {
      x = sys.map(t).eval(x);
    } catch (const DomainError& e) {
      throw DomainError("orbit escapes at step " + std::to_string(t) + ": " + e.what());
    }
    orbit.push_back(x);
  }
  return orbit;
}

std::vector<double> FixedPointScan::positive() const {
  std::vector<double> out;
  for (double x : points) {
    if (x > kMergeTol) out.push_back(x);
  }
  return out;
}

FixedPointScan find_fixed_points(const PeriodicSystem& sys, const GridConfig& cfg) {
  cfg.validate();
  const RealFn phi = period_map(sys);
  const RealFn g = [&phi](double x) { return phi(x) - x; };

  FixedPointScan out;
  out.interval = sys.working_interval();
  out.resolution = out.interval.length() / cfg.seed_cells;

  auto roots = scan_roots(g, out.interval, cfg.seed_cells, out.refine_tol);
  roots.push_back(0.0);
  roots.push_back(1.0);
  out.points = merge_sorted(std::move(roots), kMergeTol);
  // Prefer the exact values 0 and 1 over refined approximations of them.
  for (double& x : out.points) {
    if (std::abs(x) <= kMergeTol) x = 0.0;
    if (std::abs(x - 1.0) <= kMergeTol) x = 1.0;
  }
  out.points = merge_sorted(std::move(out.points), kMergeTol);

  const int n = cfg.seed_cells;
  std::vector<double> v(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) v[k] = std::abs(g(out.interval.lo + k * out.resolution));
  for (int k = 1; k < n; ++k) {
    const double x = out.interval.lo + k * out.resolution;
    if (!(v[k] < 1e-6) || v[k] > v[k - 1] || v[k] > v[k + 1]) continue;
    const bool known = std::any_of(out.points.begin(), out.points.end(), [&](double r) {
      return std::abs(r - x) <= 2.0 * out.resolution;
    });
    if (!known) out.suspected_tangencies.push_back(x);
  }
  return out;
}

CycleScan find_geometric_cycles(const PeriodicSystem& sys, std::size_t r_max,
                                const GridConfig& cfg) {
  cfg.validate();
  if (r_max < 1) throw InvalidArgument("r_max must be at least 1");
  const std::size_t p = sys.p();

  CycleScan out;
  out.r_max = r_max;
  out.refine_tol = 1e-12;
  const Interval w = sys.working_interval();
  out.resolution = w.length() / cfg.seed_cells;

  auto same = [](double a, double b) { return std::abs(a - b) <= kPeriodTol * std::max(1.0, std::abs(a)); };

  for (std::size_t r = 1; r <= r_max; ++r) {
    const std::size_t s = std::lcm(r, p);
    const RealFn g = safe([&sys, s](double x) { return compose_eval(sys, x, s) - x; });
    auto candidates = scan_roots(g, w, cfg.seed_cells, out.refine_tol);
    for (double& x : candidates) {
      if (std::abs(x - 1.0) <= kMergeTol) x = 1.0;
    }
    candidates.push_back(1.0);
    candidates = merge_sorted(std::move(candidates), kMergeTol);

    std::vector<GeometricCycle> found;
    for (double x0 : candidates) {
      if (x0 <= kMergeTol) continue;
      std::vector<double> orbit;
      try {
        orbit = iterate_orbit(sys, x0, s / p);
      } catch (const DomainError&) {
        continue;
      }
      auto has_period = [&](std::size_t q) {
        for (std::size_t t = 0; t + q <= s; ++t) {
          if (!same(orbit[t], orbit[t + q])) return false;
        }
        return true;
      };
      if (!has_period(r)) continue;
      bool minimal = true;
      for (std::size_t q = 1; q < r && minimal; ++q) {
        if (r % q == 0 && has_period(q)) minimal = false;
      }
      if (!minimal) continue;

      // Canonical start: the smallest phase-0 point, so the same cycle found
      // from different starting points is reported once.
      std::size_t t0 = 0;
      for (std::size_t t = p; t < s; t += p) {
        if (orbit[t] < orbit[t0]) t0 = t;
      }
      const bool duplicate = std::any_of(found.begin(), found.end(), [&](const GeometricCycle& c) {
        return same(c.points.front(), orbit[t0]);
      });
      if (duplicate) continue;

      GeometricCycle c;
      c.r = r;
      c.s = s;
      const std::vector<double> lift = iterate_orbit(sys, orbit[t0], s / p);
      for (std::size_t t = 0; t < r; ++t) c.points.push_back(lift[t]);
      for (std::size_t t = 0; t < s; ++t) {
        c.complete.emplace_back(lift[t], t % p);
        const double next = sys.map(t).eval(c.points[t % r]);
        c.max_residual = std::max(c.max_residual, std::abs(next - c.points[(t + 1) % r]));
      }
      found.push_back(std::move(c));
    }
    std::sort(found.begin(), found.end(), [](const GeometricCycle& a, const GeometricCycle& b) {
      return a.points.front() < b.points.front();
    });
    for (auto& c : found) out.cycles.push_back(std::move(c));
  }
  return out;
}

MonotonicityReport monotonicity_bound(const PeriodicSystem& sys, const GridConfig& cfg) {
  cfg.validate();
  for (std::size_t i = 0; i < sys.p(); ++i) {
    if (!sys.map(i).is_c1()) {
      throw InvalidArgument("map " + std::to_string(i) + " (" + sys.map(i).describe() +
                            ") is not C^1");
    }
  }
  const Interval w = sys.working_interval();
  MonotonicityReport out;

  const RealFn dphi = safe([&sys](double x) { return composition_derivative(sys, x); });
  const auto crit = scan_roots(dphi, make_interval(cfg.exclusion_radius, w.hi), cfg.seed_cells, 1e-10);
  out.c_phi = crit.empty() ? w.hi : crit.front();

  if (sys.p() == 1) {
    out.x_phi = w.hi;
    return out;
  }
  const RealFn phi = period_map(sys);
  auto above_all = [&](double x) {
    const double v = phi(x);
    for (std::size_t i = 0; i < sys.p(); ++i) {
      if (!(v > sys.map(i).eval(x))) return false;
    }
    return true;
  };
  const int n = cfg.seed_cells;
  double prev = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double x = w.hi * k / n;
    if (above_all(x)) {
      prev = x;
      continue;
    }
    double a = prev > 0.0 ? prev : x * 1e-6;
    double b = x;
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (a + b);
      if (above_all(m)) {
        a = m;
      } else {
        b = m;
      }
    }
    out.x_phi = a;
    return out;
  }
  out.x_phi = w.hi;
  return out;
}

}  // namespace envstab
