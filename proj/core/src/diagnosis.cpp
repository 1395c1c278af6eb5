#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "envstab/certifier.hpp"
#include "envstab/error.hpp"

namespace envstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double max_of_maps(const PeriodicSystem& sys, double x) {
  double v = -kInf;
  for (const auto& f : sys.maps()) v = std::max(v, f.eval(x));
  return v;
}

// Smallest positive map value at x; maps that are not positive there impose
// no constraint (condition (ii) of the enveloping definition).
double min_positive_of_maps(const PeriodicSystem& sys, double x) {
  double v = kInf;
  for (const auto& f : sys.maps()) {
    double y = kNaN;
    try {
      y = f.eval(x);
    } catch (const DomainError&) {
      continue;
    }
    if (y > 0.0) v = std::min(v, y);
  }
  return v;
}

double bisect(const std::function<bool(double)>& left_side, double a, double b) {
  for (int it = 0; it < 60; ++it) {
    const double m = 0.5 * (a + b);
    if (left_side(m)) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Collects maximal runs of grid points satisfying pred, with refined ends.
std::vector<ViolationWindow> runs(const std::string& side, const std::function<bool(double)>& pred,
                                  double lo, double hi, int n) {
  std::vector<ViolationWindow> out;
  std::vector<bool> in(static_cast<std::size_t>(n) + 1);
  auto at = [&](int k) { return lo + (hi - lo) * k / n; };
  for (int k = 0; k <= n; ++k) in[k] = pred(at(k));
  int k = 0;
  while (k <= n) {
    if (!in[k]) {
      ++k;
      continue;
    }
    int j = k;
    while (j + 1 <= n && in[j + 1]) ++j;
    ViolationWindow w{side, at(k), at(j)};
    if (k > 0) w.lo = bisect([&](double x) { return !pred(x); }, at(k - 1), at(k));
    if (j < n) w.hi = bisect(pred, at(j), at(j + 1));
    out.push_back(w);
    k = j + 1;
  }
  return out;
}

}  // namespace

FailureDiagnosis diagnose_failure(const PeriodicSystem& sys, const GridConfig& cfg) {
  cfg.validate();
  FailureDiagnosis out;

  RealFn dphi = [sys](double x) {
    try {
      return composition_derivative(sys, x);
    } catch (const DomainError&) {
      return kNaN;
    }
  };
  out.composition = verify_population_axioms(
      MapUnderTest{period_map(sys), std::move(dphi), sys.working_interval(), !sys.bounded()}, cfg);
  for (double x : find_fixed_points(sys, cfg).positive()) {
    if (std::abs(x - 1.0) > 1e-7) out.extra_fixed_points.push_back(x);
  }

  const bool composition_fails =
      std::any_of(out.composition.violations.begin(), out.composition.violations.end(),
                  [](const AxiomViolation& v) { return !v.unresolved(); }) ||
      !out.extra_fixed_points.empty();
  if (!composition_fails) {
    out.conclusion = "no failure to diagnose";
    return out;
  }
  out.failure_found = true;

  std::ostringstream msg;
  msg << "Phi_p is not a population model";
  if (!out.extra_fixed_points.empty()) {
    msg << " (positive fixed points besides 1:";
    for (double x : out.extra_fixed_points) msg << " " << fmt(x);
    msg << ")";
  } else {
    const auto& v = out.composition.violations.front();
    msg << " (" << v.axiom << " fails at x=" << fmt(v.x) << ", Phi_p(x)=" << fmt(v.fx) << ")";
  }
  msg << "; hence no decreasing involution can envelop all the individual maps";
  out.conclusion = msg.str();

  // Windows where the graphs of the maps leave no room for a decreasing
  // involution h: on the right, h(x) must lie in [lower(x), upper(x)) with
  //   lower(x) = sup{ y < 1 : max_i f_i(y) >= x },  upper(x) = min_i f_i(x);
  // on the left, the mirror statement with the roles of the sides exchanged.
  const int n = 4 * cfg.seed_cells;
  const double d = cfg.exclusion_radius;

  std::vector<double> ys(static_cast<std::size_t>(n) + 1);
  std::vector<double> suffix_max(ys.size());
  for (int k = 0; k <= n; ++k) ys[k] = static_cast<double>(k) / n;
  for (int k = n; k >= 0; --k) {
    const double v = max_of_maps(sys, ys[k]);
    suffix_max[k] = k == n ? v : std::max(v, suffix_max[k + 1]);
  }
  const double reach = suffix_max[0];
  auto lower = [&](double x) {
    if (suffix_max[0] < x) return -kInf;
    // largest k with suffix_max[k] >= x
    int a = 0;
    int b = n;
    while (a < b) {
      const int m = (a + b + 1) / 2;
      if (suffix_max[m] >= x) {
        a = m;
      } else {
        b = m - 1;
      }
    }
    if (a == n) return 1.0;
    return bisect([&](double y) { return max_of_maps(sys, y) >= x; }, ys[a], ys[a + 1]);
  };
  const double right_hi = std::min(reach, sys.working_interval().hi);
  if (right_hi > 1.0 + d) {
    auto blocked = [&](double x) {
      const double up = min_positive_of_maps(sys, x);
      return std::isfinite(up) && lower(x) >= up;
    };
    for (auto& w : runs("right", blocked, 1.0 + d, right_hi, n)) out.windows.push_back(w);
  }

  const double wr = sys.working_interval().hi;
  std::vector<double> xs(static_cast<std::size_t>(n) + 1);
  std::vector<double> prefix_min(xs.size());
  for (int k = 0; k <= n; ++k) {
    xs[k] = 1.0 + (wr - 1.0) * k / n;
    const double v = min_positive_of_maps(sys, xs[k]);
    prefix_min[k] = k == 0 ? v : std::min(v, prefix_min[k - 1]);
  }
  auto upper_left = [&](double y) {
    if (!(prefix_min[n] <= y)) return kInf;
    // prefix_min is non-increasing
    const auto it = std::partition_point(prefix_min.begin(), prefix_min.end(), [&](double v) { return v > y; });
    const auto k = static_cast<std::size_t>(it - prefix_min.begin());
    if (k == 0) return 1.0;
    return bisect([&](double x) { return min_positive_of_maps(sys, x) > y; }, xs[k - 1], xs[k]);
  };
  if (wr > 1.0 + d) {
    auto blocked = [&](double y) { return max_of_maps(sys, y) >= upper_left(y); };
    for (auto& w : runs("left", blocked, d, 1.0 - d, n)) out.windows.push_back(w);
  }

  if (out.windows.empty()) {
    out.notes.push_back("the obstruction is the fixed-point structure of Phi_p; no sandwich window was located");
  }
  return out;
}

}  // namespace envstab
