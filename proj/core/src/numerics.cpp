#include "envstab/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "envstab/error.hpp"

namespace envstab {

Interval make_interval(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw InvalidArgument("interval requires finite lo < hi, got [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
  }
  return {lo, hi};
}

void GridConfig::validate() const {
  if (seed_cells <= 0) throw InvalidArgument("seed_cells must be positive");
  if (max_refinement_depth <= 0 || max_refinement_depth > 30) {
    throw InvalidArgument("max_refinement_depth must lie in [1, 30]");
  }
  if (!(abs_tol > 0.0)) throw InvalidArgument("abs_tol must be positive");
  if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
  if (!(exclusion_radius > 0.0)) throw InvalidArgument("exclusion_radius must be positive");
}

std::string to_string(SignStatus s) {
  switch (s) {
    case SignStatus::AllPositive: return "AllPositive";
    case SignStatus::AllNegative: return "AllNegative";
    case SignStatus::ViolationAt: return "ViolationAt";
    case SignStatus::Unresolved: return "Unresolved";
  }
  return "Unknown";
}

namespace {

class SignChecker {
 public:
  SignChecker(const RealFn& g, Claim claim, const GridConfig& cfg, SignReport& report)
      : g_(g), claim_(claim), cfg_(cfg), report_(report) {}

  bool stopped() const { return stopped_; }

  void check_cell(double a, double fa, double b, double fb, int depth) {
    if (stopped_) return;
    ++report_.cells_checked;

    const double m = 0.5 * (a + b);
    const std::array<double, 5> xs{a, 0.5 * (a + m), m, 0.5 * (m + b), b};
    std::array<double, 5> vs{fa, g_(xs[1]), g_(xs[2]), g_(xs[3]), fb};

    bool accepted = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double v = vs[i];
      if (std::isfinite(v)) report_.min_abs_value = std::min(report_.min_abs_value, std::abs(v));
      const double margin = claim_ == Claim::Positive ? v : -v;
      if (margin < -cfg_.abs_tol) {
        report_.witness = xs[i];
        report_.witness_value = v;
        stopped_ = true;
        return;
      }
      if (!(margin > cfg_.abs_tol)) accepted = false;
    }
    if (accepted) return;

    if (depth >= cfg_.max_refinement_depth) {
      if (!report_.unresolved.empty() && report_.unresolved.back().hi >= a) {
        report_.unresolved.back().hi = b;
      } else {
        report_.unresolved.push_back({a, b});
      }
      return;
    }
    check_cell(a, fa, m, vs[2], depth + 1);
    check_cell(m, vs[2], b, fb, depth + 1);
  }

 private:
  const RealFn& g_;
  Claim claim_;
  const GridConfig& cfg_;
  SignReport& report_;
  bool stopped_ = false;
};

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

SignReport adaptive_sign_check(const RealFn& g, Interval interval, Claim claim,
                               const GridConfig& cfg) {
  cfg.validate();
  SignReport report;
  report.interval = interval;
  report.min_abs_value = std::numeric_limits<double>::infinity();

  const int n = cfg.seed_cells;
  const double width = interval.length() / n;
  std::vector<double> nodes(static_cast<std::size_t>(n) + 1);
  std::vector<double> values(nodes.size());
  for (int k = 0; k <= n; ++k) {
    nodes[k] = k == n ? interval.hi : interval.lo + k * width;
    values[k] = g(nodes[k]);
  }

  SignChecker checker(g, claim, cfg, report);
  for (int k = 0; k < n && !checker.stopped(); ++k) {
    checker.check_cell(nodes[k], values[k], nodes[k + 1], values[k + 1], 0);
  }

  if (report.witness) {
    report.status = SignStatus::ViolationAt;
  } else if (!report.unresolved.empty()) {
    report.status = SignStatus::Unresolved;
  } else {
    report.status = claim == Claim::Positive ? SignStatus::AllPositive : SignStatus::AllNegative;
  }
  return report;
}

double bracketed_root(const RealFn& g, double a, double b, double tol) {
  if (a > b) std::swap(a, b);
  double fa = g(a);
  double fb = g(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) {
    throw NumericalError("non-finite value at bracket endpoint");
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (sign_of(fa) == sign_of(fb)) {
    throw NumericalError("no sign change on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }

  // Secant and bisection steps alternate, so the bracket at least halves
  // every second iteration.
  bool bisect = false;
  for (int it = 0; it < 400 && (b - a) > 2.0 * tol; ++it) {
    double x = 0.5 * (a + b);
    if (!bisect) {
      const double s = b - fb * (b - a) / (fb - fa);
      const double guard = 0.01 * (b - a);
      if (s > a + guard && s < b - guard) x = s;
    }
    bisect = !bisect;
    if (x <= a || x >= b) break;

    const double fx = g(x);
    if (!std::isfinite(fx)) throw NumericalError("non-finite value inside bracket");
    if (fx == 0.0) return x;
    if (sign_of(fx) == sign_of(fa)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> scan_roots(const RealFn& g, Interval interval, int seed_cells, double tol) {
  if (seed_cells <= 0) throw InvalidArgument("seed_cells must be positive");
  const double width = interval.length() / seed_cells;
  std::vector<double> xs(static_cast<std::size_t>(seed_cells) + 1);
  std::vector<double> vs(xs.size());
  for (int k = 0; k <= seed_cells; ++k) {
    xs[k] = k == seed_cells ? interval.hi : interval.lo + k * width;
    vs[k] = g(xs[k]);
  }

  std::vector<double> roots;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (vs[k] == 0.0) roots.push_back(xs[k]);
  }
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    if (!std::isfinite(vs[k]) || !std::isfinite(vs[k + 1])) continue;
    if (sign_of(vs[k]) * sign_of(vs[k + 1]) >= 0) continue;
    try {
      roots.push_back(bracketed_root(g, xs[k], xs[k + 1], tol));
    } catch (const NumericalError&) {
      // undefined point inside the cell; the cell is skipped
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> merged;
  for (double r : roots) {
    if (!merged.empty() && r - merged.back() <= 2.0 * tol) continue;
    merged.push_back(r);
  }
  return merged;
}

double default_fd_step(double x, int order) {
  const double scale = std::max(0.05, std::abs(x));
  switch (order) {
    case 1: return 1e-3 * scale;
    case 2: return 5e-3 * scale;
    case 3: return 1e-2 * scale;
    default: throw InvalidArgument("finite-difference order must be 1, 2 or 3");
  }
}

double fd_derivative(const RealFn& g, double x, int order, double h,
                     std::optional<Interval> domain) {
  if (order < 1 || order > 3) throw InvalidArgument("finite-difference order must be 1, 2 or 3");
  if (h <= 0.0) h = default_fd_step(x, order);
  const int reach = order == 3 ? 3 : 2;
  if (domain && (x - reach * h < domain->lo || x + reach * h > domain->hi)) {
    throw DomainError("finite-difference stencil at x=" + std::to_string(x) + " leaves the domain");
  }

  auto at = [&](int k) { return g(x + k * h); };
  switch (order) {
    case 1:
      return (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
    case 2:
      return (-at(-2) + 16.0 * at(-1) - 30.0 * at(0) + 16.0 * at(1) - at(2)) / (12.0 * h * h);
    default:
      return (0.125 * at(-3) - at(-2) + 1.625 * at(-1) - 1.625 * at(1) + at(2) - 0.125 * at(3)) /
             (h * h * h);
  }
}

}  // namespace envstab
