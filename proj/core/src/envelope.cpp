#include "envstab/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "envstab/error.hpp"

namespace envstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kTailSamples = 6;
constexpr int kBoundaryBisections = 8;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::optional<EnvelopeWitness> witness_from(const SignReport& rep, const RealFn& f, const Envelope& h) {
  if (rep.violated()) {
    const double x = *rep.witness;
    return EnvelopeWitness{x, f(x), h(x), false};
  }
  if (rep.status == SignStatus::Unresolved) {
    const double x = rep.unresolved.front().mid();
    return EnvelopeWitness{x, f(x), h(x), true};
  }
  return std::nullopt;
}

double right_end(const Envelope& h, const PopulationModel& f) {
  return std::min(h.x_h(), f.x_max());
}

}  // namespace

std::string_view to_string(EnvelopeKind k) {
  switch (k) {
    case EnvelopeKind::Mobius: return "mobius";
    case EnvelopeKind::Reciprocal: return "reciprocal";
    case EnvelopeKind::PiecewiseBH: return "piecewise_bh";
    case EnvelopeKind::Custom: return "custom";
  }
  return "unknown";
}

EnvelopeKind parse_envelope_kind(std::string_view tag) {
  for (auto k : {EnvelopeKind::Mobius, EnvelopeKind::Reciprocal, EnvelopeKind::PiecewiseBH,
                 EnvelopeKind::Custom}) {
    if (to_string(k) == tag) return k;
  }
  throw InvalidArgument("unknown envelope kind '" + std::string(tag) + "'");
}

double Envelope::operator()(double x) const {
  switch (kind_) {
    case EnvelopeKind::Mobius:
      if (alpha_ == 0.0) return 1.0 / x;
      return (1.0 - alpha_ * x) / (alpha_ - (2.0 * alpha_ - 1.0) * x);
    case EnvelopeKind::Reciprocal: return 1.0 / x;
    case EnvelopeKind::PiecewiseBH: return (c_ - 1.0 - (c_ - 2.0) * x) / (c_ - 2.0 - (c_ - 3.0) * x);
    case EnvelopeKind::Custom: return (*expr_)(x);
  }
  return kNaN;
}

RealFn Envelope::as_function() const {
  return [h = *this](double x) { return h(x); };
}

std::string Envelope::describe() const {
  switch (kind_) {
    case EnvelopeKind::Mobius:
      if (alpha_ == 0.0) return "mobius(alpha=0) = 1/x";
      return "mobius(alpha=" + fmt(alpha_) + ")";
    case EnvelopeKind::Reciprocal: return "1/x";
    case EnvelopeKind::PiecewiseBH: return "piecewise_bh(c=" + fmt(c_) + ")";
    case EnvelopeKind::Custom: return "custom(" + text_ + ")";
  }
  return "unknown";
}

Envelope make_mobius(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw InvalidArgument("mobius envelope requires 0 <= alpha < 1 (got " + fmt(alpha) + ")");
  }
  Envelope h;
  h.kind_ = EnvelopeKind::Mobius;
  h.alpha_ = alpha;
  h.x_h_ = alpha > 0.0 ? 1.0 / alpha : kInf;
  return h;
}

Envelope make_reciprocal() {
  Envelope h;
  h.kind_ = EnvelopeKind::Reciprocal;
  h.x_h_ = kInf;
  return h;
}

Envelope make_piecewise_bh(double c) {
  if (!(c > 2.0) || !std::isfinite(c)) {
    throw InvalidArgument("piecewise_bh envelope requires c > 2 (got " + fmt(c) + ")");
  }
  Envelope h;
  h.kind_ = EnvelopeKind::PiecewiseBH;
  h.c_ = c;
  h.alpha_ = (c - 2.0) / (c - 1.0);
  h.x_h_ = (c - 1.0) / (c - 2.0);
  return h;
}

Envelope make_custom_envelope(const std::string& expression) {
  Envelope h;
  h.kind_ = EnvelopeKind::Custom;
  h.text_ = expression;
  h.expr_ = Expression::parse(expression);
  const double h1 = h(1.0);
  if (!(std::abs(h1 - 1.0) <= 1e-12)) {
    throw InvalidArgument("custom envelope '" + expression + "' must satisfy h(1) = 1 (got " +
                          fmt(h1) + ")");
  }
  const RealFn g = h.as_function();
  h.x_h_ = kInf;
  for (auto [lo, hi] : {std::pair{1.0, 10.0}, std::pair{10.0, 1280.0}}) {
    const auto roots = scan_roots(g, make_interval(lo, hi), 8192, 1e-12);
    // A sign change through a pole is not a root.
    auto root = std::find_if(roots.begin(), roots.end(), [&](double r) {
      return std::abs(g(r)) <= 1e-8;
    });
    if (root != roots.end()) {
      h.x_h_ = *root;
      break;
    }
  }
  return h;
}

double sampling_end(const Envelope& h) {
  return std::isfinite(h.x_h()) ? h.x_h() : kDefaultWorkingBound;
}

InvolutionCheck check_involution(const Envelope& h, const GridConfig& cfg, double epsilon) {
  cfg.validate();
  InvolutionCheck out;
  out.epsilon = epsilon;
  out.checked = make_interval(epsilon, sampling_end(h) - epsilon);
  const int n = 4 * cfg.seed_cells;
  for (int k = 0; k <= n; ++k) {
    const double x = out.checked.lo + out.checked.length() * k / n;
    const double hx = h(x);
    if (!(hx > 0.0) || !std::isfinite(hx)) {
      out.structural_ok = false;
      if (!out.nonpositive_at) out.nonpositive_at = x;
      continue;
    }
    const double r = std::abs(h(hx) - x);
    if (!(r <= out.max_residual)) {
      out.max_residual = std::isnan(r) ? kInf : r;
      out.worst_x = x;
    }
  }
  return out;
}

DecreasingCheck check_decreasing(const Envelope& h, const GridConfig& cfg, double epsilon) {
  cfg.validate();
  DecreasingCheck out;
  const Interval iv = make_interval(epsilon, sampling_end(h) - epsilon);
  const int n = 4 * cfg.seed_cells;
  double prev = h(iv.lo);
  for (int k = 1; k <= n; ++k) {
    const double x = iv.lo + iv.length() * k / n;
    const double v = h(x);
    if (!(v < prev)) {
      out.decreasing = false;
      out.witness = iv.lo + iv.length() * (k - 1) / n;
      return out;
    }
    prev = v;
  }
  return out;
}

EnvelopeVerdict envelops(const Envelope& h, const PopulationModel& f, const GridConfig& cfg) {
  cfg.validate();
  const double d = cfg.exclusion_radius;
  const RealFn fx = f.as_function();
  const double end = right_end(h, f);

  EnvelopeVerdict out;
  out.model = f.describe();
  out.exclusion_radius = d;
  out.checked_interval = make_interval(0.0, end);

  const RealFn below = [&](double x) { return (h(x) - fx(x)) / (1.0 - x); };
  out.lower = adaptive_sign_check(below, make_interval(d, 1.0 - d), Claim::Positive, cfg);
  out.lower_witness = witness_from(out.lower, fx, h);

  const RealFn above = [&](double x) {
    const double a = fx(x);
    const double b = h(x);
    if (std::isnan(a) || std::isnan(b)) return kNaN;
    if (!(a > 0.0) || !(b > 0.0)) return kInf;
    return (a - b) / (x - 1.0);
  };
  if (end - d > 1.0 + d) {
    out.upper = adaptive_sign_check(above, make_interval(1.0 + d, end - d), Claim::Positive, cfg);
    out.upper_witness = witness_from(out.upper, fx, h);
  } else {
    out.upper.status = SignStatus::AllPositive;
  }

  if (!out.upper_witness && !f.bounded_domain()) {
    for (int k = 1; k <= kTailSamples; ++k) {
      const double x = std::ldexp(f.x_max(), k);
      if (!(x < h.x_h())) break;
      if (!(above(x) > 0.0)) {
        out.upper_witness = EnvelopeWitness{x, fx(x), h(x), std::isnan(above(x))};
        break;
      }
    }
  }

  out.envelops = !out.lower_witness && !out.upper_witness;
  return out;
}

std::vector<EnvelopeVerdict> common_envelope(const Envelope& h, const PeriodicSystem& sys,
                                             const GridConfig& cfg) {
  std::vector<EnvelopeVerdict> out;
  for (const auto& f : sys.maps()) out.push_back(envelops(h, f, cfg));
  return out;
}

bool all_envelop(const std::vector<EnvelopeVerdict>& verdicts) {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const EnvelopeVerdict& v) { return v.envelops; });
}

SandwichVerdict sandwich_check(const Envelope& h, const PopulationModel& f, const GridConfig& cfg) {
  cfg.validate();
  const double d = cfg.exclusion_radius;
  const RealFn fx = f.as_function();
  const double end = right_end(h, f);

  SandwichVerdict out;
  auto run = [&](const std::string& name, const RealFn& g, double lo, double hi) {
    if (!(hi > lo)) return;
    const SignReport rep = adaptive_sign_check(g, make_interval(lo, hi), Claim::Positive, cfg);
    if (rep.violated()) {
      out.witnesses.push_back({name, *rep.witness, *rep.witness_value, false});
    } else if (rep.status == SignStatus::Unresolved) {
      const double x = rep.unresolved.front().mid();
      out.witnesses.push_back({name, x, g(x), true});
    }
  };
  // f(h(x)); points where it is not positive fall outside condition (ii).
  auto reflected = [&](double x) { return fx(h(x)); };

  run("f<h on (0,1)", [&](double x) { return (h(x) - fx(x)) / (1.0 - x); }, d, 1.0 - d);
  run("f(h(x))>x on (0,1)",
      [&](double x) {
        const double v = reflected(x);
        if (std::isnan(v)) return kNaN;
        if (!(v > 0.0)) return kInf;
        return (v - x) / (1.0 - x);
      },
      d, 1.0 - d);
  run("f>h on (1,x_h)",
      [&](double x) {
        const double a = fx(x);
        const double b = h(x);
        if (std::isnan(a) || std::isnan(b)) return kNaN;
        if (!(a > 0.0) || !(b > 0.0)) return kInf;
        return (a - b) / (x - 1.0);
      },
      1.0 + d, end - d);
  run("f(h(x))<x on (1,x_h)",
      [&](double x) {
        const double v = reflected(x);
        if (std::isnan(v)) return kNaN;
        return (x - v) / (x - 1.0);
      },
      1.0 + d, end - d);

  out.passes = out.witnesses.empty();
  return out;
}

bool MobiusFit::contains(double alpha) const {
  return std::any_of(feasible.begin(), feasible.end(),
                     [&](const AlphaRange& r) { return r.lo <= alpha && alpha <= r.hi; });
}

namespace {

MobiusFit scan_alpha(const std::function<bool(double)>& feasible, std::size_t alpha_grid) {
  if (alpha_grid < 1) throw InvalidArgument("alpha grid must be positive");
  MobiusFit out;
  out.alpha_grid = alpha_grid;
  const double step = 1.0 / static_cast<double>(alpha_grid);

  std::vector<bool> ok(alpha_grid);
  for (std::size_t k = 0; k < alpha_grid; ++k) {
    ok[k] = feasible(static_cast<double>(k) * step);
    if (ok[k]) ++out.feasible_points;
  }

  // Moves the boundary between a feasible and an infeasible alpha towards
  // the infeasible side.
  auto refine = [&](double good, double bad) {
    for (int it = 0; it < kBoundaryBisections; ++it) {
      const double m = 0.5 * (good + bad);
      if (feasible(m)) {
        good = m;
      } else {
        bad = m;
      }
    }
    return good;
  };

  std::size_t k = 0;
  while (k < alpha_grid) {
    if (!ok[k]) {
      ++k;
      continue;
    }
    std::size_t j = k;
    while (j + 1 < alpha_grid && ok[j + 1]) ++j;
    AlphaRange r{static_cast<double>(k) * step, static_cast<double>(j) * step};
    if (k > 0) r.lo = refine(r.lo, r.lo - step);
    if (j + 1 < alpha_grid) r.hi = refine(r.hi, r.hi + step);
    out.feasible.push_back(r);
    k = j + 1;
  }
  return out;
}

}  // namespace

MobiusFit fit_mobius(const PopulationModel& f, std::size_t alpha_grid, const GridConfig& cfg) {
  return scan_alpha([&](double a) { return envelops(make_mobius(a), f, cfg).envelops; }, alpha_grid);
}

MobiusFit fit_mobius(const PeriodicSystem& sys, std::size_t alpha_grid, const GridConfig& cfg) {
  return scan_alpha(
      [&](double a) {
        const Envelope h = make_mobius(a);
        return std::all_of(sys.maps().begin(), sys.maps().end(),
                           [&](const PopulationModel& f) { return envelops(h, f, cfg).envelops; });
      },
      alpha_grid);
}

}  // namespace envstab
