#include "envstab/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "envstab/error.hpp"

namespace envstab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kTailSamples = 6;
constexpr double kCriticalExclusion = 1e-3;
// Roots of Phi_p^2(x) - x closer than this to a fixed point of Phi_p are
// fixed points, not 2-cycles.
constexpr double kCycleSeparation = 1e-7;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

MapUnderTest composition_under_test(const PeriodicSystem& sys) {
  RealFn dphi = [sys](double x) {
    try {
      return composition_derivative(sys, x);
    } catch (const DomainError&) {
      return kNaN;
    }
  };
  return {period_map(sys), std::move(dphi), sys.working_interval(), !sys.bounded()};
}

bool has_definite(const AxiomReport& r) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [](const AxiomViolation& v) { return !v.unresolved(); });
}

}  // namespace

std::string_view to_string(LocalVerdict v) {
  switch (v) {
    case LocalVerdict::Stable: return "stable";
    case LocalVerdict::Neutral: return "neutral";
    case LocalVerdict::Unstable: return "unstable";
    case LocalVerdict::Undefined: return "undefined";
  }
  return "unknown";
}

std::string_view to_string(OracleVerdict v) {
  switch (v) {
    case OracleVerdict::GloballyStable: return "GloballyStable";
    case OracleVerdict::NotGloballyStable: return "NotGloballyStable";
    case OracleVerdict::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

std::string_view to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::CertifiedGlobal: return "CertifiedGlobal";
    case CertificateStatus::LocalOnly: return "LocalOnly";
    case CertificateStatus::NotPopulationModel: return "NotPopulationModel";
    case CertificateStatus::EnvelopeNotFound: return "EnvelopeNotFound";
    case CertificateStatus::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

LocalVerdict classify_multiplier(double m) {
  if (!std::isfinite(m)) return LocalVerdict::Undefined;
  const double gap = std::abs(m) - 1.0;
  if (std::abs(gap) <= kNeutralBand) return LocalVerdict::Neutral;
  return gap < 0.0 ? LocalVerdict::Stable : LocalVerdict::Unstable;
}

LocalStability local_stability(const PeriodicSystem& sys) {
  LocalStability out;
  try {
    out.multiplier = composition_derivative(sys, 1.0);
  } catch (const DomainError& e) {
    out.multiplier = kNaN;
    out.note = e.what();
  }
  out.verdict = classify_multiplier(out.multiplier);
  return out;
}

TwoCycleOracle two_cycle_oracle(const PeriodicSystem& sys, const GridConfig& cfg) {
  cfg.validate();
  const RealFn phi = period_map(sys);
  const RealFn phi2 = [&phi](double x) { return phi(phi(x)); };
  const double d = cfg.exclusion_radius;
  const Interval w = sys.working_interval();

  TwoCycleOracle out;
  out.interval = w;
  const RealFn push = [&phi2](double x) { return (phi2(x) / x - 1.0) / (1.0 - x); };
  out.left = adaptive_sign_check(push, make_interval(d, 1.0 - d), Claim::Positive, cfg);
  if (w.hi - d > 1.0 + d) {
    out.right = adaptive_sign_check(push, make_interval(1.0 + d, w.hi - d), Claim::Positive, cfg);
  } else {
    out.right.status = SignStatus::AllPositive;
  }

  bool tail_ok = true;
  bool tail_violated = false;
  if (!sys.bounded()) {
    for (int k = 1; k <= kTailSamples; ++k) {
      const double x = std::ldexp(w.hi, k);
      const double v = phi2(x);
      if (std::isnan(v)) {
        tail_ok = false;
      } else if (!(v < x)) {
        tail_violated = true;
      }
    }
  }

  const RealFn g = [&phi2](double x) { return phi2(x) - x; };
  for (double x : scan_roots(g, w, cfg.seed_cells, 1e-12)) {
    const double y = phi(x);
    if (!(std::abs(y - x) > kCycleSeparation) || x <= 0.0) continue;
    const std::pair<double, double> c{std::min(x, y), std::max(x, y)};
    const bool seen = std::any_of(out.two_cycles.begin(), out.two_cycles.end(), [&](const auto& o) {
      return std::abs(o.first - c.first) <= kCycleSeparation;
    });
    if (!seen) out.two_cycles.push_back(c);
  }
  for (double x : find_fixed_points(sys, cfg).positive()) {
    if (std::abs(x - 1.0) > kCycleSeparation) out.extra_fixed_points.push_back(x);
  }

  if (!out.two_cycles.empty() || !out.extra_fixed_points.empty() || out.left.violated() ||
      out.right.violated() || tail_violated) {
    out.verdict = OracleVerdict::NotGloballyStable;
  } else if (out.left.verified() && out.right.verified() && tail_ok) {
    out.verdict = OracleVerdict::GloballyStable;
  } else {
    out.verdict = OracleVerdict::Inconclusive;
  }
  return out;
}

TwoCycleOracle two_cycle_oracle(const PopulationModel& f, const GridConfig& cfg) {
  return two_cycle_oracle(make_system({f}), cfg);
}

double schwarzian(const PopulationModel& f, double x) {
  const Derivatives d = f.derivatives(x);
  if (d.d1 == 0.0) throw DomainError("Schwarzian undefined at critical point x=" + fmt(x));
  const double q = d.d2 / d.d1;
  return d.d3 / d.d1 - 1.5 * q * q;
}

SchwarzianVerdict schwarzian_test(const PopulationModel& f, const GridConfig& cfg) {
  cfg.validate();
  if (!f.is_c3()) throw InvalidArgument(f.describe() + " is not C^3; the Schwarzian test needs three derivatives");
  const double lo = cfg.exclusion_radius;
  const double hi = f.x_max() - cfg.exclusion_radius;

  SchwarzianVerdict out;
  out.local_multiplier = f.deriv(1.0, 1);
  out.critical_points = scan_roots(derivative_function(f), make_interval(lo, hi), cfg.seed_cells, 1e-12);

  const RealFn sf = [&f](double x) {
    try {
      return schwarzian(f, x);
    } catch (const DomainError&) {
      return kNaN;
    }
  };

  // Pieces of [lo, hi] that stay clear of every critical point.
  std::vector<Interval> pieces;
  double start = lo;
  for (double c : out.critical_points) {
    if (c - kCriticalExclusion > start) pieces.push_back({start, c - kCriticalExclusion});
    start = std::max(start, c + kCriticalExclusion);
  }
  if (hi > start) pieces.push_back({start, hi});

  out.min_margin = -std::numeric_limits<double>::infinity();
  bool negative = true;
  for (const Interval& piece : pieces) {
    const SignReport rep = adaptive_sign_check(sf, piece, Claim::Negative, cfg);
    if (!rep.verified()) {
      negative = false;
      const double x = rep.violated() ? *rep.witness : rep.unresolved.front().mid();
      out.reasons.push_back("Sf not verified negative near x=" + fmt(x));
    }
    const int n = 4 * cfg.seed_cells;
    for (int k = 0; k <= n; ++k) {
      const double v = sf(piece.lo + piece.length() * k / n);
      if (std::isfinite(v)) out.min_margin = std::max(out.min_margin, v);
    }
  }

  const bool one_critical = out.critical_points.size() <= 1;
  if (!one_critical) out.reasons.push_back("more than one critical point");
  const bool local_ok = std::abs(out.local_multiplier) <= 1.0 + kNeutralBand;
  if (!local_ok) out.reasons.push_back("|f'(1)| = " + fmt(std::abs(out.local_multiplier)) + " exceeds 1");
  out.passes = one_critical && local_ok && negative && out.min_margin < 0.0;
  return out;
}

int status_exit_code(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::CertifiedGlobal: return 0;
    case CertificateStatus::Inconclusive: return 2;
    default: return 1;
  }
}

StabilityCertificate certify_global_stability(const PeriodicSystem& sys,
                                              const std::vector<Envelope>& candidates,
                                              const GridConfig& cfg, const CertifyOptions& opt) {
  cfg.validate();
  StabilityCertificate cert;
  cert.tolerances = cfg;
  cert.involution_epsilon = opt.involution_epsilon;
  cert.alpha_grid = opt.alpha_grid;

  // H1: individual axioms, smoothness, chaining and the composition itself.
  H1Evidence& h1 = cert.h1;
  h1.chaining = sys.chaining();
  h1.working_interval = sys.working_interval();
  bool h1_definite = false;
  bool h1_unresolved = false;
  auto absorb = [&](const AxiomReport& r, const std::string& who) {
    for (const auto& v : r.violations) {
      if (v.unresolved()) {
        h1_unresolved = true;
        cert.unresolved.push_back({v.x, v.x});
      } else {
        h1_definite = true;
        cert.witnesses.push_back({who + ": " + v.axiom, v.x, v.fx});
      }
    }
  };
  for (std::size_t i = 0; i < sys.p(); ++i) {
    h1.maps.push_back(verify_population_axioms(sys.map(i), cfg));
    absorb(h1.maps.back(), "map " + std::to_string(i));
    h1.c1.push_back(sys.map(i).is_c1());
    if (!h1.c1.back()) {
      h1_definite = true;
      const auto bps = sys.map(i).breakpoints();
      const double b = bps.empty() ? kNaN : bps.front();
      cert.witnesses.push_back({"map " + std::to_string(i) + ": not C^1 at breakpoint", b,
                                sys.map(i).eval(b)});
    }
  }
  h1.composition = verify_population_axioms(composition_under_test(sys), cfg);
  absorb(h1.composition, "composition");
  h1.outcome = h1_definite ? "failed" : (h1_unresolved ? "unresolved" : "passed");

  // H2: a decreasing involution enveloping every map.
  H2Evidence& h2 = cert.h2;
  bool h2_undecided = false;
  auto try_candidate = [&](const Envelope& h, const std::string& source) {
    CandidateEvidence ev{h, check_involution(h, cfg, opt.involution_epsilon), check_decreasing(h, cfg, opt.involution_epsilon), {}, false, source};
    const bool structural = ev.involution.passes(opt.involution_tol) && ev.decreasing.decreasing;
    if (structural) {
      ev.verdicts = common_envelope(h, sys, cfg);
      ev.passed = all_envelop(ev.verdicts);
      const bool definite = std::any_of(ev.verdicts.begin(), ev.verdicts.end(),
                                        [](const EnvelopeVerdict& v) { return v.definite_failure(); });
      if (!ev.passed && !definite) h2_undecided = true;
    }
    h2.candidates.push_back(std::move(ev));
    return h2.candidates.back().passed;
  };

  bool h2_passed = false;
  for (const Envelope& h : candidates) {
    if (try_candidate(h, "given")) {
      h2_passed = true;
      cert.envelope_used = h;
      break;
    }
  }
  if (!h2_passed && opt.alpha_grid > 0) {
    h2.mobius_scan = fit_mobius(sys, opt.alpha_grid, cfg);
    for (const AlphaRange& r : h2.mobius_scan->feasible) {
      const double g = static_cast<double>(opt.alpha_grid);
      double alpha = std::round(0.5 * (r.lo + r.hi) * g) / g;
      if (alpha < r.lo || alpha > r.hi) alpha = std::ceil(r.lo * g) / g;
      if (alpha >= 1.0) continue;
      if (try_candidate(make_mobius(alpha), "mobius_fit")) {
        h2_passed = true;
        cert.envelope_used = make_mobius(alpha);
        break;
      }
    }
  }
  h2.outcome = h2_passed ? "passed" : (h2_undecided ? "unresolved" : "failed");

  const LocalStability local = local_stability(sys);
  cert.multiplier = local.multiplier;
  cert.local = local.verdict;
  cert.neutral = local.verdict == LocalVerdict::Neutral;
  cert.oracle = two_cycle_oracle(sys, cfg);

  const bool locally_ok = local.verdict == LocalVerdict::Stable || local.verdict == LocalVerdict::Neutral;
  if (h1.outcome == "failed") {
    cert.status = CertificateStatus::NotPopulationModel;
  } else if (h2_passed) {
    cert.status = h1.outcome == "passed" && locally_ok ? CertificateStatus::CertifiedGlobal
                                                       : CertificateStatus::Inconclusive;
  } else if (h2.outcome == "failed") {
    const bool refuted = cert.oracle.verdict == OracleVerdict::NotGloballyStable;
    cert.status = refuted || !locally_ok ? CertificateStatus::EnvelopeNotFound : CertificateStatus::LocalOnly;
  } else {
    cert.status = CertificateStatus::Inconclusive;
  }

  // Evidence for negative outcomes.
  if (cert.status != CertificateStatus::CertifiedGlobal) {
    for (const CandidateEvidence& ev : h2.candidates) {
      const std::string who = "envelope " + ev.envelope.describe();
      if (ev.involution.nonpositive_at) {
        cert.witnesses.push_back({who + ": not positive", *ev.involution.nonpositive_at,
                                  ev.envelope(*ev.involution.nonpositive_at)});
      } else if (!ev.involution.passes(opt.involution_tol)) {
        cert.witnesses.push_back({who + ": involution residual", ev.involution.worst_x, ev.involution.max_residual});
      }
      if (ev.decreasing.witness) {
        cert.witnesses.push_back({who + ": not decreasing", *ev.decreasing.witness, ev.envelope(*ev.decreasing.witness)});
      }
      for (std::size_t i = 0; i < ev.verdicts.size(); ++i) {
        for (const auto& w : {ev.verdicts[i].lower_witness, ev.verdicts[i].upper_witness}) {
          if (!w) continue;
          if (w->unresolved) {
            cert.unresolved.push_back({w->x, w->x});
          } else {
            cert.witnesses.push_back({who + " vs map " + std::to_string(i), w->x, w->fx - w->hx});
          }
        }
      }
    }
    for (const auto& [a, b] : cert.oracle.two_cycles) cert.witnesses.push_back({"2-cycle of Phi_p", a, b});
    for (double x : cert.oracle.extra_fixed_points) cert.witnesses.push_back({"extra fixed point of Phi_p", x, x});
    if (cert.witnesses.empty() && cert.unresolved.empty()) {
      const Envelope h = make_mobius(0.5);
      for (std::size_t i = 0; i < sys.p() && cert.witnesses.empty(); ++i) {
        const EnvelopeVerdict v = envelops(h, sys.map(i), cfg);
        for (const auto& w : {v.lower_witness, v.upper_witness}) {
          if (w && cert.witnesses.empty()) {
            cert.witnesses.push_back({"envelope " + h.describe() + " vs map " + std::to_string(i), w->x, w->fx - w->hx});
          }
        }
      }
      if (cert.witnesses.empty()) cert.unresolved.push_back(sys.working_interval());
    }
  }

  if (cert.status == CertificateStatus::CertifiedGlobal) {
    cert.oracle_agrees = cert.oracle.verdict == OracleVerdict::GloballyStable;
    if (!cert.oracle_agrees) cert.notes.push_back("2-cycle oracle does not confirm the certificate");
  } else {
    cert.oracle_agrees = cert.oracle.verdict != OracleVerdict::GloballyStable ||
                         cert.status == CertificateStatus::LocalOnly ||
                         cert.status == CertificateStatus::Inconclusive;
  }
  if (cert.neutral) cert.notes.push_back("multiplier is neutral (|Phi_p'(1)| = 1); stability rests on the envelope");
  if (cert.status == CertificateStatus::NotPopulationModel && !has_definite(h1.composition) &&
      std::all_of(h1.c1.begin(), h1.c1.end(), [](bool b) { return b; })) {
    cert.notes.push_back("an individual map fails the population-model axioms");
  }
  if (has_definite(h1.composition)) {
    cert.notes.push_back("Phi_p is not a population model, so no decreasing involution can envelop all the maps");
  }
  cert.notes.push_back("continuity of Phi_p is checked through domain chaining on the working interval");
  return cert;
}

ClosedFormReport closed_form_conditions(const PeriodicSystem& sys) {
  std::set<ModelFamily> families;
  for (const auto& m : sys.maps()) {
    if (m.family() == ModelFamily::PiecewiseLinearRecip || m.family() == ModelFamily::CustomTable) {
      throw InvalidArgument("no closed form available for " + std::string(to_string(m.family())));
    }
    families.insert(m.family());
  }
  const bool ricker_bh_mix = families == std::set<ModelFamily>{ModelFamily::Ricker, ModelFamily::GeneralizedBevertonHolt};
  const bool covered = families.size() == 1 || ricker_bh_mix;

  ClosedFormReport out;
  out.product = 1.0;
  for (std::size_t i = 0; i < sys.p(); ++i) {
    const PopulationModel& m = sys.map(i);
    const auto& p = m.params();
    MapCondition c;
    c.index = i;
    c.family = std::string(to_string(m.family()));
    c.multiplier = *closed_form_multiplier(m);
    switch (m.family()) {
      case ModelFamily::Ricker:
        c.condition = "0 < r <= 2";
        c.passes = p.at("r") > 0.0 && p.at("r") <= 2.0;
        break;
      case ModelFamily::GeneralizedBevertonHolt: {
        const double cmax = ricker_bh_mix ? 1.0 : 2.0;
        c.condition = ricker_bh_mix ? "mu > 1 and 0 < c <= 1" : "mu > 1 and 0 < c <= 2";
        c.passes = p.at("mu") > 1.0 && p.at("c") > 0.0 && p.at("c") <= cmax;
        break;
      }
      case ModelFamily::Quadratic:
        c.condition = "0 < mu <= 2";
        c.passes = p.at("mu") > 0.0 && p.at("mu") <= 2.0;
        break;
      case ModelFamily::ExponentialRational: {
        const double a = p.at("a");
        const double b = p.at("b");
        c.condition = "a (b - 2) e^b <= 2";
        c.passes = a > 0.0 && a * (b - 2.0) * std::exp(b) <= 2.0;
        break;
      }
      case ModelFamily::BevertonHoltHarvest: {
        const double r = p.at("r");
        c.condition = "0 < c < (1 + r) / r";
        c.passes = p.at("c") > 0.0 && p.at("c") < (1.0 + r) / r;
        break;
      }
      default:
        break;
    }
    out.product *= c.multiplier;
    out.maps.push_back(c);
  }
  out.product_stable = std::abs(out.product) <= 1.0 + kNeutralBand;
  const bool regions = std::all_of(out.maps.begin(), out.maps.end(), [](const MapCondition& c) { return c.passes; });
  if (!covered) out.notes.push_back("this mixture of families is not covered by a published region");
  if (std::abs(std::abs(out.product) - 1.0) <= kNeutralBand) out.notes.push_back("product multiplier is neutral");
  out.all_pass = covered && regions && out.product_stable;
  return out;
}

}  // namespace envstab
