#include "envstab/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "envstab/error.hpp"

namespace envstab {

namespace {

constexpr double kFixedPointResidual = 1e-12;
constexpr int kTailSamples = 6;

void record(AxiomReport& out, const std::string& axiom, const SignReport& rep, const RealFn& f) {
  if (rep.violated()) {
    out.violations.push_back({axiom, "violation", *rep.witness, f(*rep.witness)});
  } else if (rep.status == SignStatus::Unresolved) {
    const double x = rep.unresolved.front().mid();
    out.violations.push_back({axiom, "unresolved", x, f(x)});
  }
}

}  // namespace

bool AxiomReport::only_unresolved() const {
  return !violations.empty() &&
         std::all_of(violations.begin(), violations.end(),
                     [](const AxiomViolation& v) { return v.unresolved(); });
}

RealFn derivative_function(const PopulationModel& model) {
  return [model](double x) {
    try {
      return model.deriv(x, 1);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
}

AxiomReport verify_population_axioms(const MapUnderTest& map, const GridConfig& cfg) {
  cfg.validate();
  const RealFn& f = map.f;
  const double hi = map.domain.hi;
  const double delta = cfg.exclusion_radius;

  AxiomReport out;
  out.domain = map.domain;

  const double f0 = f(0.0);
  if (!(std::abs(f0) <= kFixedPointResidual)) out.violations.push_back({"fixed_zero", "violation", 0.0, f0});
  const double f1 = f(1.0);
  if (!(std::abs(f1 - 1.0) <= kFixedPointResidual)) {
    out.violations.push_back({"fixed_one", "violation", 1.0, f1});
  }

  // (f(x)/x - 1) / (1 - x) is positive on both sides of 1 exactly when
  // f(x) > x on (0, 1) and f(x) < x on (1, hi).
  const RealFn push = [&f](double x) { return (f(x) / x - 1.0) / (1.0 - x); };

  if (1.0 - delta > delta) {
    auto rep = adaptive_sign_check(push, make_interval(delta, 1.0 - delta), Claim::Positive, cfg);
    record(out, "above_diagonal", rep, f);
    out.checks.push_back({"above_diagonal", rep});
  }
  if (hi - delta > 1.0 + delta) {
    const Interval right = make_interval(1.0 + delta, hi - delta);
    auto rep = adaptive_sign_check(push, right, Claim::Positive, cfg);
    record(out, "below_diagonal", rep, f);
    out.checks.push_back({"below_diagonal", rep});

    GridConfig strict = cfg;
    strict.abs_tol = std::numeric_limits<double>::denorm_min();
    auto pos = adaptive_sign_check(f, right, Claim::Positive, strict);
    record(out, "positive", pos, f);
    out.checks.push_back({"positive", pos});
  }
  if (map.unbounded) {
    for (int k = 1; k <= kTailSamples; ++k) {
      const double x = std::ldexp(hi, k);
      const double fx = f(x);
      if (!(fx < x)) out.violations.push_back({"tail", std::isnan(fx) ? "unresolved" : "violation", x, fx});
    }
  }

  out.monotone_rise_bound = hi;
  if (map.df) {
    const auto roots = scan_roots(map.df, make_interval(delta, hi), cfg.seed_cells, 1e-10);
    if (!roots.empty()) out.monotone_rise_bound = roots.front();
  }

  out.is_population_model = out.violations.empty();
  return out;
}

AxiomReport verify_population_axioms(const PopulationModel& model, const GridConfig& cfg) {
  MapUnderTest map{model.as_function(), derivative_function(model), model.domain(),
                   !model.bounded_domain()};
  return verify_population_axioms(map, cfg);
}

}  // namespace envstab
