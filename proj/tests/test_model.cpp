#include <doctest.h>

#include <cmath>
#include <random>

#include "envstab/axioms.hpp"
#include "envstab/error.hpp"
#include "envstab/model.hpp"

using namespace envstab;

namespace {

PopulationModel ricker(double r) { return make_model(ModelFamily::Ricker, {{"r", r}}); }
PopulationModel bh(double mu, double c) {
  return make_model(ModelFamily::GeneralizedBevertonHolt, {{"mu", mu}, {"c", c}});
}

GridConfig axiom_grid() {
  GridConfig cfg;
  cfg.seed_cells = 1024;
  return cfg;
}

}  // namespace

TEST_CASE("family tags round-trip") {
  for (ModelFamily f : {ModelFamily::Ricker, ModelFamily::GeneralizedBevertonHolt,
                        ModelFamily::Quadratic, ModelFamily::ExponentialRational,
                        ModelFamily::BevertonHoltHarvest, ModelFamily::PiecewiseLinearRecip,
                        ModelFamily::CustomTable}) {
    CHECK(parse_family(to_string(f)) == f);
  }
  CHECK_THROWS_AS(parse_family("logistic"), InvalidArgument);
}

TEST_CASE("Ricker values against a high-precision reference") {
  // x e^{1.5 (1 - x)} at x = 0.5, evaluated with 30 significant digits.
  CHECK(ricker(1.5).eval(0.5) == doctest::Approx(1.05850000830633733427268490992).epsilon(1e-15));
  CHECK(ricker(2.0).eval(1.0) == 1.0);
  CHECK(ricker(2.0).eval(0.0) == 0.0);
}

TEST_CASE("closed-form families match their formulas") {
  const double x = 0.37;
  CHECK(bh(3.0, 2.0).eval(x) == doctest::Approx(3.0 * x / (1.0 + 2.0 * x * x)));
  auto q = make_model(ModelFamily::Quadratic, {{"mu", 1.5}});
  CHECK(q.eval(x) == doctest::Approx(x * (1.0 + 1.5 * (1.0 - x))));
  auto er = make_model(ModelFamily::ExponentialRational, {{"a", 2.0}, {"b", 1.5}});
  CHECK(er.eval(x) ==
        doctest::Approx((1.0 + 2.0 * std::exp(1.5)) * x / (1.0 + 2.0 * std::exp(1.5 * x))));
  auto hv = make_model(ModelFamily::BevertonHoltHarvest, {{"r", 2.0}, {"c", 0.5}});
  CHECK(hv.eval(x) == doctest::Approx(2.0 * x / (1.0 + x) - 0.5 * x * (x - 1.0)));
  for (const auto& m : {q, er, hv}) CHECK(m.eval(1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bounded domains") {
  auto q = make_model(ModelFamily::Quadratic, {{"mu", 2.0}});
  CHECK(q.bounded_domain());
  CHECK(q.x_max() == doctest::Approx(1.5));
  CHECK(q.eval(1.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(q.eval(1.6), DomainError);
  CHECK_THROWS_AS(q.eval(-0.1), DomainError);
  CHECK(std::isnan(q.as_function()(2.0)));

  auto hv = make_model(ModelFamily::BevertonHoltHarvest, {{"r", 2.0}, {"c", 0.5}});
  CHECK(hv.x_max() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  CHECK(hv.eval(hv.x_max()) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hv.deriv(0.0, 1) == doctest::Approx(2.5));

  auto r = ricker(1.0);
  CHECK_FALSE(r.bounded_domain());
  CHECK(r.x_max() == kDefaultWorkingBound);
  CHECK_NOTHROW(r.eval(100.0));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_model(ModelFamily::Ricker, {{"r", 0.0}}), InvalidArgument);
  CHECK_THROWS_AS(make_model(ModelFamily::Ricker, {{"mu", 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(make_model(ModelFamily::Ricker, {}), InvalidArgument);
  CHECK_THROWS_WITH_AS(bh(1.0, 1.0), doctest::Contains("mu must exceed 1"), InvalidArgument);
  CHECK_THROWS_AS(bh(2.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(make_model(ModelFamily::Quadratic, {{"mu", -1.0}}), InvalidArgument);
  CHECK_THROWS_AS(make_model(ModelFamily::BevertonHoltHarvest, {{"r", 0.5}, {"c", 0.1}}),
                  InvalidArgument);
  CHECK_THROWS_AS(make_model(ModelFamily::PiecewiseLinearRecip, {{"slope", 4}, {"knee", 1.2}}),
                  InvalidArgument);
  CHECK_THROWS_AS(make_model(ModelFamily::Ricker, {{"r", 1.0}}, 0.5), InvalidArgument);
  CHECK_THROWS_AS(make_model(ModelFamily::CustomTable, {}), InvalidArgument);
}

TEST_CASE("analytic derivatives agree with finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xs(0.05, 1.2);
  std::vector<PopulationModel> models{
      ricker(1.7), bh(4.0, 1.3), make_model(ModelFamily::Quadratic, {{"mu", 1.2}}),
      make_model(ModelFamily::ExponentialRational, {{"a", 3.0}, {"b", 1.0}}),
      make_model(ModelFamily::BevertonHoltHarvest, {{"r", 3.0}, {"c", 0.3}})};
  for (const auto& m : models) {
    CAPTURE(m.describe());
    CHECK(m.is_c3());
    for (int k = 0; k < 20; ++k) {
      const double x = xs(rng);
      Derivatives d = m.derivatives(x);
      CHECK(d.v == doctest::Approx(m.eval(x)));
      CHECK(d.d1 == doctest::Approx(fd_derivative(m.as_function(), x, 1)).epsilon(1e-8));
      CHECK(d.d2 == doctest::Approx(fd_derivative(m.as_function(), x, 2)).epsilon(1e-6));
      CHECK(d.d3 == doctest::Approx(fd_derivative(m.as_function(), x, 3)).epsilon(1e-4));
      CHECK(m.deriv(x, 1) == d.d1);
    }
  }
}

TEST_CASE("closed-form multipliers") {
  CHECK(*closed_form_multiplier(ricker(1.8)) == doctest::Approx(-0.8));
  CHECK(*closed_form_multiplier(bh(3.0, 2.0)) == doctest::Approx(1.0 - 2.0 * 2.0 / 3.0));
  for (const auto& m : {ricker(1.3), bh(5.0, 1.5),
                        make_model(ModelFamily::ExponentialRational, {{"a", 1.0}, {"b", 2.0}}),
                        make_model(ModelFamily::BevertonHoltHarvest, {{"r", 2.0}, {"c", 0.5}})}) {
    CHECK(*closed_form_multiplier(m) == doctest::Approx(m.deriv(1.0, 1)).epsilon(1e-12));
  }
  auto pw = make_model(ModelFamily::PiecewiseLinearRecip, {{"slope", 4}, {"knee", 0.6}});
  CHECK_FALSE(closed_form_multiplier(pw).has_value());
}

TEST_CASE("piecewise linear-reciprocal maps") {
  auto f = make_model(ModelFamily::PiecewiseLinearRecip, {{"slope", 4}, {"knee", 0.6}});
  CHECK(f.breakpoints() == std::vector<double>{0.6, 1.0});
  CHECK_FALSE(f.is_c1());
  CHECK(f.eval(0.5) == doctest::Approx(2.0));
  CHECK(f.eval(0.8) == doctest::Approx(4.5 - 3.5 * 0.8));
  CHECK(f.eval(2.0) == doctest::Approx(0.5));
  CHECK(f.eval(1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(f.deriv(0.6, 1), DomainError);
  CHECK(f.deriv(2.0, 1) == doctest::Approx(-0.25));
}

TEST_CASE("custom tables") {
  // x e^{r(1 - x)} written as k x e^{s x} with k = e^r, s = -r.
  const double r = 1.4;
  Atom a{Atom::Kind::Exp, std::exp(r), 1.0, -r, 0.0, 0.0};
  auto f = make_custom_model({Piece{0.0, {a}}});
  for (double x : {0.1, 0.7, 1.9, 5.0}) CHECK(f.eval(x) == doctest::Approx(ricker(r).eval(x)));
  CHECK(f.is_c3());
  CHECK(f.deriv(0.5, 2) == doctest::Approx(ricker(r).deriv(0.5, 2)));

  Atom lin{Atom::Kind::Affine, 0.0, 0.0, 0.0, 0.0, 2.0};
  CHECK_THROWS_AS(make_custom_model({Piece{0.0, {lin}}}), InvalidArgument);
  CHECK_THROWS_AS(make_custom_model({Piece{0.5, {a}}}), InvalidArgument);
  CHECK_THROWS_AS(make_custom_model({}), InvalidArgument);
  CHECK(parse_atom_kind(to_string(Atom::Kind::Reciprocal)) == Atom::Kind::Reciprocal);
}

TEST_CASE("model equality ignores the working bound") {
  CHECK(make_model(ModelFamily::Ricker, {{"r", 1.0}}, 10.0) == ricker(1.0));
  CHECK_FALSE(ricker(1.0) == ricker(1.1));
}

TEST_CASE("population-model axioms hold for the standard families") {
  for (const auto& m : {ricker(0.5), ricker(2.0), bh(10.0, 2.0), bh(1.5, 0.3),
                        make_model(ModelFamily::Quadratic, {{"mu", 2.0}}),
                        make_model(ModelFamily::BevertonHoltHarvest, {{"r", 3.0}, {"c", 0.3}})}) {
    CAPTURE(m.describe());
    AxiomReport rep = verify_population_axioms(m, axiom_grid());
    CHECK(rep.is_population_model);
    CHECK(rep.violations.empty());
  }
}

TEST_CASE("axiom violations carry a witness") {
  // f(x) = x^2 has f < x on (0, 1).
  MapUnderTest sq{[](double x) { return x * x; }, {}, {0.0, 5.0}, false};
  AxiomReport rep = verify_population_axioms(sq, axiom_grid());
  CHECK_FALSE(rep.is_population_model);
  REQUIRE_FALSE(rep.violations.empty());
  CHECK(rep.violations.front().axiom == "above_diagonal");
  CHECK_FALSE(rep.violations.front().unresolved());
  const double x = rep.violations.front().x;
  CHECK(x * x < x);

  // f(x) = 2x - x^2/... leaves 1 as fixed point but goes negative past 2.
  MapUnderTest neg{[](double x) { return x * (2.0 - x); }, {}, {0.0, 3.0}, false};
  AxiomReport rn = verify_population_axioms(neg, axiom_grid());
  CHECK_FALSE(rn.is_population_model);
  bool positive_failed = false;
  for (const auto& v : rn.violations) positive_failed = positive_failed || v.axiom == "positive";
  CHECK(positive_failed);
}

TEST_CASE("monotone rise bound") {
  // Ricker rises until its critical point 1/r.
  AxiomReport rep = verify_population_axioms(ricker(2.0), axiom_grid());
  CHECK(rep.monotone_rise_bound == doctest::Approx(0.5).epsilon(1e-6));
}
