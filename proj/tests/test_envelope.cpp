#include <doctest.h>

#include <cmath>
#include <limits>

#include "envstab/envelope.hpp"
#include "envstab/error.hpp"
#include "envstab/expression.hpp"

using namespace envstab;

namespace {

PopulationModel ricker(double r) { return make_model(ModelFamily::Ricker, {{"r", r}}); }
PopulationModel bh(double mu, double c) {
  return make_model(ModelFamily::GeneralizedBevertonHolt, {{"mu", mu}, {"c", c}});
}

GridConfig grid(int cells = 1024) {
  GridConfig cfg;
  cfg.seed_cells = cells;
  return cfg;
}

}  // namespace

TEST_CASE("expression parser") {
  CHECK(Expression::parse("2 - x")(0.25) == 1.75);
  CHECK(Expression::parse("-x^2")(3.0) == -9.0);
  CHECK(Expression::parse("2^3^2")(0.0) == 512.0);
  CHECK(Expression::parse("x * exp(2 * (1 - x))")(0.5) == doctest::Approx(0.5 * std::exp(1.0)));
  CHECK(Expression::parse("log(e) + sqrt(abs(-4))")(0.0) == doctest::Approx(3.0));
  CHECK(Expression::parse("(11 - 8*x)/(8 - 5*x)")(1.0) == 1.0);
  CHECK_THROWS_AS(Expression::parse("2 +"), InvalidArgument);
  CHECK_THROWS_AS(Expression::parse("foo(x)"), InvalidArgument);
  CHECK_THROWS_AS(Expression::parse("(x"), InvalidArgument);
}

TEST_CASE("Mobius family identities") {
  Envelope half = make_mobius(0.5);
  Envelope zero = make_mobius(0.0);
  for (double x = 0.01; x < 1.99; x += 0.01) {
    CHECK(std::abs(half(x) - (2.0 - x)) <= 1e-12);
    CHECK(std::abs(zero(x) - 1.0 / x) <= 1e-12 * std::max(1.0, 1.0 / x));
  }
  CHECK(half.x_h() == doctest::Approx(2.0));
  CHECK(std::isinf(zero.x_h()));
  CHECK(make_mobius(0.75)(1.0) == 1.0);
  CHECK(make_mobius(8.0 / 11.0)(0.5) == doctest::Approx(7.0 / 5.5));
  CHECK_THROWS_AS(make_mobius(1.0), InvalidArgument);
  CHECK_THROWS_AS(make_mobius(-0.1), InvalidArgument);
}

TEST_CASE("piecewise BH envelope is a Mobius map") {
  const double c = 3.5;
  Envelope p = make_piecewise_bh(c);
  Envelope m = make_mobius((c - 2.0) / (c - 1.0));
  for (double x : {0.1, 0.5, 1.2, 1.5}) CHECK(p(x) == doctest::Approx(m(x)).epsilon(1e-14));
  CHECK(p.x_h() == doctest::Approx((c - 1.0) / (c - 2.0)));
  CHECK_THROWS_AS(make_piecewise_bh(2.0), InvalidArgument);
}

TEST_CASE("custom envelopes") {
  Envelope h = make_custom_envelope("2 - x");
  CHECK(h.x_h() == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(h.kind() == EnvelopeKind::Custom);
  CHECK(std::isinf(make_custom_envelope("1/x").x_h()));
  CHECK_THROWS_AS(make_custom_envelope("3 - x"), InvalidArgument);
  CHECK(sampling_end(make_reciprocal()) == kDefaultWorkingBound);
  CHECK(parse_envelope_kind("piecewise_bh") == EnvelopeKind::PiecewiseBH);
  CHECK_THROWS_AS(parse_envelope_kind("linear"), InvalidArgument);
}

TEST_CASE("involution and decreasing checks") {
  for (double a : {0.0, 0.25, 0.5, 0.75, 8.0 / 11.0}) {
    CAPTURE(a);
    InvolutionCheck inv = check_involution(make_mobius(a), grid());
    CHECK(inv.passes(1e-9));
    CHECK(check_decreasing(make_mobius(a), grid()).decreasing);
  }
  // A Ricker curve through (1, 1) is not an involution.
  InvolutionCheck bad = check_involution(make_custom_envelope("x * exp(2 * (1 - x))"), grid());
  CHECK_FALSE(bad.passes(1e-9));
  CHECK(bad.max_residual > 1e-3);
  CHECK_FALSE(check_decreasing(make_custom_envelope("x * exp(2 * (1 - x))"), grid()).decreasing);
}

TEST_CASE("enveloping verdicts") {
  // 2 - x envelops Ricker for r <= 2 (and not beyond).
  CHECK(envelops(make_mobius(0.5), ricker(1.8), grid()).envelops);
  CHECK(envelops(make_mobius(0.5), ricker(2.0), grid()).envelops);
  EnvelopeVerdict fail = envelops(make_mobius(0.5), ricker(2.5), grid());
  CHECK_FALSE(fail.envelops);
  CHECK(fail.definite_failure());
  REQUIRE(fail.lower_witness.has_value());
  CHECK(fail.lower_witness->fx >= fail.lower_witness->hx);

  // 1/x envelops every BH map with c <= 2.
  CHECK(envelops(make_reciprocal(), bh(5.0, 1.5), grid()).envelops);
  CHECK(envelops(make_reciprocal(), bh(10.0, 2.0), grid()).envelops);
  CHECK_FALSE(envelops(make_reciprocal(), bh(10.0, 3.0), grid()).envelops);

  auto sys = make_system({ricker(1.8), ricker(1.2), ricker(0.5)});
  auto verdicts = common_envelope(make_mobius(0.5), sys, grid());
  CHECK(verdicts.size() == 3);
  CHECK(all_envelop(verdicts));
}

TEST_CASE("sandwich check") {
  CHECK(sandwich_check(make_mobius(0.5), ricker(1.5), grid()).passes);
  SandwichVerdict v = sandwich_check(make_mobius(0.5), ricker(2.6), grid());
  CHECK_FALSE(v.passes);
  CHECK_FALSE(v.witnesses.empty());
}

TEST_CASE("Mobius fit") {
  // Ricker r = 1: f'(1) = 0, feasible alphas include 1/2.
  MobiusFit fit = fit_mobius(ricker(1.8), 200, grid(512));
  CHECK_FALSE(fit.empty());
  CHECK(fit.contains(0.5));
  CHECK(fit.alpha_grid == 200);

  MobiusFit none = fit_mobius(ricker(2.5), 200, grid(512));
  CHECK(none.empty());
  CHECK(none.feasible_points == 0);
}

TEST_CASE("enveloping implies the sandwich condition") {
  for (double r : {0.4, 1.0, 1.6, 2.0}) {
    for (double a : {0.3, 0.5, 0.7}) {
      Envelope h = make_mobius(a);
      if (envelops(h, ricker(r), grid(512)).envelops) {
        CAPTURE(r);
        CAPTURE(a);
        CHECK(sandwich_check(h, ricker(r), grid(512)).passes);
      }
    }
  }
}

TEST_CASE("feasible Mobius parameters imply local stability") {
  auto q = make_model(ModelFamily::Quadratic, {{"mu", 2.0}});
  MobiusFit fq = fit_mobius(q, 200, grid(512));
  CHECK(fq.contains(0.75));
  for (const auto& m : {ricker(1.9), bh(6.0, 1.8), q}) {
    MobiusFit fit = fit_mobius(m, 100, grid(512));
    if (!fit.empty()) CHECK(std::abs(m.deriv(1.0, 1)) <= 1.0 + 1e-12);
  }
}
