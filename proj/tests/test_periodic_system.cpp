#include <doctest.h>

#include <cmath>

#include "envstab/error.hpp"
#include "envstab/periodic_system.hpp"

using namespace envstab;

namespace {

PopulationModel ricker(double r) { return make_model(ModelFamily::Ricker, {{"r", r}}); }
PopulationModel bh(double mu, double c) {
  return make_model(ModelFamily::GeneralizedBevertonHolt, {{"mu", mu}, {"c", c}});
}
PopulationModel quadratic(double mu) { return make_model(ModelFamily::Quadratic, {{"mu", mu}}); }

GridConfig scan_grid(int cells = 4096) {
  GridConfig cfg;
  cfg.seed_cells = cells;
  return cfg;
}

}  // namespace

TEST_CASE("system construction") {
  CHECK_THROWS_AS(make_system({}), InvalidArgument);
  CHECK_THROWS_WITH_AS(make_system({ricker(1.5), ricker(1.5)}),
                       doctest::Contains("minimal period is 1"), InvalidArgument);
  CHECK_THROWS_AS(make_system({ricker(1.5), ricker(1.2), ricker(1.5), ricker(1.2)}),
                  InvalidArgument);

  auto sys = make_system({ricker(1.8), ricker(1.2), ricker(0.5)});
  CHECK(sys.p() == 3);
  CHECK(sys.map(4) == ricker(1.2));
  CHECK_FALSE(sys.bounded());
  CHECK(sys.working_interval().hi == kDefaultWorkingBound);
  CHECK(sys.chaining().verified);
}

TEST_CASE("bounded systems use the image interval") {
  auto sys = make_system({quadratic(2.0), quadratic(1.0)});
  CHECK(sys.bounded());
  // max of x (1 + mu (1 - x)) is (1 + mu)^2 / (4 mu): 9/8 and 1.
  CHECK(sys.working_interval().hi == doctest::Approx(1.0));

  CHECK_THROWS_WITH_AS(make_system({quadratic(4.0), quadratic(8.0)}),
                       doctest::Contains("domain chaining fails at phase"), InvalidArgument);
}

TEST_CASE("composition applies the maps in order") {
  auto f0 = ricker(1.8);
  auto f1 = ricker(1.2);
  auto f2 = ricker(0.5);
  auto sys = make_system({f0, f1, f2});
  const double x = 0.3;
  CHECK(compose_eval(sys, x, 3) == doctest::Approx(f2.eval(f1.eval(f0.eval(x)))).epsilon(1e-15));
  CHECK(compose_eval(sys, x, 2, 1) == doctest::Approx(f2.eval(f1.eval(x))).epsilon(1e-15));
  CHECK(compose_eval(sys, x, 4, 2) ==
        doctest::Approx(f2.eval(f1.eval(f0.eval(f2.eval(x))))).epsilon(1e-15));
  CHECK(compose_eval(sys, x, 0) == x);
  CHECK(period_map(sys)(x) == compose_eval(sys, x, 3));

  const double chain = f2.deriv(f1.eval(f0.eval(x)), 1) * f1.deriv(f0.eval(x), 1) * f0.deriv(x, 1);
  CHECK(composition_derivative(sys, x) == doctest::Approx(chain).epsilon(1e-14));
  // Product of 1 - r_i at the fixed point.
  CHECK(composition_derivative(sys, 1.0) == doctest::Approx(-0.8 * -0.2 * 0.5).epsilon(1e-14));
}

TEST_CASE("orbits") {
  auto sys = make_system({ricker(1.8), ricker(1.2), ricker(0.5)});
  auto orbit = iterate_orbit(sys, 0.1, 10);
  REQUIRE(orbit.size() == 31);
  CHECK(orbit[0] == 0.1);
  CHECK(orbit[1] == doctest::Approx(ricker(1.8).eval(0.1)));
  CHECK(orbit[30] == doctest::Approx(compose_eval(sys, 0.1, 30)));

  // x (1 + 4 (1 - x)) lives on [0, 1.25] but sends 0.6 to 1.56.
  auto q = make_system({quadratic(4.0)});
  CHECK_THROWS_WITH_AS(iterate_orbit(q, 0.6, 2), doctest::Contains("escapes"), DomainError);
  CHECK_THROWS_AS(compose_eval(q, 0.6, 2), DomainError);
  CHECK_THROWS_AS(compose_eval(q, 1.3, 1), DomainError);
}

TEST_CASE("fixed points of the period map") {
  auto sys = make_system({ricker(1.8), ricker(1.2), ricker(0.5)});
  FixedPointScan scan = find_fixed_points(sys, scan_grid());
  CHECK(scan.positive() == std::vector<double>{1.0});
  CHECK(scan.points.front() == 0.0);

  // Two fixed points besides 1 for the counterexample pair, from an
  // independent high-precision solve of Phi_2(x) = x.
  auto bhp = make_system({bh(1.1, 7.5), bh(7.0, 2.3)});
  FixedPointScan b = find_fixed_points(bhp, scan_grid(static_cast<int>(bhp.working_interval().hi / 1e-4)));
  auto pos = b.positive();
  REQUIRE(pos.size() == 3);
  CHECK(pos[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(pos[1] == doctest::Approx(1.43653307198192959675733930409).epsilon(1e-10));
  CHECK(pos[2] == doctest::Approx(1.61501119404876190568174006811).epsilon(1e-10));
}

TEST_CASE("geometric cycles of an autonomous map") {
  // Ricker with r = 2.3 has a 2-cycle whose points were computed independently.
  auto sys = make_system({ricker(2.3)});
  CycleScan scan = find_geometric_cycles(sys, 2, scan_grid());
  REQUIRE(scan.cycles.size() == 2);
  CHECK(scan.cycles[0].r == 1);
  CHECK(scan.cycles[0].points == std::vector<double>{1.0});
  const auto& two = scan.cycles[1];
  REQUIRE(two.r == 2);
  CHECK(two.s == 2);
  CHECK(two.points[0] == doctest::Approx(0.407845029758887146790924481279652).epsilon(1e-11));
  CHECK(two.points[1] == doctest::Approx(1.59215497024111285320907551872035).epsilon(1e-11));
  CHECK(two.max_residual < 1e-10);
}

TEST_CASE("geometric cycles of a periodic system lift to lcm(r, p)") {
  auto sys = make_system({bh(1.1, 7.5), bh(7.0, 2.3)});
  CycleScan scan = find_geometric_cycles(sys, 2, scan_grid());
  REQUIRE(scan.cycles.size() == 3);
  CHECK(scan.cycles[0].r == 1);
  CHECK(scan.cycles[0].s == 2);
  CHECK(scan.cycles[0].complete.size() == 2);
  for (std::size_t i = 1; i < 3; ++i) {
    const auto& c = scan.cycles[i];
    CHECK(c.r == 2);
    CHECK(c.s == 2);
    // x_{t+1} = f_t(x_t) around the whole cycle.
    CHECK(sys.map(0).eval(c.points[0]) == doctest::Approx(c.points[1]).epsilon(1e-9));
    CHECK(sys.map(1).eval(c.points[1]) == doctest::Approx(c.points[0]).epsilon(1e-9));
  }
  CHECK_THROWS_AS(find_geometric_cycles(sys, 0, scan_grid()), InvalidArgument);
}

TEST_CASE("monotonicity bound") {
  auto sys = make_system({ricker(2.0)});
  MonotonicityReport m = monotonicity_bound(sys, scan_grid());
  CHECK(m.c_phi == doctest::Approx(0.5).epsilon(1e-6));

  auto pw = make_system({make_model(ModelFamily::PiecewiseLinearRecip, {{"slope", 4}, {"knee", 0.6}})});
  CHECK_THROWS_AS(monotonicity_bound(pw, scan_grid()), InvalidArgument);
}

TEST_CASE("the period map's slope at 0 is the product of the slopes") {
  auto sys = make_system({ricker(1.8), ricker(1.2), ricker(0.5)});
  CHECK(composition_derivative(sys, 0.0) == doctest::Approx(std::exp(1.8 + 1.2 + 0.5)).epsilon(1e-12));
}
