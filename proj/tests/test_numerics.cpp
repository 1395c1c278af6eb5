#include <doctest.h>

#include <cmath>
#include <limits>

#include "envstab/error.hpp"
#include "envstab/numerics.hpp"

using namespace envstab;

namespace {

GridConfig small_grid() {
  GridConfig cfg;
  cfg.seed_cells = 256;
  cfg.max_refinement_depth = 10;
  return cfg;
}

}  // namespace

TEST_CASE("make_interval rejects empty and non-finite intervals") {
  CHECK_THROWS_AS(make_interval(1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_interval(2.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_interval(0.0, std::numeric_limits<double>::infinity()), InvalidArgument);
  Interval i = make_interval(0.5, 2.5);
  CHECK(i.length() == doctest::Approx(2.0));
  CHECK(i.mid() == doctest::Approx(1.5));
}

TEST_CASE("grid config validation") {
  GridConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.seed_cells = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = GridConfig{};
  cfg.max_refinement_depth = 31;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = GridConfig{};
  cfg.exclusion_radius = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("sign check accepts a strictly positive function") {
  auto g = [](double x) { return 1.0 + x * x; };
  SignReport r = adaptive_sign_check(g, {-1.0, 1.0}, Claim::Positive, small_grid());
  CHECK(r.status == SignStatus::AllPositive);
  CHECK(r.verified());
  CHECK(r.unresolved.empty());
  CHECK(r.min_abs_value == doctest::Approx(1.0));
}

TEST_CASE("sign check reports the leftmost violation") {
  auto g = [](double x) { return std::sin(10.0 * x); };
  SignReport r = adaptive_sign_check(g, {0.1, 1.0}, Claim::Positive, small_grid());
  REQUIRE(r.violated());
  REQUIRE(r.witness.has_value());
  // sin(10x) first turns negative past pi/10.
  CHECK(*r.witness > M_PI / 10.0);
  CHECK(*r.witness < M_PI / 10.0 + 0.9 / 256 + 1e-12);
  CHECK(*r.witness_value < 0.0);
}

TEST_CASE("sign check on the negative side") {
  auto g = [](double x) { return -std::exp(x); };
  CHECK(adaptive_sign_check(g, {0.0, 3.0}, Claim::Negative, small_grid()).status ==
        SignStatus::AllNegative);
}

TEST_CASE("a tangential zero is unresolved, not a violation") {
  auto g = [](double x) { return (x - 0.5) * (x - 0.5); };
  SignReport r = adaptive_sign_check(g, {0.0, 1.0}, Claim::Positive, small_grid());
  CHECK(r.status == SignStatus::Unresolved);
  REQUIRE(!r.unresolved.empty());
  bool covers = false;
  for (const Interval& u : r.unresolved) covers = covers || u.contains(0.5);
  CHECK(covers);
}

TEST_CASE("NaN samples are never accepted") {
  auto g = [](double x) { return x > 0.7 && x < 0.71 ? std::nan("") : 1.0; };
  SignReport r = adaptive_sign_check(g, {0.0, 1.0}, Claim::Positive, small_grid());
  CHECK(r.status == SignStatus::Unresolved);
}

TEST_CASE("bracketed_root") {
  auto g = [](double x) { return x * x - 2.0; };
  CHECK(bracketed_root(g, 0.0, 2.0, 1e-14) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(bracketed_root(g, 2.0, 3.0, 1e-12), NumericalError);
  auto lin = [](double x) { return x - 0.5; };
  CHECK(bracketed_root(lin, 0.5, 3.0, 1e-12) == 0.5);
}

TEST_CASE("scan_roots finds every simple root of a polynomial") {
  auto g = [](double x) { return (x - 0.1) * (x - 0.35) * (x - 0.6) * (x - 0.95); };
  auto roots = scan_roots(g, {0.0, 1.0}, 4096, 1e-12);
  REQUIRE(roots.size() == 4);
  CHECK(roots[0] == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(roots[1] == doctest::Approx(0.35).epsilon(1e-10));
  CHECK(roots[2] == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(roots[3] == doctest::Approx(0.95).epsilon(1e-10));
}

TEST_CASE("scan_roots keeps zeros at grid nodes once") {
  auto g = [](double x) { return x - 0.5; };
  auto roots = scan_roots(g, {0.0, 1.0}, 8, 1e-12);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] == 0.5);
}

TEST_CASE("finite differences match analytic derivatives") {
  auto g = [](double x) { return std::exp(0.7 * x) * std::sin(x); };
  for (double x : {0.3, 1.0, 2.5}) {
    double e = std::exp(0.7 * x);
    double s = std::sin(x);
    double c = std::cos(x);
    double d1 = e * (0.7 * s + c);
    double d2 = e * (0.49 * s + 1.4 * c - s);
    double d3 = e * (0.343 * s + 1.47 * c - 2.1 * s - c);
    CHECK(fd_derivative(g, x, 1) == doctest::Approx(d1).epsilon(1e-9));
    CHECK(fd_derivative(g, x, 2) == doctest::Approx(d2).epsilon(1e-7));
    CHECK(fd_derivative(g, x, 3) == doctest::Approx(d3).epsilon(1e-5));
  }
}

TEST_CASE("finite differences respect a domain") {
  auto g = [](double x) { return std::sqrt(x); };
  CHECK_THROWS_AS(fd_derivative(g, 1e-5, 1, 0.0, Interval{0.0, 1.0}), DomainError);
  CHECK(fd_derivative(g, 0.5, 1, 0.0, Interval{0.0, 1.0}) ==
        doctest::Approx(0.5 / std::sqrt(0.5)).epsilon(1e-8));
  CHECK_THROWS_AS(fd_derivative(g, 0.5, 4), InvalidArgument);
}

TEST_CASE("default steps scale with |x|") {
  CHECK(default_fd_step(10.0, 1) == doctest::Approx(10.0 * default_fd_step(1.0, 1)));
  CHECK(default_fd_step(0.01, 2) == default_fd_step(0.05, 2));
  CHECK(default_fd_step(0.5, 3) == doctest::Approx(0.5 * default_fd_step(1.0, 3)));
}
