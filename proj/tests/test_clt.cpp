#include <doctest.h>

#include <cmath>
#include <numbers>

#include "strassen/clt.hpp"
#include "support.hpp"

using namespace strassen;

namespace {

double density(double x, double s2) { return std::exp(-x * x / (2 * s2)) / std::sqrt(2 * std::numbers::pi * s2); }

}  // namespace

TEST_CASE("gaussian parameters") {
  const auto g = gauss_params(Dist::bernoulli(0.5));
  CHECK(g.cov(0, 0) == doctest::Approx(0.25));
  CHECK(g.cov(1, 1) == doctest::Approx(0.25));
  CHECK(g.cov(0, 1) == doctest::Approx(-0.25));
  const auto pm = gauss_params(Dist::point_mass(3, 1));
  for (double v : pm.cov.data()) CHECK(v == 0.0);
  std::mt19937_64 rng(51);
  for (int t = 0; t < 20; ++t) {
    const auto gp = gauss_params(strassen::testing::random_dist(rng, 4));
    for (double s : gp.cov.row_sums()) CHECK(std::abs(s) <= 1e-15);
    for (double m : gp.mean) CHECK(m == 0.0);
  }
}

TEST_CASE("crossing points") {
  const auto eq = crossing_points({0.21, 0.21, 0.3});
  REQUIRE(eq.roots.size() == 1);
  CHECK(eq.roots[0] == doctest::Approx(-0.15));

  const auto inst = BinaryCltInstance::from(0.1, 0.5, 0.0);
  const auto sym = crossing_points(inst);
  REQUIRE(sym.roots.size() == 2);
  CHECK(sym.roots[0] == doctest::Approx(-sym.roots[1]));
  const double sx = 0.3, sy = 0.5;
  const double want = sx * sy * std::sqrt(2 * (0.09 - 0.25) * std::log(sx / sy)) / std::abs(0.09 - 0.25);
  CHECK(sym.roots[1] == doctest::Approx(want).epsilon(1e-12));

  for (double d = -3.0; d <= 3.0; d += 0.25) {
    const auto cr = crossing_points(BinaryCltInstance::from(0.1, 0.5, d));
    CHECK_FALSE(cr.negative_discriminant);
    for (double r : cr.roots) CHECK(std::abs(density(r, 0.09) - density(r + d, 0.25)) <= 1e-10);
  }
  CHECK_THROWS_AS(crossing_points({0.0, 0.25, 0.0}), ValidationError);
}

TEST_CASE("normal cdf") {
  CHECK(normal_cdf(0.0, 0.3) == 0.5);
  for (double x : {0.1, 0.7, 2.5}) CHECK(normal_cdf(x, 0.2) + normal_cdf(-x, 0.2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(normal_cdf(1.96 * std::sqrt(0.3), 0.3) == doctest::Approx(0.975).epsilon(1e-4));
  CHECK_THROWS_AS(normal_cdf(0.0, 0.0), ValidationError);
}

TEST_CASE("lambda_binary") {
  CHECK(lambda_binary(0.3, 0.3, 0.5) == 0.0);
  CHECK(lambda_binary(0.3, 0.3, 0.0) == 0.0);
  const auto cr = crossing_points(BinaryCltInstance::from(0.1, 0.5, 0.0));
  CHECK(lambda_binary(0.1, 0.5, 0.0) ==
        doctest::Approx(normal_cdf(cr.roots[1], 0.09) - normal_cdf(cr.roots[1], 0.25)).epsilon(1e-15));
  CHECK_THROWS_AS(lambda_binary(0.5, 0.1, 0.0), ValidationError);

  double prev = 1.0;
  for (double d = -3.0; d <= 3.0; d += 0.05) {
    const double v = lambda_binary(0.1, 0.5, d);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v <= prev + 1e-15);
    CHECK(lambda_binary(0.1, 0.5, d + 1e-6) >= v - 1e-4);
    prev = v;
  }
}

TEST_CASE("dual grid limits") {
  CHECK(lambda_dual_grid(0.1, 0.5, 40.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lambda_dual_grid(0.1, 0.5, -40.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double d = -3.0; d <= 3.0; d += 0.3) {
    CHECK(lambda_dual_grid(0.1, 0.5, d) == doctest::Approx(lambda_binary(0.1, 0.5, d)).epsilon(1e-6));
    CHECK(lambda_dual_grid(0.3, 0.3, d) == doctest::Approx(lambda_binary(0.3, 0.3, d)).epsilon(1e-6));
  }
}
