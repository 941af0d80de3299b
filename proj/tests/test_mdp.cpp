#include <doctest.h>

#include <cmath>

#include "strassen/mdp.hpp"
#include "support.hpp"

using namespace strassen;
using strassen::testing::random_cost;
using strassen::testing::random_dist;
using strassen::testing::random_signed;

namespace {

const Dist kA = Dist::bernoulli(0.1), kB = Dist::bernoulli(0.5);
const CostMatrix kH = CostMatrix::hamming(2);

double binary_theta(const ThetaModel& m, double u, double v) {
  const double bx[2] = {u, -u}, by[2] = {v, -v};
  return theta(m, bx, by);
}

double sup_diff(const SignedVec& a, const SignedVec& b) { return (a - b).sup_norm(); }

}  // namespace

TEST_CASE("theta on the binary example") {
  const ThetaModel m(optimal_support(kA, kB, kH), kH);
  CHECK(m.consistent());
  CHECK(binary_theta(m, 0.0, 0.0) == 0.0);
  CHECK(binary_theta(m, 0.2, -0.1) == doctest::Approx(-0.3).epsilon(1e-12));
  for (double u : {-1.0, -0.3, 0.4, 2.0})
    for (double v : {-0.7, 0.0, 1.1}) CHECK(binary_theta(m, u, v) == doctest::Approx(v - u).epsilon(1e-12));

  Table plan;
  const double bx[2] = {0.2, -0.2}, by[2] = {-0.1, 0.1};
  theta(m, bx, by, &plan);
  const SignedMatrix sm(plan);
  CHECK(sm.negative_within(m.support()));
  CHECK(sm.row_sums()[0] == doctest::Approx(0.2));
  CHECK(sm.col_sums()[0] == doctest::Approx(-0.1));
}

TEST_CASE("theta is homogeneous, subadditive and Lipschitz") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    const std::size_t kx = strassen::testing::random_size(rng, 2, 4), ky = strassen::testing::random_size(rng, 2, 4);
    const Dist px = random_dist(rng, kx), py = random_dist(rng, ky);
    const CostMatrix c = random_cost(rng, kx, ky, t % 2 == 0);
    const SupportSet s = optimal_support(px, py, c);
    const ThetaModel m(s, c);
    REQUIRE(m.consistent());
    const double lip = theta_lipschitz_constant(m);
    for (int k = 0; k < 10; ++k) {
      const SignedVec bx = random_signed(rng, kx), by = random_signed(rng, ky);
      const SignedVec bx2 = random_signed(rng, kx), by2 = random_signed(rng, ky);
      const double th = theta(bx, by, s, c), th2 = theta(bx2, by2, s, c);
      const double scale = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
      CHECK(theta(bx.scaled(scale), by.scaled(scale), s, c) == doctest::Approx(scale * th).epsilon(1e-9));
      CHECK(theta(bx + bx2, by + by2, s, c) <= th + th2 + 1e-9);
      const double gap = std::max(sup_diff(bx, bx2), sup_diff(by, by2));
      CHECK(std::abs(th - th2) <= 1.1 * lip * gap + 1e-9);
    }
  }
}

TEST_CASE("binary moderate-deviation rates") {
  // σ_X = 0.3, σ_Y = 0.5 for a = 0.1, b = 0.5.
  const double lower = mdp_rate_lower(kA, kB, kH, -1.0);
  const double upper = mdp_rate_upper(kA, kB, kH, 1.0);
  CHECK(lower == doctest::Approx(1.0 / (2.0 * 0.8 * 0.8)).epsilon(1e-6));
  CHECK(upper == doctest::Approx(0.5 * 2.5 * 2.5 / 0.25).epsilon(1e-6));
  for (double t : {0.5, 2.0}) {
    CHECK(mdp_rate_lower(kA, kB, kH, -t) == doctest::Approx(t * t * lower).epsilon(1e-6));
    CHECK(mdp_rate_upper(kA, kB, kH, t) == doctest::Approx(t * t * upper).epsilon(1e-6));
  }
  CHECK(mdp_rate_upper(kA, kB, kH, 1e-4) < 1e-6);
}

TEST_CASE("lower rate agrees with a direct constrained grid minimization") {
  const ThetaModel m(optimal_support(kA, kB, kH), kH);
  const double delta = -1.0, sx2 = 0.09, sy2 = 0.25;
  double best = kInf;
  const int grid = 600;
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j <= grid; ++j) {
      const double u = -3.0 + 6.0 * i / grid, v = -3.0 + 6.0 * j / grid;
      if (binary_theta(m, u, v) > delta) continue;
      best = std::min(best, std::max(u * u / (2 * sx2), v * v / (2 * sy2)));
    }
  const double rate = mdp_rate_lower(kA, kB, kH, delta);
  CHECK(rate <= best + 1e-9);
  CHECK(rate == doctest::Approx(best).epsilon(2e-2));
}

TEST_CASE("upper rate agrees with a direct nested grid minimization") {
  const ThetaModel m(optimal_support(kA, kB, kH), kH);
  const double delta = 1.0, sx2 = 0.09, sy2 = 0.25;
  // Orientation X→Y: outer over u, inner min θ over v with χ²(v) ≤ χ²(u).
  auto oriented = [&](bool swap) {
    const double s_out = swap ? sy2 : sx2, s_in = swap ? sx2 : sy2;
    double best = kInf;
    for (int i = -3000; i <= 3000; ++i) {
      const double u = i / 500.0;
      const double rho = u * u / (2 * s_out);
      const double vmax = std::sqrt(2 * s_in * rho);
      double inner = kInf;
      for (int j = -200; j <= 200; ++j) {
        const double v = vmax * j / 200.0;
        inner = std::min(inner, swap ? binary_theta(m, v, u) : binary_theta(m, u, v));
      }
      if (inner > delta) best = std::min(best, rho);
    }
    return best;
  };
  const double direct = std::min(oriented(false), oriented(true));
  CHECK(mdp_rate_upper(kA, kB, kH, delta) == doctest::Approx(direct).epsilon(1e-2));
}

TEST_CASE("moderate-deviation rates on a 3-letter instance") {
  const Dist px({0.2, 0.3, 0.5}), py({0.4, 0.4, 0.2});
  const CostMatrix c(Table::from_rows({{0.0, 0.7, 1.0}, {0.4, 0.0, 0.6}, {1.0, 0.3, 0.0}}));
  const SupportSet s = optimal_support(px, py, c);
  const double rate = mdp_rate_lower(px, py, c, -1.0);
  REQUIRE(std::isfinite(rate));
  // No sampled direction beats the returned minimum.
  std::mt19937_64 rng(42);
  for (int t = 0; t < 2000; ++t) {
    const SignedVec bx = random_signed(rng, 3), by = random_signed(rng, 3);
    const double th = theta(bx, by, s, c);
    if (th >= 0.0) continue;
    const double q = std::max(chi2_half(bx, px), chi2_half(by, py));
    CHECK(q / (th * th) >= rate - 1e-7);
  }
  CHECK(mdp_rate_lower(px, py, c, -2.0) == doctest::Approx(4.0 * rate).epsilon(1e-6));
  const double up = mdp_rate_upper(px, py, c, 1.0);
  CHECK(std::isfinite(up));
  CHECK(mdp_rate_upper(px, py, c, 0.5) == doctest::Approx(0.25 * up).epsilon(1e-6));
}

TEST_CASE("rates are invariant under exchanging the two sides") {
  const Dist p({0.2, 0.8}), q({0.6, 0.4});
  const CostMatrix c(Table::from_rows({{0.0, 1.0}, {0.5, 0.0}}));
  CHECK(mdp_rate_lower(p, q, c, -1.0) == doctest::Approx(mdp_rate_lower(q, p, c.transposed(), -1.0)).epsilon(1e-6));
  CHECK(mdp_rate_upper(p, q, c, 1.0) == doctest::Approx(mdp_rate_upper(q, p, c.transposed(), 1.0)).epsilon(1e-6));
  // E = 0 with zero diagonal cost: θ ≥ 0, so nothing drives E below E.
  CHECK(mdp_rate_lower(p, p, kH, -1.0) == kInf);
}

TEST_CASE("degenerate direction sets give +inf") {
  const Dist p({0.2, 0.3, 0.5});
  const CostMatrix zero(Table(3, 3, 0.0));
  CHECK(mdp_rate_lower(p, p, zero, -1.0) == kInf);
  CHECK(mdp_rate_upper(p, p, zero, 1.0) == kInf);
}

TEST_CASE("guards") {
  const Dist u5 = Dist::uniform(5);
  CHECK_THROWS_AS(mdp_rate_lower(u5, u5, CostMatrix::hamming(5), -1.0), SizeGuardError);
  CHECK_THROWS_AS(mdp_rate_lower(kA, kB, kH, 1.0), ValidationError);
  CHECK_THROWS_AS(mdp_rate_upper(kA, kB, kH, -1.0), ValidationError);
  CHECK_THROWS_AS(mdp_rate_lower(Dist::bernoulli(0.0), kB, kH, -1.0), ValidationError);
}

TEST_CASE("first-order expansion of E along the support") {
  const auto same = seta_check(kA, kB, kH, kA, kB, 0.1);
  CHECK(same.lhs == doctest::Approx(0.0));
  CHECK(same.rhs == doctest::Approx(0.0));
  CHECK(same.holds);

  std::mt19937_64 rng(43);
  for (int t = 0; t < 100; ++t) {
    const Dist qx = random_dist(rng, 2), qy = random_dist(rng, 2);
    CHECK(seta_check(kA, kB, kH, Dist({"1", "0"}, qx.mass()), Dist({"1", "0"}, qy.mass()), 0.1).holds);
  }

  std::vector<double> as;
  for (int k = 4; k <= 12; ++k) as.push_back(std::ldexp(1.0, -k));
  const auto gaps = seta_gaps(kA, kB, kH, SignedVec({0.2, -0.2}), SignedVec({-0.1, 0.1}), as);
  for (double g : gaps) CHECK(std::abs(g) <= 1e-9);

  // Non-linear instance: the gap shrinks toward zero as a ↓ 0.
  const Dist px({0.2, 0.3, 0.5}), py({0.4, 0.4, 0.2});
  const CostMatrix c(Table::from_rows({{0.0, 0.7, 1.0}, {0.4, 0.0, 0.6}, {1.0, 0.3, 0.0}}));
  const auto g3 = seta_gaps(px, py, c, SignedVec({0.3, -0.5, 0.2}), SignedVec({-0.4, 0.1, 0.3}), as);
  for (double g : g3) CHECK(g >= -1e-9);
  CHECK(std::abs(g3.back()) <= std::abs(g3.front()) + 1e-12);
  CHECK(std::abs(g3.back()) <= 1e-3);
}
