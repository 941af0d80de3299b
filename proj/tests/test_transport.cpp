#include <doctest.h>

#include <algorithm>
#include <array>
#include <numeric>

#include "strassen/transport.hpp"
#include "support.hpp"

using namespace strassen;
using strassen::testing::random_cost;
using strassen::testing::random_dist;
using strassen::testing::random_size;

namespace {

const Dist kA = Dist::bernoulli(0.1), kB = Dist::bernoulli(0.5);

double plan_cost(const Table& plan, const CostMatrix& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) s += plan(i, j) * c(i, j);
  return s;
}

}  // namespace

TEST_CASE("cost matrices are finite and nonnegative") {
  CHECK_THROWS_AS(CostMatrix(Table::from_rows({{0.0, -1.0}})), ValidationError);
  CHECK_THROWS_AS(CostMatrix(Table::from_rows({{0.0, kInf}})), ValidationError);
}

TEST_CASE("ot_cost examples") {
  CHECK(ot_cost(kA, kB, CostMatrix::hamming(2)).objective == doctest::Approx(0.4).epsilon(1e-12));
  const Dist p({0.2, 0.3, 0.5});
  CHECK(ot_cost(p, p, CostMatrix::hamming(3)).objective == doctest::Approx(0.0));

  std::mt19937_64 rng(21);
  const Dist u = Dist::uniform(3);
  for (int t = 0; t < 50; ++t) {
    const CostMatrix c = random_cost(rng, 3, 3);
    std::array<int, 3> perm{0, 1, 2};
    double best = kInf;
    do {
      best = std::min(best, (c(0, perm[0]) + c(1, perm[1]) + c(2, perm[2])) / 3.0);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(ot_cost(u, u, c).objective == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("ot plans are feasible and self-consistent") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 100; ++t) {
    const std::size_t kx = random_size(rng, 1, 7), ky = random_size(rng, 1, 7);
    const Dist px = random_dist(rng, kx, 0.2), py = random_dist(rng, ky, 0.2);
    const CostMatrix c = random_cost(rng, kx, ky);
    const auto plan = ot_cost(px, py, c);
    const auto rows = plan.plan.row_marginal(), cols = plan.plan.col_marginal();
    for (std::size_t i = 0; i < kx; ++i) CHECK(rows[i] == doctest::Approx(px[i]).epsilon(1e-9));
    for (std::size_t j = 0; j < ky; ++j) CHECK(cols[j] == doctest::Approx(py[j]).epsilon(1e-9));
    CHECK(plan_cost(plan.plan.matrix(), c) == doctest::Approx(plan.objective).epsilon(1e-9));
    CHECK(ot_value(px.mass(), py.mass(), c) == doctest::Approx(plan.objective).epsilon(1e-9));
  }
}

TEST_CASE("2x2 closed form agrees with min-cost flow") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 200; ++t) {
    const Dist px = random_dist(rng, 2), py = random_dist(rng, 2);
    const CostMatrix c = random_cost(rng, 2, 2);
    CHECK(ot_value_2x2(px[0], py[0], c) == doctest::Approx(ot_cost(px, py, c).objective).epsilon(1e-12));
  }
}

TEST_CASE("ecp examples") {
  const CostMatrix h = CostMatrix::hamming(2);
  CHECK(ecp(kA, kB, h, 1.0).value == doctest::Approx(0.0));
  CHECK(ecp(kA, kB, h, -0.5).value == doctest::Approx(1.0));
  CHECK(ecp(kA, kB, h, 0.0).value == doctest::Approx(0.4).epsilon(1e-12));
  const auto dual = ecp_dual_bruteforce(kA, kB, h, 0.0);
  CHECK(dual.value == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(dual.set == std::vector<std::size_t>{1});
  const auto none = ecp_dual_bruteforce(kA, kB, h, 2.0);
  CHECK(none.value == 0.0);
  CHECK(none.set.empty());
}

TEST_CASE("ecp plans are couplings whose excess mass equals G") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 100; ++t) {
    const std::size_t kx = random_size(rng, 1, 6), ky = random_size(rng, 1, 6);
    const Dist px = random_dist(rng, kx, 0.2), py = random_dist(rng, ky, 0.2);
    const CostMatrix c = random_cost(rng, kx, ky, true);
    const double alpha = std::uniform_real_distribution<double>(-0.1, 1.1)(rng);
    const auto sol = ecp(px, py, c, alpha);
    double excess = 0.0;
    for (std::size_t i = 0; i < kx; ++i)
      for (std::size_t j = 0; j < ky; ++j) {
        CHECK(sol.plan(i, j) >= -1e-15);
        if (!admissible(c(i, j), alpha)) excess += sol.plan(i, j);
      }
    CHECK(excess == doctest::Approx(sol.value).epsilon(1e-9));
    const auto rows = sol.plan.row_sums();
    for (std::size_t i = 0; i < kx; ++i) CHECK(rows[i] == doctest::Approx(px[i]).epsilon(1e-9));
  }
}

TEST_CASE("ecp is non-increasing in alpha, and equals tv for Hamming at zero") {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = random_size(rng, 2, 6);
    const Dist px = random_dist(rng, k), py = random_dist(rng, k);
    CHECK(ecp(px, py, CostMatrix::hamming(k), 0.0).value == doctest::Approx(tv(px, py)).epsilon(1e-12));
    const CostMatrix c = random_cost(rng, k, k);
    double prev = 1.0;
    for (double a = -0.05; a <= 1.05; a += 0.1) {
      const double g = ecp(px, py, c, a).value;
      CHECK(g <= prev + 1e-12);
      prev = g;
    }
  }
}

TEST_CASE("integral mode matches the double solver") {
  std::mt19937_64 rng(26);
  for (int t = 0; t < 100; ++t) {
    const std::size_t kx = random_size(rng, 1, 6), ky = random_size(rng, 1, 6);
    const std::int64_t denom = 1000;
    auto counts = [&](std::size_t k) {
      std::vector<std::int64_t> v(k, 0);
      for (std::int64_t u = 0; u < denom; ++u) ++v[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)];
      return v;
    };
    const auto cx = counts(kx), cy = counts(ky);
    std::vector<double> mx(cx.begin(), cx.end()), my(cy.begin(), cy.end());
    for (auto& v : mx) v /= denom;
    for (auto& v : my) v /= denom;
    const CostMatrix c = random_cost(rng, kx, ky, true);
    const double num = static_cast<double>(ecp_integral(cx, cy, c, 0.5));
    CHECK(num / denom == doctest::Approx(ecp_masses(mx, my, c.values(), 0.5).value).epsilon(1e-12));
  }
}

TEST_CASE("dual brute force refuses large alphabets") {
  const Dist big = Dist::uniform(21);
  CHECK_THROWS_AS(ecp_dual_bruteforce(big, big, CostMatrix::hamming(21), 0.0), SizeGuardError);
}

TEST_CASE("gamma_enlarge") {
  const CostMatrix h = CostMatrix::hamming(2);
  CHECK(gamma_enlarge({}, h, 0.0).empty());
  const std::vector<std::size_t> a0{0};
  CHECK(gamma_enlarge(a0, h, 0.0) == std::vector<std::size_t>{0});
  CHECK(gamma_enlarge(a0, h, 1.0) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("kantorovich certificates") {
  const CostMatrix h = CostMatrix::hamming(2);
  const auto plan = ot_cost(kA, kB, h);
  const auto cert = kantorovich_certificate(kA, kB, h, plan);
  CHECK(std::abs(cert.gap) <= 1e-9);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(cert.f[i] + cert.g[j] <= h(i, j) + 1e-12);

  // Product coupling is feasible but suboptimal.
  const TransportPlan product{JointDist::product(kA, kB), 0.0};
  const TransportPlan worse{product.plan, plan_cost(product.plan.matrix(), h)};
  CHECK(kantorovich_certificate(kA, kB, h, worse).gap > 1e-3);

  const CostMatrix zero(Table(2, 2, 0.0));
  const auto zc = kantorovich_certificate(kA, kB, zero, ot_cost(kA, kB, zero));
  CHECK(zc.gap == doctest::Approx(0.0));
  for (double v : zc.f) CHECK(v == doctest::Approx(0.0));
  for (double v : zc.g) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("optimal support") {
  const auto s = optimal_support(kA, kB, CostMatrix::hamming(2));
  CHECK(s.contains(0, 0));
  CHECK(s.contains(1, 0));
  CHECK(s.contains(1, 1));
  CHECK_FALSE(s.contains(0, 1));

  const Dist p({0.2, 0.3, 0.5}), q({0.6, 0.4});
  CHECK(optimal_support(p, q, CostMatrix(Table(3, 2, 0.7))).size() == 6);
  CHECK(optimal_support(Dist::point_mass(3, 1), Dist::point_mass(2, 0), CostMatrix(Table(3, 2, 0.7))).size() == 1);
}

TEST_CASE("optimal support contains every optimal plan and each cell is attained") {
  std::mt19937_64 rng(27);
  for (int t = 0; t < 40; ++t) {
    const std::size_t kx = random_size(rng, 2, 4), ky = random_size(rng, 2, 4);
    const Dist px = random_dist(rng, kx), py = random_dist(rng, ky);
    const CostMatrix c = random_cost(rng, kx, ky, true);  // ties make the optimal face non-trivial
    const auto s = optimal_support(px, py, c);
    const auto plan = ot_cost(px, py, c);
    for (std::size_t i = 0; i < kx; ++i)
      for (std::size_t j = 0; j < ky; ++j)
        if (plan.plan(i, j) > 1e-9) CHECK(s.contains(i, j));
    // Tight dual on S: f + g = c there.
    const auto [f, g] = dual_potentials(plan.plan.matrix(), c);
    for (auto [i, j] : s.cells()) CHECK(f[i] + g[j] == doctest::Approx(c(i, j)).epsilon(1e-9));
  }
}

TEST_CASE("E is convex along mixtures") {
  std::mt19937_64 rng(28);
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = random_size(rng, 2, 5);
    const CostMatrix c = random_cost(rng, k, k);
    const Dist p = random_dist(rng, k), q = random_dist(rng, k), p2 = random_dist(rng, k), q2 = random_dist(rng, k);
    const double lam = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::vector<double> mp(k), mq(k);
    for (std::size_t i = 0; i < k; ++i) {
      mp[i] = lam * p[i] + (1 - lam) * p2[i];
      mq[i] = lam * q[i] + (1 - lam) * q2[i];
    }
    const double mix = ot_value(mp, mq, c);
    CHECK(mix <= lam * ot_value(p.mass(), q.mass(), c) + (1 - lam) * ot_value(p2.mass(), q2.mass(), c) + 1e-9);
  }
}
