#include <doctest.h>

#include <cmath>

#include "strassen/measures.hpp"
#include "support.hpp"

using namespace strassen;
using strassen::testing::random_dist;
using strassen::testing::random_signed;

TEST_CASE("dist validation") {
  CHECK_THROWS_AS(Dist({0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(Dist({1.5, -0.5}), ValidationError);
  CHECK_THROWS_AS(Dist({"a", "a"}, {0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(Dist({"a"}, {0.5, 0.5}), ValidationError);
  CHECK_NOTHROW(Dist({0.0, 1.0}));
  CHECK(Dist::bernoulli(0.1)[0] == doctest::Approx(0.1));
  CHECK(Dist::bernoulli(0.1).labels() == std::vector<std::string>{"1", "0"});
}

TEST_CASE("kl examples") {
  const Dist p({0.2, 0.3, 0.5});
  CHECK(kl(p, p) == 0.0);
  const double want = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  CHECK(kl(Dist({0.5, 0.5}), Dist({0.25, 0.75})) == doctest::Approx(want).epsilon(1e-14));
  CHECK(kl(Dist::bernoulli(1.0), Dist::bernoulli(0.0)) == kInf);
  CHECK(kl(Dist::bernoulli(0.0), Dist::bernoulli(0.3)) == doctest::Approx(-std::log(0.7)));
  CHECK_THROWS_AS(kl(Dist({0.5, 0.5}), Dist({1.0})), ValidationError);
}

TEST_CASE("kl is nonnegative and vanishes only on the diagonal") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = strassen::testing::random_size(rng, 2, 6);
    const Dist p = random_dist(rng, k), q = random_dist(rng, k);
    CHECK(kl(q, p) >= 0.0);
    CHECK(kl(p, p) <= 1e-10);
  }
}

TEST_CASE("tv examples and brute-force event supremum") {
  CHECK(tv(Dist::bernoulli(0.1), Dist::bernoulli(0.5)) == doctest::Approx(0.4));
  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    const std::size_t k = strassen::testing::random_size(rng, 2, 10);
    const Dist p = random_dist(rng, k, 0.2), q = random_dist(rng, k, 0.2);
    double best = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        if (mask >> i & 1) s += p[i] - q[i];
      best = std::max(best, s);
    }
    CHECK(tv(p, q) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("chi2_half") {
  CHECK(chi2_half(SignedVec::zeros(2), Dist::bernoulli(0.3)) == 0.0);
  CHECK(chi2_half(SignedVec({1.5, -1.5}), Dist::bernoulli(0.1)) == doctest::Approx(12.5).epsilon(1e-14));
  CHECK(chi2_half(SignedVec({1.0, -1.0}), Dist::bernoulli(0.0)) == kInf);
  CHECK(chi2_half(SignedVec({0.0, 0.0}), Dist::bernoulli(0.0)) == 0.0);
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const Dist p = random_dist(rng, 4);
    const SignedVec b = random_signed(rng, 4), b2 = random_signed(rng, 4);
    const double s = std::uniform_real_distribution<double>(0.1, 5.0)(rng);
    CHECK(chi2_half(b.scaled(s), p) == doctest::Approx(s * s * chi2_half(b, p)).epsilon(1e-12));
    const double lam = 0.3;
    CHECK(chi2_half(b.scaled(lam) + b2.scaled(1 - lam), p) <=
          lam * chi2_half(b, p) + (1 - lam) * chi2_half(b2, p) + 1e-12);
  }
}

TEST_CASE("signed vectors sum to zero") {
  CHECK_THROWS_AS(SignedVec({1.0, -0.5}), ValidationError);
  const auto d = SignedVec::difference(Dist::bernoulli(0.3), Dist::bernoulli(0.1), 0.1);
  CHECK(d[0] == doctest::Approx(2.0));
  CHECK(d[1] == doctest::Approx(-2.0));
}

TEST_CASE("coupling_transfer") {
  SUBCASE("identical marginals return the input") {
    const JointDist q(Table::from_rows({{0.1, 0.2}, {0.3, 0.4}}));
    const JointDist out = coupling_transfer(q, Dist({0.3, 0.7}), Dist({0.4, 0.6}));
    CHECK(tv(out, q) <= 1e-15);
  }
  SUBCASE("point masses give the product point mass") {
    const JointDist q(Table::from_rows({{0.1, 0.2, 0.0}, {0.3, 0.1, 0.3}}));
    const JointDist out = coupling_transfer(q, Dist::point_mass(2, 1), Dist::point_mass(3, 2));
    CHECK(out(1, 2) == doctest::Approx(1.0));
  }
  SUBCASE("random 3x3 instances respect the TV bound") {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 100; ++t) {
      Table m(3, 3);
      const Dist flat = random_dist(rng, 9);
      for (std::size_t i = 0; i < 9; ++i) m(i / 3, i % 3) = flat[i];
      const JointDist q(m);
      const Dist px = random_dist(rng, 3), py = random_dist(rng, 3);
      const JointDist out = coupling_transfer(q, px, py);
      const auto rows = out.row_marginal(), cols = out.col_marginal();
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(rows[i] == doctest::Approx(px[i]).epsilon(1e-12));
        CHECK(cols[i] == doctest::Approx(py[i]).epsilon(1e-12));
      }
      CHECK(tv(out, q) <= tv(px, Dist(q.row_marginal())) + tv(py, Dist(q.col_marginal())) + 1e-12);
    }
  }
}

TEST_CASE("maximal coupling attains tv") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 50; ++t) {
    const Dist p = random_dist(rng, 5), q = random_dist(rng, 5);
    const Table m = maximal_coupling(p.mass(), q.mass());
    double off = 0.0;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j)
        if (i != j) off += m(i, j);
    CHECK(off == doctest::Approx(tv(p, q)).epsilon(1e-12));
  }
}

TEST_CASE("rate curves keep increasing parameters") {
  RateCurve c;
  c.push(0.1, 1.0);
  c.push(0.2, kInf);
  CHECK_THROWS_AS(c.push(0.2, 0.0), ValidationError);
  CHECK(c.values.size() == 2);
}
