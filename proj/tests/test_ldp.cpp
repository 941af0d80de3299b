#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "strassen/ldp.hpp"
#include "support.hpp"

using namespace strassen;

namespace {

const CostMatrix kH = CostMatrix::hamming(2);

RateQuery binary(double a, double b, double alpha) { return {Dist::bernoulli(a), Dist::bernoulli(b), kH, alpha}; }

/// Direct 2-d minimization of max{D(a'‖a), D(b'‖b)} over |a' − b'| ≤ α:
/// for each a' the best b' is the point of [a'−α, a'+α] closest to b.
double direct_f(double a, double b, double alpha) {
  const int grid = 400000;
  auto objective = [&](double ap) {
    const double bp = std::clamp(b, std::max(0.0, ap - alpha), std::min(1.0, ap + alpha));
    return std::max(kl_bernoulli(ap, a), kl_bernoulli(bp, b));
  };
  double best = kInf, arg = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double ap = static_cast<double>(i) / grid;
    if (const double v = objective(ap); v < best) {
      best = v;
      arg = ap;
    }
  }
  // Golden-section polish around the grid minimizer.
  double lo = std::max(0.0, arg - 1.0 / grid), hi = std::min(1.0, arg + 1.0 / grid);
  for (int it = 0; it < 100; ++it) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (objective(m1) < objective(m2))
      hi = m2;
    else
      lo = m1;
  }
  return std::min(best, objective(0.5 * (lo + hi)));
}

}  // namespace

TEST_CASE("kl_bernoulli") {
  CHECK(kl_bernoulli(0.5, 0.25) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)));
  CHECK(kl_bernoulli(0.3, 0.3) == 0.0);
  CHECK(kl_bernoulli(1.0, 0.0) == kInf);
}

TEST_CASE("rate_f_binary") {
  CHECK(rate_f_binary(0.1, 0.5, 0.4) == 0.0);
  CHECK(rate_f_binary(0.3, 0.3, 0.0) == 0.0);
  CHECK(rate_f_binary(0.1, 0.5, 0.2) == doctest::Approx(direct_f(0.1, 0.5, 0.2)).epsilon(1e-8));
  for (double alpha : {0.0, 0.05, 0.1, 0.3, 0.35})
    CHECK(rate_f_binary(0.1, 0.5, alpha) == doctest::Approx(direct_f(0.1, 0.5, alpha)).epsilon(1e-7));
  CHECK_THROWS_AS(rate_f_binary(0.6, 0.5, 0.1), ValidationError);
}

TEST_CASE("rate_g_binary") {
  CHECK(rate_g_binary(0.1, 0.5, 1.0) == kInf);
  CHECK(rate_g_binary(0.1, 0.5, 0.3) == 0.0);
  const double g = rate_g_binary(0.1, 0.5, 0.45);
  CHECK(g > 0.0);
  CHECK(std::isfinite(g));
  // a = b: Q_Y = Q_X is always available, so no radius forces E above α.
  CHECK(rate_g_binary(0.3, 0.3, 0.2) == kInf);
  CHECK(rate_g(binary(0.3, 0.3, 0.2)) == kInf);
}

TEST_CASE("rate_f edge cases and binary agreement") {
  CHECK(rate_f(binary(0.1, 0.5, 0.4)) == 0.0);
  CHECK(rate_f(binary(0.1, 0.5, 0.7)) == 0.0);
  CHECK(rate_f(binary(0.1, 0.5, -0.1)) == kInf);
  CHECK(rate_f(binary(0.1, 0.5, 0.2)) == doctest::Approx(rate_f_binary(0.1, 0.5, 0.2)).epsilon(1e-6));
}

TEST_CASE("rate_g edge cases and binary agreement") {
  CHECK(rate_g(binary(0.1, 0.5, 1.5)) == kInf);
  CHECK(rate_g(binary(0.1, 0.5, 0.3)) == 0.0);
  CHECK(rate_g(binary(0.1, 0.5, 0.45)) == doctest::Approx(rate_g_binary(0.1, 0.5, 0.45)).epsilon(1e-6));
}

TEST_CASE("rate_f is non-increasing, convex and below the one-sided bound") {
  const Dist px({0.2, 0.3, 0.5}), py({0.5, 0.3, 0.2});
  const CostMatrix c(Table::from_rows({{0.0, 0.5, 1.0}, {0.5, 0.0, 0.5}, {1.0, 0.5, 0.0}}));
  const double e = ot_value(px.mass(), py.mass(), c);
  std::vector<double> alphas, values;
  for (int i = 0; i <= 8; ++i) {
    alphas.push_back(0.02 + (e - 0.02) * i / 8.0);
    values.push_back(rate_f({px, py, c, alphas.back()}));
  }
  for (std::size_t i = 1; i < values.size(); ++i) CHECK(values[i] <= values[i - 1] + 1e-9);
  for (std::size_t i = 1; i + 1 < values.size(); ++i) CHECK(values[i] <= 0.5 * (values[i - 1] + values[i + 1]) + 1e-7);

  // Moving only Q_X: binary min over a' with |a' − b| ≤ α of D(a'‖a).
  for (double alpha : {0.05, 0.15, 0.25, 0.35}) {
    const double a = 0.1, b = 0.5;
    const double one_sided = kl_bernoulli(b - alpha, a);
    CHECK(rate_f(binary(a, b, alpha)) <= one_sided + 1e-9);
  }
}

TEST_CASE("rate_g is non-decreasing") {
  const Dist px({0.2, 0.3, 0.5}), py({0.5, 0.3, 0.2});
  const CostMatrix c(Table::from_rows({{0.0, 0.5, 1.0}, {0.5, 0.0, 0.5}, {1.0, 0.5, 0.0}}));
  RateOptions coarse;
  coarse.directions = 72;
  double prev = 0.0;
  for (double alpha = 0.35; alpha <= 0.95; alpha += 0.15) {
    const double g = rate_g({px, py, c, alpha}, coarse);
    CHECK(g >= prev - 1e-6);
    prev = g;
  }
}

TEST_CASE("rate solvers refuse large alphabets") {
  const Dist u5 = Dist::uniform(5), u4 = Dist::uniform(4);
  CHECK_THROWS_AS(rate_f({u5, u5, CostMatrix::hamming(5), 0.1}), SizeGuardError);
  CHECK_THROWS_AS(rate_g({u4, u4, CostMatrix::hamming(4), 0.9}), SizeGuardError);
}
