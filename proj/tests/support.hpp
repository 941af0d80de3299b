#pragma once

// Random instance generators shared by the unit and acceptance tests.

#include <random>
#include <vector>

#include "strassen/measures.hpp"
#include "strassen/transport.hpp"

namespace strassen::testing {

inline Dist random_dist(std::mt19937_64& rng, std::size_t k, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> m(k);
  double s = 0.0;
  for (auto& v : m) {
    v = u(rng) < zero_prob ? 0.0 : u(rng) + 1e-3;
    s += v;
  }
  if (s == 0.0) {
    m[0] = 1.0;
    s = 1.0;
  }
  for (auto& v : m) v /= s;
  // Renormalize so the sum is one to the last bit where possible.
  double t = 0.0;
  for (std::size_t i = 1; i < k; ++i) t += m[i];
  m[0] = std::max(0.0, 1.0 - t);
  return Dist(m);
}

inline CostMatrix random_cost(std::mt19937_64& rng, std::size_t rows, std::size_t cols, bool integer_grid = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Table t(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t(i, j) = integer_grid ? std::floor(u(rng) * 5.0) / 4.0 : u(rng);
  return CostMatrix(t);
}

inline std::size_t random_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Zero-sum vector with entries of order one.
inline SignedVec random_signed(std::mt19937_64& rng, std::size_t k) {
  std::normal_distribution<double> g;
  std::vector<double> v(k);
  double s = 0.0;
  for (auto& x : v) s += (x = g(rng));
  for (auto& x : v) x -= s / static_cast<double>(k);
  double t = 0.0;
  for (std::size_t i = 1; i < k; ++i) t += v[i];
  v[0] = -t;
  return SignedVec(v);
}

}  // namespace strassen::testing
