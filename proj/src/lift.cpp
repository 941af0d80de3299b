#include <algorithm>
#include <cmath>

#include "strassen/finite_n.hpp"
#include "strassen/flow.hpp"

namespace strassen {

namespace {

// Min-cost completion of residual counts, skipping cells before `from`.
bool complete_at_cost(const std::vector<int>& rx, const std::vector<int>& cy, const CostMatrix& c,
                      std::size_t from, double& cost) {
  const std::size_t kx = rx.size(), ky = cy.size();
  const std::size_t s = kx + ky, t = s + 1;
  MinCostFlow<std::int64_t> mcf(kx + ky + 2);
  std::int64_t total = 0;
  for (std::size_t x = 0; x < kx; ++x) {
    mcf.add_edge(s, x, rx[x], 0.0);
    total += rx[x];
  }
  for (std::size_t y = 0; y < ky; ++y) mcf.add_edge(kx + y, t, cy[y], 0.0);
  for (std::size_t cell = from; cell < kx * ky; ++cell)
    mcf.add_edge(cell / ky, kx + cell % ky, total, c(cell / ky, cell % ky));
  const auto res = mcf.run(s, t, total);
  cost = res.cost;
  return res.flow == total;
}

}  // namespace

std::vector<int> optimal_joint_type(const TypeVector& tx, const TypeVector& ty, const CostMatrix& c) {
  if (tx.n != ty.n) throw ValidationError("types of different lengths");
  const std::size_t kx = tx.counts.size(), ky = ty.counts.size();
  if (c.rows() != kx || c.cols() != ky) throw ValidationError("cost matrix and types differ in dimension");
  std::vector<int> rx = tx.counts, cy = ty.counts;
  double optimum = 0.0;
  complete_at_cost(rx, cy, c, 0, optimum);
  const double tol = 1e-9 * std::max(1, tx.n);

  // Fix cells in row-major order to their smallest value on the optimal face.
  std::vector<int> joint(kx * ky, 0);
  double fixed = 0.0;
  for (std::size_t cell = 0; cell < kx * ky; ++cell) {
    const std::size_t x = cell / ky, y = cell % ky;
    const int top = std::min(rx[x], cy[y]);
    int v = top;
    for (int cand = 0; cand < top; ++cand) {
      rx[x] -= cand;
      cy[y] -= cand;
      double rest = 0.0;
      const bool ok = complete_at_cost(rx, cy, c, cell + 1, rest);
      rx[x] += cand;
      cy[y] += cand;
      if (ok && fixed + cand * c(x, y) + rest <= optimum + tol) {
        v = cand;
        break;
      }
    }
    joint[cell] = v;
    rx[x] -= v;
    cy[y] -= v;
    fixed += v * c(x, y);
  }
  return joint;
}

LiftedCoupling::LiftedCoupling(const Table& pi, const NestedInstance& inst) : pi_(pi), inst_(&inst) {
  const std::size_t m = inst.mu().size(), k = inst.nu().size();
  if (pi.rows() != m || pi.cols() != k) throw ValidationError("coupling does not match the type lattices");
  const auto rs = pi.row_sums(), cs = pi.col_sums();
  const auto mu = inst.mu().mass(), nu = inst.nu().mass();
  for (std::size_t i = 0; i < m; ++i)
    if (std::abs(rs[i] - mu[i]) > 1e-9) throw ValidationError("coupling row marginal differs from the type law");
  for (std::size_t j = 0; j < k; ++j)
    if (std::abs(cs[j] - nu[j]) > 1e-9) throw ValidationError("coupling column marginal differs from the type law");
  joint_.resize(m * k);
  weights_.assign(pi.data().begin(), pi.data().end());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (pi(i, j) > 0.0)
        joint_[i * k + j] = optimal_joint_type(inst.mu().lattice()[i], inst.nu().lattice()[j], inst.cost());
}

const std::vector<int>& LiftedCoupling::joint_type(std::size_t i, std::size_t j) const {
  return joint_.at(i * inst_->nu().size() + j);
}

LiftedCoupling::Draw LiftedCoupling::sample(std::mt19937_64& rng) const {
  std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
  const auto& joint = joint_[pick(rng)];
  const std::size_t ky = inst_->cost().cols();
  std::vector<std::size_t> cells;
  for (std::size_t cell = 0; cell < joint.size(); ++cell) cells.insert(cells.end(), joint[cell], cell);
  std::shuffle(cells.begin(), cells.end(), rng);
  Draw d;
  for (std::size_t cell : cells) {
    d.x.push_back(cell / ky);
    d.y.push_back(cell % ky);
  }
  return d;
}

Table LiftedCoupling::exact_law() const {
  const std::size_t kx = inst_->cost().rows(), ky = inst_->cost().cols();
  const int n = inst_->n();
  const double rows = std::pow(static_cast<double>(kx), n), cols = std::pow(static_cast<double>(ky), n);
  if (rows * cols > kMaxProductSpace) throw SizeGuardError("product space exceeds the 1e6 guard");
  Table law(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (std::size_t flat = 0; flat < joint_.size(); ++flat) {
    if (weights_[flat] <= 0.0) continue;
    std::vector<std::size_t> cells;
    for (std::size_t cell = 0; cell < joint_[flat].size(); ++cell)
      cells.insert(cells.end(), joint_[flat][cell], cell);
    std::vector<std::pair<std::size_t, std::size_t>> hits;
    do {
      std::size_t a = 0, b = 0;
      for (std::size_t cell : cells) {
        a = a * kx + cell / ky;
        b = b * ky + cell % ky;
      }
      hits.emplace_back(a, b);
    } while (std::next_permutation(cells.begin(), cells.end()));
    const double share = weights_[flat] / static_cast<double>(hits.size());
    for (auto [a, b] : hits) law(a, b) += share;
  }
  return law;
}

double LiftedCoupling::excess_probability(double alpha) const {
  double p = 0.0;
  for (std::size_t i = 0; i < pi_.rows(); ++i)
    for (std::size_t j = 0; j < pi_.cols(); ++j)
      if (!admissible(inst_->inner_cost()(i, j), alpha)) p += pi_(i, j);
  return p;
}

Table splitting_coupling(const TypeMeasure& mu, const TypeMeasure& nu, const std::vector<std::size_t>& a_set,
                         const std::vector<std::size_t>& b_set) {
  const auto m = mu.mass(), v = nu.mass();
  std::vector<double> ma(m.size(), 0.0), vb(v.size(), 0.0);
  for (std::size_t i : a_set) {
    if (i >= m.size()) throw ValidationError("index outside the lattice");
    ma[i] = m[i];
  }
  for (std::size_t j : b_set) {
    if (j >= v.size()) throw ValidationError("index outside the lattice");
    vb[j] = v[j];
  }
  double mass_a = 0.0, mass_b = 0.0;
  for (double x : ma) mass_a += x;
  for (double x : vb) mass_b += x;
  const double p = std::min(mass_a, mass_b);

  Table pi(m.size(), v.size());
  if (p <= 0.0) {
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) pi(i, j) = m[i] * v[j];
    return pi;
  }
  // Leftover laws (μ − p μ|A)/(1−p), (ν − p ν|B)/(1−p).
  std::vector<double> rest_m(m.size()), rest_v(v.size());
  for (std::size_t i = 0; i < m.size(); ++i) rest_m[i] = std::max(0.0, m[i] - p * ma[i] / mass_a);
  for (std::size_t j = 0; j < v.size(); ++j) rest_v[j] = std::max(0.0, v[j] - p * vb[j] / mass_b);
  double left = 0.0;
  for (double x : rest_m) left += x;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) {
      double cell = p * (ma[i] / mass_a) * (vb[j] / mass_b);
      if (left > 1e-12) cell += rest_m[i] * rest_v[j] / left;
      pi(i, j) = cell;
    }
  return pi;
}

}  // namespace strassen
