#pragma once

// Internal: log-barrier interior-point method for small smooth convex
// programs, and a Nelder-Mead polisher. Not part of the public headers
// because it exposes Eigen types.

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace strassen::detail {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Smooth convex inequality g(z) ≤ 0. `derivs` adds ∇g and ∇²g into the
/// supplied (zeroed) buffers.
struct Constraint {
  std::function<double(const Vec&)> value;
  std::function<void(const Vec&, Vec&, Mat&)> derivs;
};

/// min ⟨w, z⟩ s.t. A z = b, z_j > 0 for flagged j, g_i(z) ≤ 0.
struct BarrierProblem {
  Vec objective;
  Mat eq_a;
  Vec eq_b;
  std::vector<bool> nonneg;
  std::vector<Constraint> constraints;
};

struct BarrierResult {
  Vec z;
  double value = 0.0;
  bool converged = false;
};

/// `start` must be strictly feasible for the inequalities and satisfy the
/// equalities. Terminates when the barrier duality gap m/t < gap_tol.
BarrierResult solve_barrier(const BarrierProblem& p, Vec start, double gap_tol = 1e-11);

/// Linear marginal m_k = Σ_{i : target[i] = k} z[var[i]].
struct MarginalMap {
  std::vector<std::size_t> var;
  std::vector<std::size_t> target;
  std::size_t size = 0;

  Vec apply(const Vec& z) const;
  /// Row (by_col = false) or column marginal of a dense row-major grid whose
  /// cells start at variable `offset`.
  static MarginalMap grid(std::size_t rows, std::size_t cols, bool by_col, std::size_t offset = 0);
};

/// Σ_k m_k log(m_k/p_k) − r ≤ 0.
Constraint marginal_kl(MarginalMap map, std::vector<double> p, double r);

/// ½ Σ_k m_k²/p_k − r ≤ 0, or ½ Σ_k m_k²/p_k − z[slack] ≤ 0 when `slack`
/// names a variable.
Constraint marginal_chi2(MarginalMap map, std::vector<double> p, double r, int slack = -1);

/// Orthonormal basis of the zero-sum subspace of R^k (Helmert), as columns.
Mat helmert(std::size_t k);

/// Unit vectors covering S^{dim−1}: ±1 for dim 1, `circle` angles for dim 2,
/// a Fibonacci lattice of `sphere` points for dim 3, and `scatter` seeded
/// Gaussian draws beyond.
std::vector<Vec> direction_samples(int dim, int circle, int sphere, int scatter);

/// Minimizes f from x0 with an initial simplex of edge `step`.
Vec nelder_mead(const std::function<double(const Vec&)>& f, Vec x0, double step, int max_iter = 400,
                double ftol = 1e-13);

}  // namespace strassen::detail
