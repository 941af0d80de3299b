#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "strassen/measures.hpp"
#include "strassen/parallel.hpp"

namespace strassen {

/// Finite nonnegative cost table c(x, y).
class CostMatrix {
 public:
  explicit CostMatrix(Table values);
  /// c(x, y) = 1{x != y} on a rows × cols grid.
  static CostMatrix hamming(std::size_t rows, std::size_t cols);
  static CostMatrix hamming(std::size_t k) { return hamming(k, k); }

  std::size_t rows() const { return values_.rows(); }
  std::size_t cols() const { return values_.cols(); }
  double operator()(std::size_t x, std::size_t y) const { return values_(x, y); }
  const Table& values() const { return values_; }
  double max() const { return values_.max(); }
  double min() const { return values_.min(); }
  CostMatrix transposed() const { return CostMatrix(values_.transposed()); }

  bool operator==(const CostMatrix&) const = default;

 private:
  Table values_;
};

/// Admissibility of a cell for the excess-cost problem: cost ≤ α, with ties
/// (up to 1e-12) resolved toward admissible.
inline bool admissible(double cost, double alpha) { return cost <= alpha + 1e-12; }

struct TransportPlan {
  JointDist plan;
  double objective = 0.0;
};

/// Cells carrying positive mass in at least one optimal coupling.
class SupportSet {
 public:
  SupportSet(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), mask_(rows * cols, false) {}
  static SupportSet all(std::size_t rows, std::size_t cols);

  void insert(std::size_t x, std::size_t y) { mask_[x * cols_ + y] = true; }
  bool contains(std::size_t x, std::size_t y) const { return mask_[x * cols_ + y]; }
  std::vector<std::pair<std::size_t, std::size_t>> cells() const;
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const;

  bool operator==(const SupportSet&) const = default;

 private:
  std::size_t rows_, cols_;
  std::vector<bool> mask_;
};

/// Monge-Kantorovich optimum min E c(X,Y) over couplings, solved as a
/// balanced transportation problem by min-cost flow.
TransportPlan ot_cost(const Dist& p_x, const Dist& p_y, const CostMatrix& c);

/// Raw-mass variant returning only the optimal value. Uses the closed form
/// when both alphabets are binary.
double ot_value(std::span<const double> p_x, std::span<const double> p_y, const CostMatrix& c);

/// Closed form for 2×2 problems: the coupling polytope is a segment, so the
/// linear objective is minimized at one of its two endpoints.
double ot_value_2x2(double px0, double py0, const CostMatrix& c);

struct EcpSolution {
  Table plan;            ///< optimal coupling (max-flow + completion)
  double value = 0.0;    ///< G_α = 1 − maxflow
  double matched = 0.0;  ///< maxflow = 1 − G_α
  std::vector<std::size_t> witness;  ///< x-side of a minimum cut
};

/// Strassen's optimal excess-cost probability min_π π{c > α} via max-flow on
/// the admissible bipartite graph {c ≤ α}.
EcpSolution ecp(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha);

/// Same on raw masses and an arbitrary cost table (the outer problem over
/// type lattices).
EcpSolution ecp_masses(std::span<const double> p_x, std::span<const double> p_y, const Table& cost,
                       double alpha);

/// Exact integral mode: marginals given as integer numerators over a common
/// denominator. Returns the numerator of G_α.
std::int64_t ecp_integral(std::span<const std::int64_t> p_x, std::span<const std::int64_t> p_y,
                          const CostMatrix& c, double alpha);

struct DualWitness {
  double value = 0.0;
  std::vector<std::size_t> set;
};

/// max_E p_x(E) − p_y(Γ_{c≤α}(E)) by enumerating all 2^|X| subsets.
DualWitness ecp_dual_bruteforce(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha);

inline constexpr std::size_t kMaxBruteforceAlphabet = 20;

/// Γ_{c≤α}(A) = ∪_{x∈A} {y : c(x,y) ≤ α}, sorted.
std::vector<std::size_t> gamma_enlarge(std::span<const std::size_t> a_set, const CostMatrix& c, double alpha);

struct KantorovichCertificate {
  std::vector<double> f;
  std::vector<double> g;
  double gap = 0.0;  ///< objective(plan) − (⟨p_x,f⟩ + ⟨p_y,g⟩)
};

/// Optimal dual potentials (f, g) with f(x) + g(y) ≤ c(x,y), and the
/// duality gap of `plan` against them.
KantorovichCertificate kantorovich_certificate(const Dist& p_x, const Dist& p_y, const CostMatrix& c,
                                               const TransportPlan& plan);

/// Dual potentials certifying an optimal plan, from shortest paths in the
/// plan's residual graph.
std::pair<std::vector<double>, std::vector<double>> dual_potentials(const Table& plan, const CostMatrix& c);

/// Union of supports over all optimal couplings. Each cell's maximal mass
/// over the optimal face is found by a feasibility max-flow on the tight
/// cells of an optimal dual; cells whose maximum exceeds `tol` are kept.
SupportSet optimal_support(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double tol = 1e-9,
                           Exec exec = Exec::parallel);

}  // namespace strassen
