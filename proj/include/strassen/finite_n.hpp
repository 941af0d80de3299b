#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "strassen/measures.hpp"
#include "strassen/parallel.hpp"
#include "strassen/transport.hpp"
#include "strassen/types.hpp"

namespace strassen {

/// Outer Strassen problem between the laws of the two empirical types, with
/// inner cost E(T_X, T_Y).
class NestedInstance {
 public:
  NestedInstance(const Dist& p_x, const Dist& p_y, const CostMatrix& c, int n, Exec exec = Exec::parallel);

  const TypeMeasure& mu() const { return mu_; }
  const TypeMeasure& nu() const { return nu_; }
  const Table& inner_cost() const { return *inner_; }
  const CostMatrix& cost() const { return cost_; }
  int n() const { return mu_.n(); }

 private:
  TypeMeasure mu_, nu_;
  CostMatrix cost_;
  std::shared_ptr<const Table> inner_;
};

/// Inner cost table E(T_X, T_Y) over the two lattices, cached per (n, c).
std::shared_ptr<const Table> inner_cost_table(const std::vector<TypeVector>& tx, const std::vector<TypeVector>& ty,
                                              const CostMatrix& c, Exec exec = Exec::parallel);
void clear_inner_cost_cache();

/// OT over empirical couplings of two types: integer min-cost flow on the
/// counts, divided by n.
double empirical_ot_cost(const TypeVector& tx, const TypeVector& ty, const CostMatrix& c);

struct GnValue {
  double value = 0.0;       ///< G_α(P_X^n, P_Y^n)
  double complement = 1.0;  ///< 1 − G_α, computed without cancellation
};

/// Exact G_α(P_X^n, P_Y^n) through the nested formula.
GnValue exact_gn_full(const NestedInstance& inst, double alpha);
GnValue exact_gn_full(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha, int n);
double exact_gn(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha, int n);

/// Outer problem on the implicit band graph when every row's admissible
/// columns form a nonempty interval with nondecreasing endpoints. Returns
/// false when the structure does not apply.
bool banded_gn(const TypeMeasure& mu, const TypeMeasure& nu, const Table& inner, double alpha, GnValue& out);

inline constexpr double kMaxProductSpace = 1e6;

/// min P{c_n(X^n, Y^n) > α} solved directly on X^n × Y^n.
double direct_gn_oracle(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha, int n);

/// Sampler realizing a coupling of the type laws as a coupling of
/// P_X^n and P_Y^n: draw a type pair from π, then a uniform element of the
/// joint type class of the lexicographically smallest optimal joint type.
class LiftedCoupling {
 public:
  LiftedCoupling(const Table& pi, const NestedInstance& inst);

  struct Draw {
    std::vector<std::size_t> x, y;
  };
  Draw sample(std::mt19937_64& rng) const;

  /// Exact law over (x^n, y^n), indexed by the base-|X| / base-|Y| codes of
  /// the sequences. Small n only.
  Table exact_law() const;

  /// Optimal integer joint type for a type pair (counts, row-major).
  const std::vector<int>& joint_type(std::size_t i, std::size_t j) const;
  /// π{E(T_X, T_Y) > α}.
  double excess_probability(double alpha) const;

 private:
  Table pi_;
  const NestedInstance* inst_;
  std::vector<std::vector<int>> joint_;  // per flattened (i, j), empty when π = 0
  std::vector<double> weights_;
};

/// Lexicographically smallest optimal integer coupling of two types.
std::vector<int> optimal_joint_type(const TypeVector& tx, const TypeVector& ty, const CostMatrix& c);

/// π = (1−p) μ′⊗ν′ + p μ|A ⊗ ν|B with p = min(μ(A), ν(B)).
Table splitting_coupling(const TypeMeasure& mu, const TypeMeasure& nu, const std::vector<std::size_t>& a_set,
                         const std::vector<std::size_t>& b_set);

enum class Tail { lower, upper };

struct SeriesRow {
  int n = 0;
  double alpha = 0.0;
  double g = 0.0;
  double complement = 0.0;
  double exponent = 0.0;
};

/// e_n = −(1/n) log(1 − G) (lower) or −(1/n) log G (upper), log 0 → +∞.
std::vector<SeriesRow> exponent_series(const Dist& p_x, const Dist& p_y, const CostMatrix& c,
                                       const std::function<double(int)>& alpha_fn, const std::vector<int>& n_list,
                                       Tail mode, Exec exec = Exec::parallel);

RateCurve to_curve(const std::vector<SeriesRow>& rows, std::string meta);

}  // namespace strassen
