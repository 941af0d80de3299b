#pragma once

#include <span>
#include <vector>

#include "strassen/measures.hpp"
#include "strassen/parallel.hpp"
#include "strassen/transport.hpp"

namespace strassen {

/// Signed coupling β_XY with row sums β_X and column sums β_Y.
class SignedMatrix {
 public:
  explicit SignedMatrix(Table values) : values_(std::move(values)) {}
  const Table& values() const { return values_; }
  double operator()(std::size_t x, std::size_t y) const { return values_(x, y); }
  std::vector<double> row_sums() const { return values_.row_sums(); }
  std::vector<double> col_sums() const { return values_.col_sums(); }
  /// Every cell below −tol lies in s.
  bool negative_within(const SupportSet& s, double tol = 1e-12) const;

 private:
  Table values_;
};

/// Precomputed data for θ on a fixed (S, c): dual potentials that are tight
/// on S and strictly slack off S, and a spanning forest of S.
class ThetaModel {
 public:
  ThetaModel(SupportSet s, CostMatrix c);

  const SupportSet& support() const { return s_; }
  const CostMatrix& cost() const { return c_; }
  const std::vector<double>& f() const { return f_; }
  const std::vector<double>& g() const { return g_; }
  /// c − f − g off S (≥ margin), 0 on S.
  double reduced(std::size_t x, std::size_t y) const { return reduced_(x, y); }
  /// Smallest reduced cost off S.
  double margin() const { return margin_; }
  bool in_forest(std::size_t x, std::size_t y) const { return forest_.contains(x, y); }
  /// False when S admits no tight dual (not a union of optimal supports).
  bool consistent() const { return consistent_; }

 private:
  SupportSet s_;
  CostMatrix c_;
  std::vector<double> f_, g_;
  Table reduced_;
  SupportSet forest_;
  double margin_ = 0.0;
  bool consistent_ = true;
};

/// min Σ β_XY c over signed couplings of (β_X, β_Y) that are nonnegative
/// off S. `plan` receives an optimal β_XY when non-null.
double theta(const ThetaModel& model, std::span<const double> beta_x, std::span<const double> beta_y,
             Table* plan = nullptr);
double theta(const SignedVec& beta_x, const SignedVec& beta_y, const SupportSet& s, const CostMatrix& c);

/// sup of θ over the product of zero-sum unit ∞-balls, attained at a vertex.
double theta_lipschitz_constant(const ThetaModel& model);

struct MdpOptions {
  int circle = 720;     ///< samples on a 2-d tangent circle
  int sphere = 2000;    ///< Fibonacci samples on a 3-d tangent sphere
  int scatter = 20000;  ///< pseudo-random samples in higher dimension
  Exec exec = Exec::parallel;
};

inline constexpr std::size_t kMaxMdpAlphabet = 4;

/// Moderate-deviation lower-tail rate at Δ < 0.
double mdp_rate_lower(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double delta,
                      const MdpOptions& opt = {});

/// Moderate-deviation upper-tail rate at Δ > 0: min of both orientations.
double mdp_rate_upper(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double delta,
                      const MdpOptions& opt = {});
double mdp_rate_upper_oriented(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double delta,
                               const MdpOptions& opt = {});

/// min θ(u, v) over v with ½Σ v²/P_Y ≤ ½Σ u²/P_X.
double theta_min_given_x(const ThetaModel& model, const Dist& p_x, const Dist& p_y, std::span<const double> u);

struct SetaCheck {
  double lhs = 0.0;  ///< (E(Q_X,Q_Y) − E(P_X,P_Y)) / a
  double rhs = 0.0;  ///< θ((Q_X−P_X)/a, (Q_Y−P_Y)/a)
  bool holds = false;
};

SetaCheck seta_check(const Dist& p_x, const Dist& p_y, const CostMatrix& c, const Dist& q_x, const Dist& q_y,
                     double a);

/// (E(P + a β) − E(P)) / a − θ(β) for each a.
std::vector<double> seta_gaps(const Dist& p_x, const Dist& p_y, const CostMatrix& c, const SignedVec& beta_x,
                              const SignedVec& beta_y, const std::vector<double>& a_list);

}  // namespace strassen
