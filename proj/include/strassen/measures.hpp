#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace strassen {

/// Extended-real +∞. Used as the value of an infimum over an empty set and
/// of divergences whose absolute-continuity requirement fails.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_plus_inf(double v) { return v == kInf; }

/// Tolerance for probability masses (sums, marginals).
inline constexpr double kMassTol = 1e-12;
/// Tolerance for derived functionals (OT costs, ECP values, LP optima).
inline constexpr double kFuncTol = 1e-9;

/// Malformed input: wrong shapes, masses not summing to one, bad ranges.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A request whose enumeration would exceed a documented size guard.
class SizeGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  static Table from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
  double total() const;
  double max() const;
  double min() const;
  Table transposed() const;
  std::vector<std::vector<double>> to_rows() const;

  bool operator==(const Table&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Finite probability mass function over a labeled alphabet.
class Dist {
 public:
  Dist(std::vector<std::string> labels, std::vector<double> mass);
  /// Labels default to "0", "1", ...
  explicit Dist(std::vector<double> mass);

  /// Bern(a) as mass (a, 1-a) on labels ("1", "0"): index 0 carries the
  /// parameter, matching the layout of the binary examples.
  static Dist bernoulli(double a);
  static Dist point_mass(std::size_t size, std::size_t at);
  static Dist uniform(std::size_t size);

  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }
  const std::vector<double>& mass() const { return mass_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool same_alphabet(const Dist& other) const { return labels_ == other.labels_; }

  bool operator==(const Dist&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> mass_;
};

/// Zero-sum perturbation vector aligned with an alphabet.
class SignedVec {
 public:
  explicit SignedVec(std::vector<double> mass);
  static SignedVec zeros(std::size_t size) { return SignedVec(std::vector<double>(size, 0.0)); }
  /// (q - p) / scale.
  static SignedVec difference(const Dist& q, const Dist& p, double scale = 1.0);

  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }
  const std::vector<double>& mass() const { return mass_; }
  SignedVec scaled(double t) const;
  double sup_norm() const;

 private:
  std::vector<double> mass_;
};

SignedVec operator+(const SignedVec& a, const SignedVec& b);
SignedVec operator-(const SignedVec& a, const SignedVec& b);

/// Nonnegative matrix with total mass one.
class JointDist {
 public:
  explicit JointDist(Table matrix);
  static JointDist product(const Dist& p, const Dist& q);

  std::size_t rows() const { return matrix_.rows(); }
  std::size_t cols() const { return matrix_.cols(); }
  double operator()(std::size_t r, std::size_t c) const { return matrix_(r, c); }
  const Table& matrix() const { return matrix_; }
  std::vector<double> row_marginal() const { return matrix_.row_sums(); }
  std::vector<double> col_marginal() const { return matrix_.col_sums(); }

  bool operator==(const JointDist&) const = default;

 private:
  Table matrix_;
};

/// Sampled map parameter → value. Params strictly increasing.
struct RateCurve {
  std::vector<double> params;
  std::vector<double> values;
  std::string meta;

  void push(double param, double value);
};

/// Kullback-Leibler divergence D(q||p) in nats; +∞ without absolute continuity.
double kl(const Dist& q, const Dist& p);
/// Same, on raw aligned mass vectors.
double kl(std::span<const double> q, std::span<const double> p);

/// Total variation distance ½ Σ|p − q|.
double tv(const Dist& p, const Dist& q);
double tv(const JointDist& p, const JointDist& q);

/// ½ Σ β(x)²/p(x), with 0²/0 = 0 and +∞ when β ≠ 0 meets p = 0.
double chi2_half(const SignedVec& beta, const Dist& p);
double chi2_half(std::span<const double> beta, std::span<const double> p);

/// Maximal coupling of (p, q): diagonal min(p,q), remaining mass spread
/// proportionally over (p−q)⁺ × (q−p)⁺. Achieves P{X ≠ X'} = tv(p, q).
Table maximal_coupling(std::span<const double> p, std::span<const double> q);

/// Moves a coupling of (Q_X, Q_Y) onto target marginals (p_x, p_y) by
/// composing maximal couplings on each side. The result is within
/// tv(p_x,Q_X) + tv(p_y,Q_Y) of q_xy in total variation.
JointDist coupling_transfer(const JointDist& q_xy, const Dist& p_x, const Dist& p_y);

}  // namespace strassen
