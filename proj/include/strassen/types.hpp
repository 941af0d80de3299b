#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "strassen/measures.hpp"

namespace strassen {

/// Empirical type of a length-n sequence: symbol counts summing to n.
struct TypeVector {
  std::vector<int> counts;
  int n = 0;

  std::vector<double> induced() const;
  bool operator==(const TypeVector&) const = default;
};

inline constexpr double kMaxLatticeSize = 1e7;

/// C(n+k−1, k−1) as a double (exact below 2^53).
double lattice_size(int n, int k);

/// All compositions of n into k nonnegative parts in lexicographic order.
std::vector<TypeVector> enum_types(int n, int k);

/// log multinomial(n; counts) + Σ counts(x) log p(x); −∞ when a positive
/// count meets p(x) = 0.
double type_log_prob(const TypeVector& t, std::span<const double> p);
double type_log_prob(const TypeVector& t, const Dist& p);

/// Law of the empirical type of n i.i.d. draws, in log space.
class TypeMeasure {
 public:
  TypeMeasure(std::vector<TypeVector> lattice, std::vector<double> logmass);
  static TypeMeasure of(const Dist& p, int n);

  std::size_t size() const { return lattice_.size(); }
  int n() const { return lattice_.empty() ? 0 : lattice_.front().n; }
  const std::vector<TypeVector>& lattice() const { return lattice_; }
  const std::vector<double>& logmass() const { return logmass_; }
  std::vector<double> mass() const;

 private:
  std::vector<TypeVector> lattice_;
  std::vector<double> logmass_;
};

double log_add_exp(double a, double b);

}  // namespace strassen
