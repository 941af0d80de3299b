#include "strassen/types.hpp"

#include <cmath>
#include <string>

namespace strassen {

std::vector<double> TypeVector::induced() const {
  std::vector<double> d(counts.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<double>(counts[i]) / n;
  return d;
}

double lattice_size(int n, int k) {
  if (n < 1 || k < 1) throw ValidationError("type lattice needs n >= 1 and k >= 1");
  return std::round(std::exp(std::lgamma(n + k) - std::lgamma(k) - std::lgamma(n + 1)));
}

std::vector<TypeVector> enum_types(int n, int k) {
  const double size = lattice_size(n, k);
  if (size > kMaxLatticeSize)
    throw SizeGuardError("type lattice of size " + std::to_string(size) + " exceeds the 1e7 guard");
  std::vector<TypeVector> out;
  out.reserve(static_cast<std::size_t>(size));
  std::vector<int> cur(k, 0);
  // Odometer over the first k−1 parts; the last absorbs the remainder.
  auto emit = [&](auto&& self, int pos, int left) -> void {
    if (pos == k - 1) {
      cur[pos] = left;
      out.push_back({cur, n});
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  emit(emit, 0, n);
  return out;
}

double type_log_prob(const TypeVector& t, std::span<const double> p) {
  if (t.counts.size() != p.size()) throw ValidationError("type and distribution differ in alphabet size");
  double lp = std::lgamma(t.n + 1.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    const int k = t.counts[x];
    if (k == 0) continue;
    if (p[x] <= 0.0) return -kInf;
    lp += k * std::log(p[x]) - std::lgamma(k + 1.0);
  }
  return lp;
}

double type_log_prob(const TypeVector& t, const Dist& p) { return type_log_prob(t, p.mass()); }

TypeMeasure::TypeMeasure(std::vector<TypeVector> lattice, std::vector<double> logmass)
    : lattice_(std::move(lattice)), logmass_(std::move(logmass)) {
  if (lattice_.size() != logmass_.size()) throw ValidationError("lattice and log-mass differ in length");
  double total = -kInf;
  for (double l : logmass_) total = log_add_exp(total, l);
  if (std::abs(std::exp(total) - 1.0) > 1e-9) throw ValidationError("type measure does not sum to 1");
}

TypeMeasure TypeMeasure::of(const Dist& p, int n) {
  auto lattice = enum_types(n, static_cast<int>(p.size()));
  std::vector<double> lm(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) lm[i] = type_log_prob(lattice[i], p);
  return TypeMeasure(std::move(lattice), std::move(lm));
}

std::vector<double> TypeMeasure::mass() const {
  std::vector<double> m(logmass_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::exp(logmass_[i]);
  return m;
}

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

}  // namespace strassen
