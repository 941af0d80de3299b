#include "strassen/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace strassen {

Table Table::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Table t(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != t.cols()) throw ValidationError("ragged matrix rows");
    for (std::size_t c = 0; c < t.cols(); ++c) t(r, c) = rows[r][c];
  }
  return t;
}

std::vector<double> Table::row_sums() const {
  std::vector<double> s(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) s[r] += (*this)(r, c);
  return s;
}

std::vector<double> Table::col_sums() const {
  std::vector<double> s(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) s[c] += (*this)(r, c);
  return s;
}

double Table::total() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

double Table::max() const {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

double Table::min() const {
  return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

Table Table::transposed() const {
  Table t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::vector<std::vector<double>> Table::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r].assign(row(r).begin(), row(r).end());
  return out;
}

namespace {

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return labels;
}

void check_pmf(std::span<const double> mass) {
  if (mass.empty()) throw ValidationError("distribution over an empty alphabet");
  double total = 0.0;
  for (double m : mass) {
    if (!std::isfinite(m) || m < 0.0) throw ValidationError("distribution mass must be finite and >= 0");
    total += m;
  }
  if (std::abs(total - 1.0) > kMassTol)
    throw ValidationError("distribution mass sums to " + std::to_string(total) + ", expected 1");
}

}  // namespace

Dist::Dist(std::vector<std::string> labels, std::vector<double> mass)
    : labels_(std::move(labels)), mass_(std::move(mass)) {
  if (labels_.size() != mass_.size()) throw ValidationError("labels and mass differ in length");
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size())
    throw ValidationError("distribution labels must be unique");
  check_pmf(mass_);
}

Dist::Dist(std::vector<double> mass) : Dist(default_labels(mass.size()), std::vector<double>(mass)) {}

Dist Dist::bernoulli(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("Bernoulli parameter outside [0,1]");
  return Dist({"1", "0"}, {a, 1.0 - a});
}

Dist Dist::point_mass(std::size_t size, std::size_t at) {
  if (at >= size) throw ValidationError("point mass index out of range");
  std::vector<double> m(size, 0.0);
  m[at] = 1.0;
  return Dist(std::move(m));
}

Dist Dist::uniform(std::size_t size) {
  if (size == 0) throw ValidationError("uniform distribution over an empty alphabet");
  return Dist(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

SignedVec::SignedVec(std::vector<double> mass) : mass_(std::move(mass)) {
  double sum = 0.0;
  double scale = 1.0;
  for (double m : mass_) {
    if (!std::isfinite(m)) throw ValidationError("signed vector entries must be finite");
    sum += m;
    scale = std::max(scale, std::abs(m));
  }
  // Relative to the largest coordinate so rescaled differences keep validating.
  if (std::abs(sum) > kMassTol * scale * static_cast<double>(std::max<std::size_t>(mass_.size(), 1)))
    throw ValidationError("signed vector must sum to zero");
}

SignedVec SignedVec::difference(const Dist& q, const Dist& p, double scale) {
  if (q.size() != p.size()) throw ValidationError("alphabet mismatch");
  if (!(scale > 0.0)) throw ValidationError("difference scale must be positive");
  std::vector<double> d(q.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (q[i] - p[i]) / scale;
  return SignedVec(std::move(d));
}

SignedVec SignedVec::scaled(double t) const {
  std::vector<double> d(mass_);
  for (double& v : d) v *= t;
  return SignedVec(std::move(d));
}

double SignedVec::sup_norm() const {
  double m = 0.0;
  for (double v : mass_) m = std::max(m, std::abs(v));
  return m;
}

SignedVec operator+(const SignedVec& a, const SignedVec& b) {
  if (a.size() != b.size()) throw ValidationError("alphabet mismatch");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] + b[i];
  return SignedVec(std::move(d));
}

SignedVec operator-(const SignedVec& a, const SignedVec& b) { return a + b.scaled(-1.0); }

JointDist::JointDist(Table matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0) throw ValidationError("empty joint distribution");
  check_pmf(matrix_.data());
}

JointDist JointDist::product(const Dist& p, const Dist& q) {
  Table t(p.size(), q.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) t(i, j) = p[i] * q[j];
  return JointDist(std::move(t));
}

void RateCurve::push(double param, double value) {
  if (!params.empty() && !(param > params.back())) throw ValidationError("curve parameters must increase");
  params.push_back(param);
  values.push_back(value);
}

double kl(std::span<const double> q, std::span<const double> p) {
  if (q.size() != p.size()) throw ValidationError("alphabet mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;
    if (p[i] <= 0.0) return kInf;
    d += q[i] * std::log(q[i] / p[i]);
  }
  return std::max(d, 0.0);
}

double kl(const Dist& q, const Dist& p) {
  if (!q.same_alphabet(p)) throw ValidationError("alphabet mismatch");
  return kl(q.mass(), p.mass());
}

double tv(const Dist& p, const Dist& q) {
  if (!q.same_alphabet(p)) throw ValidationError("alphabet mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double tv(const JointDist& p, const JointDist& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) throw ValidationError("dimension mismatch");
  double s = 0.0;
  auto a = p.matrix().data();
  auto b = q.matrix().data();
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

double chi2_half(std::span<const double> beta, std::span<const double> p) {
  if (beta.size() != p.size()) throw ValidationError("alphabet mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (beta[i] == 0.0) continue;
    if (p[i] <= 0.0) return kInf;
    s += beta[i] * beta[i] / p[i];
  }
  return 0.5 * s;
}

double chi2_half(const SignedVec& beta, const Dist& p) { return chi2_half(beta.mass(), p.mass()); }

Table maximal_coupling(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ValidationError("alphabet mismatch");
  const std::size_t k = p.size();
  Table t(k, k);
  std::vector<double> excess_p(k), excess_q(k);
  double overlap_gap = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    t(i, i) = std::min(p[i], q[i]);
    excess_p[i] = std::max(p[i] - q[i], 0.0);
    excess_q[i] = std::max(q[i] - p[i], 0.0);
    overlap_gap += excess_p[i];
  }
  if (overlap_gap > 0.0) {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) t(i, j) += excess_p[i] * excess_q[j] / overlap_gap;
  }
  return t;
}

JointDist coupling_transfer(const JointDist& q_xy, const Dist& p_x, const Dist& p_y) {
  if (q_xy.rows() != p_x.size() || q_xy.cols() != p_y.size())
    throw ValidationError("coupling and target marginals differ in dimension");
  const auto qx = q_xy.row_marginal();
  const auto qy = q_xy.col_marginal();
  // kx(x', x) couples p_x (rows) with Q_X (cols); likewise ky.
  const Table kx = maximal_coupling(p_x.mass(), qx);
  const Table ky = maximal_coupling(p_y.mass(), qy);

  const std::size_t nx = p_x.size(), ny = p_y.size();
  Table out(nx, ny);
  for (std::size_t x = 0; x < nx; ++x) {
    if (qx[x] <= 0.0) continue;
    for (std::size_t y = 0; y < ny; ++y) {
      const double m = q_xy(x, y);
      if (m <= 0.0) continue;
      for (std::size_t xp = 0; xp < nx; ++xp) {
        const double cx = kx(xp, x) / qx[x];
        if (cx <= 0.0) continue;
        for (std::size_t yp = 0; yp < ny; ++yp) out(xp, yp) += cx * m * ky(yp, y) / qy[y];
      }
    }
  }
  // Renormalize away rounding drift so the result validates as a pmf.
  const double total = out.total();
  for (double& v : out.data()) v /= total;
  return JointDist(std::move(out));
}

}  // namespace strassen
