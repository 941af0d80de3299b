#include "strassen/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "convex.hpp"

namespace strassen {

using detail::BarrierProblem;
using detail::MarginalMap;
using detail::Mat;
using detail::Vec;

namespace {

constexpr double kStrict = 1e-9;

std::vector<std::size_t> support(std::span<const double> p) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) s.push_back(i);
  return s;
}

std::vector<double> pick(std::span<const double> p, const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  for (std::size_t i : idx) out.push_back(p[i]);
  return out;
}

CostMatrix sub_cost(const CostMatrix& c, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  Table t(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) t(i, j) = c(rows[i], cols[j]);
  return CostMatrix(std::move(t));
}

void check_query(const Dist& p_x, const Dist& p_y, const CostMatrix& c, std::size_t limit) {
  if (c.rows() != p_x.size() || c.cols() != p_y.size())
    throw ValidationError("cost matrix and marginals differ in dimension");
  if (p_x.size() > limit || p_y.size() > limit)
    throw SizeGuardError("rate solver supports alphabets of size <= " + std::to_string(limit));
}

}  // namespace

double kl_bernoulli(double p, double q) {
  const double a[2] = {p, 1.0 - p};
  const double b[2] = {q, 1.0 - q};
  return kl(std::span<const double>(a, 2), std::span<const double>(b, 2));
}

RateResult min_cost_in_kl_balls(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double r) {
  const auto sx = support(p_x.mass()), sy = support(p_y.mass());
  const auto px = pick(p_x.mass(), sx), py = pick(p_y.mass(), sy);
  const CostMatrix cs = sub_cost(c, sx, sy);
  if (r <= 1e-15) return {ot_value(px, py, cs), false};
  const std::size_t nx = sx.size(), ny = sy.size(), d = nx * ny;

  BarrierProblem prob;
  prob.objective = Vec(d);
  Vec start(d);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      prob.objective[i * ny + j] = cs(i, j);
      start[i * ny + j] = px[i] * py[j];
    }
  prob.eq_a = Mat::Ones(1, d);
  prob.eq_b = Vec::Ones(1);
  prob.nonneg.assign(d, true);
  prob.constraints.push_back(detail::marginal_kl(MarginalMap::grid(nx, ny, false), px, r));
  prob.constraints.push_back(detail::marginal_kl(MarginalMap::grid(nx, ny, true), py, r));
  const auto res = detail::solve_barrier(prob, start);
  return {res.value, !res.converged};
}

RateResult min_cost_given_row(std::span<const double> q, const Dist& p_y, const CostMatrix& c, double r) {
  const auto sx = support(q), sy = support(p_y.mass());
  const auto qx = pick(q, sx), py = pick(p_y.mass(), sy);
  const CostMatrix cs = sub_cost(c, sx, sy);
  if (r <= 1e-15) return {ot_value(qx, py, cs), false};
  const std::size_t nx = sx.size(), ny = sy.size(), d = nx * ny;

  BarrierProblem prob;
  prob.objective = Vec(d);
  Vec start(d);
  prob.eq_a = Mat::Zero(nx, d);
  prob.eq_b = Vec(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    prob.eq_b[i] = qx[i];
    for (std::size_t j = 0; j < ny; ++j) {
      prob.objective[i * ny + j] = cs(i, j);
      start[i * ny + j] = qx[i] * py[j];
      prob.eq_a(i, i * ny + j) = 1.0;
    }
  }
  prob.nonneg.assign(d, true);
  prob.constraints.push_back(detail::marginal_kl(MarginalMap::grid(nx, ny, true), py, r));
  const auto res = detail::solve_barrier(prob, start);
  return {res.value, !res.converged};
}

RateResult rate_f_result(const RateQuery& q, const RateOptions&) {
  check_query(q.p_x, q.p_y, q.c, kMaxRateFAlphabet);
  const double e = ot_value(q.p_x.mass(), q.p_y.mass(), q.c);
  if (q.alpha >= e) return {0.0, false};
  const auto sx = support(q.p_x.mass()), sy = support(q.p_y.mass());
  double min_c = kInf, r_hi = 0.0;
  for (std::size_t x : sx) {
    r_hi = std::max(r_hi, -std::log(q.p_x[x]));
    for (std::size_t y : sy) min_c = std::min(min_c, q.c(x, y));
  }
  for (std::size_t y : sy) r_hi = std::max(r_hi, -std::log(q.p_y[y]));
  if (q.alpha < min_c) return {kInf, false};

  RateResult out;
  double lo = 0.0, hi = r_hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto h = min_cost_in_kl_balls(q.p_x, q.p_y, q.c, mid);
    out.stalled |= h.stalled;
    (h.value <= q.alpha ? hi : lo) = mid;
  }
  out.value = hi;
  return out;
}

double rate_f(const RateQuery& q, const RateOptions& opt) { return rate_f_result(q, opt).value; }

double rate_f_binary(double a, double b, double alpha) {
  if (!(0.0 <= a && a <= b && b <= 1.0)) throw ValidationError("binary rate needs 0 <= a <= b <= 1");
  if (alpha >= b - a) return 0.0;
  if (alpha < 0.0) return kInf;
  // D(a'+α‖b) − D(a'‖a) changes sign on [a, b−α].
  auto phi = [&](double ap) { return kl_bernoulli(ap + alpha, b) - kl_bernoulli(ap, a); };
  double lo = a, hi = b - alpha;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) >= 0.0 ? lo : hi) = mid;
  }
  const double root = 0.5 * (lo + hi);
  return std::max(kl_bernoulli(root + alpha, b), kl_bernoulli(root, a));
}

namespace {

// First t along P + t·dir where h crosses α (strictly), as D(Q(t)‖P).
RateResult ray_search(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha, const Vec& dir,
                      int scan) {
  const std::size_t k = p_x.size();
  double t_max = kInf;
  for (std::size_t i = 0; i < k; ++i)
    if (dir[i] < 0.0) t_max = std::min(t_max, p_x[i] / -dir[i]);
  RateResult out{kInf, false};
  if (!std::isfinite(t_max) || t_max <= 0.0) return out;

  std::vector<double> qv(k);
  auto at = [&](double t) {
    for (std::size_t i = 0; i < k; ++i) qv[i] = std::max(0.0, p_x[i] + t * dir[i]);
    if (t == t_max)
      for (std::size_t i = 0; i < k; ++i)
        if (dir[i] < 0.0 && std::abs(p_x[i] / -dir[i] - t_max) <= 1e-15 * t_max) qv[i] = 0.0;
    double s = 0.0;
    for (double v : qv) s += v;
    for (double& v : qv) v /= s;
    return kl(std::span<const double>(qv), p_x.mass());
  };
  auto crosses = [&](double t) {
    const double r = at(t);
    const auto h = min_cost_given_row(qv, p_y, c, r);
    out.stalled |= h.stalled;
    return h.value >= alpha + kStrict;
  };
  double prev = 0.0;
  for (int j = 1; j <= scan; ++j) {
    const double t = t_max * j / scan;
    if (crosses(t)) {
      double lo = prev, hi = t;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (crosses(mid) ? hi : lo) = mid;
      }
      out.value = at(hi);
      return out;
    }
    prev = t;
  }
  return out;
}

}  // namespace

RateResult rate_g_oriented(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha,
                           const RateOptions& opt) {
  check_query(p_x, p_y, c, kMaxRateGAlphabet);
  const double e = ot_value(p_x.mass(), p_y.mass(), c);
  if (alpha <= e) return {0.0, false};
  const auto sx = support(p_x.mass()), sy = support(p_y.mass());
  double max_c = 0.0;
  for (std::size_t x : sx)
    for (std::size_t y : sy) max_c = std::max(max_c, c(x, y));
  if (alpha + kStrict > max_c) return {kInf, false};
  if (sx.size() < 2) return {kInf, false};

  // Directions live in the zero-sum space of the support face.
  const Mat basis = detail::helmert(sx.size());
  auto embed = [&](const Vec& w) {
    const Vec local = basis * w;
    Vec dir = Vec::Zero(static_cast<Eigen::Index>(p_x.size()));
    for (std::size_t i = 0; i < sx.size(); ++i) dir[sx[i]] = local[i];
    return dir;
  };

  if (sx.size() == 2) {
    RateResult best{kInf, false};
    for (double sgn : {1.0, -1.0}) {
      const auto r = ray_search(p_x, p_y, c, alpha, embed(Vec::Constant(1, sgn)), opt.scan);
      best.stalled |= r.stalled;
      best.value = std::min(best.value, r.value);
    }
    return best;
  }

  const int m = std::max(8, opt.directions);
  std::vector<RateResult> vals(m);
  auto ray_at = [&](double ang) {
    Vec w(2);
    w << std::cos(ang), std::sin(ang);
    return ray_search(p_x, p_y, c, alpha, embed(w), opt.scan);
  };
#pragma omp parallel for schedule(dynamic) num_threads(thread_budget()) if (opt.exec == Exec::parallel)
  for (int i = 0; i < m; ++i) vals[i] = ray_at(2.0 * std::numbers::pi * i / m);

  RateResult best{kInf, false};
  int arg = 0;
  for (int i = 0; i < m; ++i) {
    best.stalled |= vals[i].stalled;
    if (vals[i].value < best.value) {
      best.value = vals[i].value;
      arg = i;
    }
  }
  if (!std::isfinite(best.value)) return best;

  // Golden-section polish on the bracketing angular cell.
  const double step = 2.0 * std::numbers::pi / m;
  double lo = step * (arg - 1), hi = step * (arg + 1);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  auto f1 = ray_at(x1), f2 = ray_at(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1.value < f2.value) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = ray_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = ray_at(x2);
    }
    best.stalled |= f1.stalled || f2.stalled;
  }
  best.value = std::min({best.value, f1.value, f2.value});
  return best;
}

RateResult rate_g_result(const RateQuery& q, const RateOptions& opt) {
  check_query(q.p_x, q.p_y, q.c, kMaxRateGAlphabet);
  const auto xy = rate_g_oriented(q.p_x, q.p_y, q.c, q.alpha, opt);
  const auto yx = rate_g_oriented(q.p_y, q.p_x, q.c.transposed(), q.alpha, opt);
  return {std::min(xy.value, yx.value), xy.stalled || yx.stalled};
}

double rate_g(const RateQuery& q, const RateOptions& opt) { return rate_g_result(q, opt).value; }

double rate_g_binary(double a, double b, double alpha) {
  if (!(0.0 <= a && a <= b && b <= 1.0)) throw ValidationError("binary rate needs 0 <= a <= b <= 1");
  if (alpha <= b - a) return 0.0;
  if (alpha > 1.0) return kInf;
  constexpr int kScan = 4000;

  // a*: largest root of D(a'+α‖b) = D(a'‖a) with a' ≤ b−α, feasible where φ ≥ 0.
  double a_branch = kInf;
  const double a_hi = std::min(b - alpha, 1.0 - alpha);
  if (a_hi >= 0.0) {
    auto phi = [&](double ap) { return kl_bernoulli(ap + alpha, b) - kl_bernoulli(ap, a); };
    for (int k = kScan; k >= 0; --k) {
      const double x = a_hi * k / kScan;
      if (phi(x) >= 0.0) {
        double lo = x, hi = k == kScan ? x : a_hi * (k + 1) / kScan;
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
          const double mid = 0.5 * (lo + hi);
          (phi(mid) >= 0.0 ? lo : hi) = mid;
        }
        a_branch = std::max(kl_bernoulli(lo, a), kl_bernoulli(lo + alpha, b));
        break;
      }
    }
  }

  // b*: smallest root of D(b'‖b) = D(b'−α‖a) with b' ≥ a+α, feasible where ψ ≤ 0.
  double b_branch = kInf;
  const double b_lo = a + alpha;
  if (b_lo <= 1.0) {
    auto psi = [&](double bp) { return kl_bernoulli(bp, b) - kl_bernoulli(bp - alpha, a); };
    for (int k = 0; k <= kScan; ++k) {
      const double x = b_lo + (1.0 - b_lo) * k / kScan;
      if (psi(x) <= 0.0) {
        double lo = k == 0 ? x : b_lo + (1.0 - b_lo) * (k - 1) / kScan, hi = x;
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
          const double mid = 0.5 * (lo + hi);
          (psi(mid) <= 0.0 ? hi : lo) = mid;
        }
        b_branch = std::max(kl_bernoulli(hi, b), kl_bernoulli(hi - alpha, a));
        break;
      }
    }
  }
  return std::min(a_branch, b_branch);
}

}  // namespace strassen
