#include "convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace strassen::detail {

namespace {

constexpr double kInfD = std::numeric_limits<double>::infinity();

}  // namespace

Vec MarginalMap::apply(const Vec& z) const {
  Vec m = Vec::Zero(static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < var.size(); ++i) m[target[i]] += z[var[i]];
  return m;
}

MarginalMap MarginalMap::grid(std::size_t rows, std::size_t cols, bool by_col, std::size_t offset) {
  MarginalMap map;
  map.size = by_col ? cols : rows;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      map.var.push_back(offset + r * cols + c);
      map.target.push_back(by_col ? c : r);
    }
  return map;
}

Constraint marginal_kl(MarginalMap map, std::vector<double> p, double r) {
  Constraint con;
  con.value = [map, p, r](const Vec& z) {
    const Vec m = map.apply(z);
    double s = -r;
    for (std::size_t k = 0; k < map.size; ++k) {
      if (!(m[k] > 0.0)) return kInfD;
      s += m[k] * std::log(m[k] / p[k]);
    }
    return s;
  };
  con.derivs = [map, p](const Vec& z, Vec& grad, Mat& hess) {
    const Vec m = map.apply(z);
    for (std::size_t i = 0; i < map.var.size(); ++i) {
      const std::size_t k = map.target[i];
      grad[map.var[i]] += std::log(m[k] / p[k]) + 1.0;
      for (std::size_t j = 0; j < map.var.size(); ++j)
        if (map.target[j] == k) hess(map.var[i], map.var[j]) += 1.0 / m[k];
    }
  };
  return con;
}

Constraint marginal_chi2(MarginalMap map, std::vector<double> p, double r, int slack) {
  Constraint con;
  con.value = [map, p, r, slack](const Vec& z) {
    const Vec m = map.apply(z);
    double s = slack >= 0 ? -z[slack] : -r;
    for (std::size_t k = 0; k < map.size; ++k) s += 0.5 * m[k] * m[k] / p[k];
    return s;
  };
  con.derivs = [map, p, slack](const Vec& z, Vec& grad, Mat& hess) {
    const Vec m = map.apply(z);
    for (std::size_t i = 0; i < map.var.size(); ++i) {
      const std::size_t k = map.target[i];
      grad[map.var[i]] += m[k] / p[k];
      for (std::size_t j = 0; j < map.var.size(); ++j)
        if (map.target[j] == k) hess(map.var[i], map.var[j]) += 1.0 / p[k];
    }
    if (slack >= 0) grad[slack] -= 1.0;
  };
  return con;
}

BarrierResult solve_barrier(const BarrierProblem& p, Vec start, double gap_tol) {
  const auto d = start.size();
  const auto eq = p.eq_a.rows();
  std::size_t m = p.constraints.size();
  for (bool b : p.nonneg) m += b;
  if (m == 0) throw std::logic_error("barrier problem without inequalities");

  auto feasible = [&](const Vec& z) {
    for (Eigen::Index j = 0; j < d; ++j)
      if (p.nonneg[j] && !(z[j] > 0.0)) return false;
    for (const auto& g : p.constraints)
      if (!(g.value(z) < 0.0)) return false;
    return true;
  };
  auto phi = [&](const Vec& z, double t) {
    double v = t * p.objective.dot(z);
    for (Eigen::Index j = 0; j < d; ++j)
      if (p.nonneg[j]) v -= std::log(z[j]);
    for (const auto& g : p.constraints) v -= std::log(-g.value(z));
    return v;
  };
  if (!feasible(start)) throw std::logic_error("barrier start is not strictly feasible");

  Vec z = std::move(start);
  BarrierResult res;
  double t = 1.0;
  Mat kkt(d + eq, d + eq);
  Vec rhs(d + eq), grad(d), gi(d);
  Mat hess(d, d), hi(d, d);
  for (int outer = 0; outer < 60; ++outer) {
    for (int it = 0; it < 200; ++it) {
      grad = t * p.objective;
      hess.setZero();
      for (Eigen::Index j = 0; j < d; ++j)
        if (p.nonneg[j]) {
          grad[j] -= 1.0 / z[j];
          hess(j, j) += 1.0 / (z[j] * z[j]);
        }
      for (const auto& g : p.constraints) {
        gi.setZero();
        hi.setZero();
        g.derivs(z, gi, hi);
        const double slack = -g.value(z);
        grad += gi / slack;
        hess += hi / slack + gi * gi.transpose() / (slack * slack);
      }
      // Barrier curvature spans many orders of magnitude near the boundary;
      // equilibrate with D = diag(H)^{-1/2} so the equality rows survive.
      Vec scale = hess.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      kkt.setZero();
      kkt.topLeftCorner(d, d) = scale.asDiagonal() * hess * scale.asDiagonal();
      kkt.topLeftCorner(d, d).diagonal().array() += 1e-13;
      if (eq > 0) {
        kkt.topRightCorner(d, eq) = (p.eq_a * scale.asDiagonal()).transpose();
        kkt.bottomLeftCorner(eq, d) = p.eq_a * scale.asDiagonal();
        rhs.tail(eq) = p.eq_b - p.eq_a * z;
      }
      rhs.head(d) = -scale.cwiseProduct(grad);
      const auto lu = kkt.fullPivLu();
      Vec sol = lu.solve(rhs);
      sol += lu.solve(rhs - kkt * sol);
      const Vec dz = scale.cwiseProduct(sol.head(d));
      const double decrement = -grad.dot(dz);
      if (!std::isfinite(decrement)) break;
      if (decrement < 2e-12) break;

      double step = 1.0;
      while (step > 1e-20 && !feasible(z + step * dz)) step *= 0.5;
      const double f0 = phi(z, t);
      while (step > 1e-20 && phi(z + step * dz, t) > f0 - 0.25 * step * decrement) step *= 0.5;
      if (step <= 1e-20) break;
      z += step * dz;
    }
    if (static_cast<double>(m) / t < gap_tol) {
      res.converged = true;
      break;
    }
    t *= 8.0;
  }
  res.value = p.objective.dot(z);
  res.z = std::move(z);
  return res;
}

Mat helmert(std::size_t k) {
  Mat h = Mat::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k) - 1);
  for (std::size_t j = 1; j < k; ++j) {
    const double s = 1.0 / std::sqrt(static_cast<double>(j * (j + 1)));
    for (std::size_t i = 0; i < j; ++i) h(i, j - 1) = s;
    h(j, j - 1) = -static_cast<double>(j) * s;
  }
  return h;
}

std::vector<Vec> direction_samples(int dim, int circle, int sphere, int scatter) {
  std::vector<Vec> out;
  if (dim <= 0) return out;
  if (dim == 1) {
    out.push_back(Vec::Constant(1, 1.0));
    out.push_back(Vec::Constant(1, -1.0));
  } else if (dim == 2) {
    for (int i = 0; i < circle; ++i) {
      const double ang = 2.0 * std::numbers::pi * i / circle;
      Vec v(2);
      v << std::cos(ang), std::sin(ang);
      out.push_back(v);
    }
  } else if (dim == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < sphere; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / sphere;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec v(3);
      v << r * std::cos(golden * i), r * std::sin(golden * i), z;
      out.push_back(v);
    }
  } else {
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> normal;
    for (int i = 0; i < scatter; ++i) {
      Vec v(dim);
      for (int j = 0; j < dim; ++j) v[j] = normal(rng);
      out.push_back(v / v.norm());
    }
  }
  return out;
}

Vec nelder_mead(const std::function<double(const Vec&)>& f, Vec x0, double step, int max_iter, double ftol) {
  const auto d = x0.size();
  std::vector<Vec> pts(d + 1, x0);
  std::vector<double> val(d + 1);
  for (Eigen::Index i = 0; i < d; ++i) pts[i + 1][i] += step;
  for (Eigen::Index i = 0; i <= d; ++i) val[i] = f(pts[i]);
  std::vector<std::size_t> order(d + 1);
  for (int it = 0; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];
    if (std::isfinite(val[worst]) && val[worst] - val[best] <= ftol * (1.0 + std::abs(val[best]))) break;
    Vec centroid = Vec::Zero(d);
    for (std::size_t i = 0; i < order.size() - 1; ++i) centroid += pts[order[i]];
    centroid /= static_cast<double>(d);
    const Vec refl = centroid + (centroid - pts[worst]);
    const double fr = f(refl);
    if (fr < val[best]) {
      const Vec exp = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(exp);
      if (fe < fr) {
        pts[worst] = exp;
        val[worst] = fe;
      } else {
        pts[worst] = refl;
        val[worst] = fr;
      }
    } else if (fr < val[second]) {
      pts[worst] = refl;
      val[worst] = fr;
    } else {
      const Vec con = centroid + 0.5 * (pts[worst] - centroid);
      const double fc = f(con);
      if (fc < val[worst]) {
        pts[worst] = con;
        val[worst] = fc;
      } else {
        for (std::size_t i = 1; i < order.size(); ++i) {
          pts[order[i]] = pts[best] + 0.5 * (pts[order[i]] - pts[best]);
          val[order[i]] = f(pts[order[i]]);
        }
      }
    }
  }
  return pts[std::min_element(val.begin(), val.end()) - val.begin()];
}

}  // namespace strassen::detail
