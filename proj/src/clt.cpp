#include "strassen/clt.hpp"

#include <algorithm>
#include <cmath>

namespace strassen {

GaussParams gauss_params(const Dist& p) {
  const std::size_t k = p.size();
  GaussParams g{std::vector<double>(k, 0.0), Table(k, k)};
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) g.cov(i, j) = (i == j ? p[i] : 0.0) - p[i] * p[j];
  return g;
}

BinaryCltInstance BinaryCltInstance::from(double a, double b, double delta) {
  const BinaryCltInstance inst{a - a * a, b - b * b, delta};
  if (!(inst.sigma_x2 > 0.0 && inst.sigma_y2 > 0.0)) throw ValidationError("binary variances must be positive");
  return inst;
}

Crossing crossing_points(const BinaryCltInstance& inst) {
  if (!(inst.sigma_x2 > 0.0 && inst.sigma_y2 > 0.0)) throw ValidationError("variances must be positive");
  Crossing out;
  const double sx2 = inst.sigma_x2, sy2 = inst.sigma_y2, d = inst.delta;
  if (sx2 == sy2) {
    out.roots = {-d / 2.0};
    return out;
  }
  const double sx = std::sqrt(sx2), sy = std::sqrt(sy2);
  const double disc = d * d + 2.0 * (sx2 - sy2) * std::log(sx / sy);
  if (disc < 0.0) {
    out.negative_discriminant = true;
    return out;
  }
  const double root = sx * sy * std::sqrt(disc);
  out.roots = {(-sx2 * d - root) / (sx2 - sy2), (-sx2 * d + root) / (sx2 - sy2)};
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

double normal_cdf(double x, double sigma2) {
  if (!(sigma2 > 0.0)) throw ValidationError("normal_cdf needs a positive variance");
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * sigma2));
}

namespace {

void check_ab(double a, double b) {
  if (!(0.0 < a && a <= b && b <= 0.5)) throw ValidationError("binary limit law needs 0 < a <= b <= 1/2");
}

}  // namespace

double lambda_binary(double a, double b, double delta) {
  check_ab(a, b);
  const auto inst = BinaryCltInstance::from(a, b, delta);
  if (a == b) {
    if (delta > 0.0) return 0.0;
    return normal_cdf(-delta / 2.0, inst.sigma_x2) - normal_cdf(delta / 2.0, inst.sigma_y2);
  }
  const auto cross = crossing_points(inst);
  if (cross.roots.empty()) return 0.0;
  const double ap = cross.roots.back();
  return std::clamp(normal_cdf(ap, inst.sigma_x2) - normal_cdf(ap + delta, inst.sigma_y2), 0.0, 1.0);
}

double lambda_dual_grid(double a, double b, double delta, int grid) {
  check_ab(a, b);
  const auto inst = BinaryCltInstance::from(a, b, delta);
  auto gap = [&](double ap) { return normal_cdf(ap, inst.sigma_x2) - normal_cdf(ap + delta, inst.sigma_y2); };
  const double span = 6.0 * std::sqrt(std::max(inst.sigma_x2, inst.sigma_y2)) + std::abs(delta);
  const double h = 2.0 * span / (grid - 1);
  double best = 0.0, arg = -span;
  for (int i = 0; i < grid; ++i) {
    const double x = -span + h * i;
    const double v = gap(x);
    if (v > best) {
      best = v;
      arg = x;
    }
  }
  if (best <= 0.0) return 0.0;
  double lo = arg - h, hi = arg + h;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = gap(x1), f2 = gap(x2);
  for (int it = 0; it < 100; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = gap(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = gap(x2);
    }
  }
  return std::clamp(std::max({best, f1, f2}), 0.0, 1.0);
}

}  // namespace strassen
