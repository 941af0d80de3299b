#include "strassen/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "strassen/flow.hpp"

namespace strassen {

namespace {

constexpr double kFlowEps = 1e-15;
constexpr double kPlanPositive = 1e-13;

void check_dims(std::size_t nx, std::size_t ny, const CostMatrix& c) {
  if (c.rows() != nx || c.cols() != ny)
    throw ValidationError("cost matrix is " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()) +
                          ", marginals are " + std::to_string(nx) + " and " + std::to_string(ny));
}

void check_dims(std::size_t nx, std::size_t ny, const Table& c) {
  if (c.rows() != nx || c.cols() != ny) throw ValidationError("cost table and marginals differ in dimension");
}

Table transport_plan(std::span<const double> px, std::span<const double> py, const CostMatrix& c,
                     double* objective) {
  const std::size_t nx = px.size(), ny = py.size();
  const std::size_t s = nx + ny, t = s + 1;
  MinCostFlow<double> mcf(nx + ny + 2, kFlowEps);
  for (std::size_t x = 0; x < nx; ++x) mcf.add_edge(s, x, px[x], 0.0);
  for (std::size_t y = 0; y < ny; ++y) mcf.add_edge(nx + y, t, py[y], 0.0);
  std::vector<std::size_t> arc(nx * ny);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) arc[x * ny + y] = mcf.add_edge(x, nx + y, 2.0, c(x, y));
  mcf.run(s, t, 2.0);
  Table plan(nx, ny);
  double obj = 0.0;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      const double m = std::max(0.0, mcf.flow(arc[x * ny + y]));
      plan(x, y) = m;
      obj += m * c(x, y);
    }
  if (objective) *objective = obj;
  return plan;
}

// Spread the unmatched residual marginals northwest-corner style.
void complete_plan(Table& plan, std::vector<double> rx, std::vector<double> ry) {
  std::size_t i = 0, j = 0;
  while (i < rx.size() && j < ry.size()) {
    const double m = std::min(rx[i], ry[j]);
    if (m > 0.0) plan(i, j) += m;
    rx[i] -= m;
    ry[j] -= m;
    if (rx[i] <= kFlowEps) ++i;
    else ++j;
  }
}

}  // namespace

CostMatrix::CostMatrix(Table values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0) throw ValidationError("empty cost matrix");
  for (double v : values_.data())
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("cost entries must be finite and >= 0");
}

CostMatrix CostMatrix::hamming(std::size_t rows, std::size_t cols) {
  Table t(rows, cols);
  for (std::size_t x = 0; x < rows; ++x)
    for (std::size_t y = 0; y < cols; ++y) t(x, y) = x == y ? 0.0 : 1.0;
  return CostMatrix(std::move(t));
}

SupportSet SupportSet::all(std::size_t rows, std::size_t cols) {
  SupportSet s(rows, cols);
  for (std::size_t x = 0; x < rows; ++x)
    for (std::size_t y = 0; y < cols; ++y) s.insert(x, y);
  return s;
}

std::vector<std::pair<std::size_t, std::size_t>> SupportSet::cells() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t x = 0; x < rows_; ++x)
    for (std::size_t y = 0; y < cols_; ++y)
      if (contains(x, y)) out.emplace_back(x, y);
  return out;
}

std::size_t SupportSet::size() const { return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true)); }

TransportPlan ot_cost(const Dist& p_x, const Dist& p_y, const CostMatrix& c) {
  check_dims(p_x.size(), p_y.size(), c);
  double obj = 0.0;
  Table plan = transport_plan(p_x.mass(), p_y.mass(), c, &obj);
  const double total = plan.total();
  for (double& v : plan.data()) v /= total;
  return {JointDist(std::move(plan)), obj};
}

double ot_value_2x2(double px0, double py0, const CostMatrix& c) {
  // π(0,0) = t ranges over [max(0, px0+py0−1), min(px0, py0)].
  const double lo = std::max(0.0, px0 + py0 - 1.0);
  const double hi = std::min(px0, py0);
  auto cost = [&](double t) {
    return t * c(0, 0) + (px0 - t) * c(0, 1) + (py0 - t) * c(1, 0) + (1.0 - px0 - py0 + t) * c(1, 1);
  };
  return std::max(0.0, std::min(cost(lo), cost(hi)));
}

double ot_value(std::span<const double> p_x, std::span<const double> p_y, const CostMatrix& c) {
  check_dims(p_x.size(), p_y.size(), c);
  if (p_x.size() == 2 && p_y.size() == 2) return ot_value_2x2(p_x[0], p_y[0], c);
  double obj = 0.0;
  transport_plan(p_x, p_y, c, &obj);
  return obj;
}

EcpSolution ecp_masses(std::span<const double> p_x, std::span<const double> p_y, const Table& cost,
                       double alpha) {
  check_dims(p_x.size(), p_y.size(), cost);
  const std::size_t nx = p_x.size(), ny = p_y.size();
  const std::size_t s = nx + ny, t = s + 1;
  MaxFlow<double> mf(nx + ny + 2, kFlowEps);
  for (std::size_t x = 0; x < nx; ++x) mf.add_edge(s, x, p_x[x]);
  for (std::size_t y = 0; y < ny; ++y) mf.add_edge(nx + y, t, p_y[y]);
  std::vector<std::size_t> arc(nx * ny, SIZE_MAX);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      if (admissible(cost(x, y), alpha)) arc[x * ny + y] = mf.add_edge(x, nx + y, 2.0);
  const double flow = mf.run(s, t);

  EcpSolution sol;
  sol.plan = Table(nx, ny);
  std::vector<double> rx(p_x.begin(), p_x.end()), ry(p_y.begin(), p_y.end());
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      if (arc[x * ny + y] == SIZE_MAX) continue;
      const double m = std::max(0.0, mf.flow(arc[x * ny + y]));
      sol.plan(x, y) = m;
      rx[x] = std::max(0.0, rx[x] - m);
      ry[y] = std::max(0.0, ry[y] - m);
    }
  complete_plan(sol.plan, std::move(rx), std::move(ry));
  sol.matched = std::min(1.0, flow);
  sol.value = std::max(0.0, 1.0 - flow);
  const auto side = mf.source_side(s);
  for (std::size_t x = 0; x < nx; ++x)
    if (side[x]) sol.witness.push_back(x);
  return sol;
}

EcpSolution ecp(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha) {
  check_dims(p_x.size(), p_y.size(), c);
  return ecp_masses(p_x.mass(), p_y.mass(), c.values(), alpha);
}

std::int64_t ecp_integral(std::span<const std::int64_t> p_x, std::span<const std::int64_t> p_y,
                          const CostMatrix& c, double alpha) {
  check_dims(p_x.size(), p_y.size(), c);
  std::int64_t tx = 0, ty = 0;
  for (auto v : p_x) {
    if (v < 0) throw ValidationError("integral masses must be >= 0");
    tx += v;
  }
  for (auto v : p_y) {
    if (v < 0) throw ValidationError("integral masses must be >= 0");
    ty += v;
  }
  if (tx != ty) throw ValidationError("integral marginals have different totals");
  const std::size_t nx = p_x.size(), ny = p_y.size();
  const std::size_t s = nx + ny, t = s + 1;
  MaxFlow<std::int64_t> mf(nx + ny + 2);
  for (std::size_t x = 0; x < nx; ++x) mf.add_edge(s, x, p_x[x]);
  for (std::size_t y = 0; y < ny; ++y) mf.add_edge(nx + y, t, p_y[y]);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      if (admissible(c(x, y), alpha)) mf.add_edge(x, nx + y, tx + 1);
  return tx - mf.run(s, t);
}

std::vector<std::size_t> gamma_enlarge(std::span<const std::size_t> a_set, const CostMatrix& c, double alpha) {
  std::vector<bool> hit(c.cols(), false);
  for (std::size_t x : a_set) {
    if (x >= c.rows()) throw ValidationError("set element outside the alphabet");
    for (std::size_t y = 0; y < c.cols(); ++y)
      if (admissible(c(x, y), alpha)) hit[y] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < c.cols(); ++y)
    if (hit[y]) out.push_back(y);
  return out;
}

DualWitness ecp_dual_bruteforce(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha) {
  check_dims(p_x.size(), p_y.size(), c);
  const std::size_t nx = p_x.size(), ny = p_y.size();
  if (nx > kMaxBruteforceAlphabet)
    throw SizeGuardError("subset enumeration needs |X| <= " + std::to_string(kMaxBruteforceAlphabet));
  const std::size_t words = (ny + 63) / 64;
  std::vector<std::uint64_t> nbr(nx * words, 0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      if (admissible(c(x, y), alpha)) nbr[x * words + y / 64] |= std::uint64_t{1} << (y % 64);

  DualWitness best;
  std::uint64_t best_mask = 0;
  std::vector<std::uint64_t> cover(words);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << nx); ++mask) {
    std::fill(cover.begin(), cover.end(), 0);
    double mx = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      if (!(mask >> x & 1)) continue;
      mx += p_x[x];
      for (std::size_t w = 0; w < words; ++w) cover[w] |= nbr[x * words + w];
    }
    double my = 0.0;
    for (std::size_t y = 0; y < ny; ++y)
      if (cover[y / 64] >> (y % 64) & 1) my += p_y[y];
    if (mx - my > best.value) {
      best.value = mx - my;
      best_mask = mask;
    }
  }
  for (std::size_t x = 0; x < nx; ++x)
    if (best_mask >> x & 1) best.set.push_back(x);
  return best;
}

std::pair<std::vector<double>, std::vector<double>> dual_potentials(const Table& plan, const CostMatrix& c) {
  const std::size_t nx = c.rows(), ny = c.cols();
  check_dims(plan.rows(), plan.cols(), c);
  // Residual graph: x→y at cost c on every cell, y→x at cost −c on the
  // support. Distances from a virtual root give f = −d(x), g = d(y).
  std::vector<double> d(nx + ny, 0.0);
  for (std::size_t round = 0; round <= nx + ny; ++round) {
    bool changed = false;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        if (d[x] + c(x, y) < d[nx + y] - 1e-15) {
          d[nx + y] = d[x] + c(x, y);
          changed = true;
        }
        if (plan(x, y) > kPlanPositive && d[nx + y] - c(x, y) < d[x] - 1e-15) {
          d[x] = d[nx + y] - c(x, y);
          changed = true;
        }
      }
    if (!changed) break;
  }
  std::vector<double> f(nx), g(ny);
  for (std::size_t x = 0; x < nx; ++x) f[x] = -d[x];
  for (std::size_t y = 0; y < ny; ++y) g[y] = d[nx + y];
  return {std::move(f), std::move(g)};
}

KantorovichCertificate kantorovich_certificate(const Dist& p_x, const Dist& p_y, const CostMatrix& c,
                                               const TransportPlan& plan) {
  check_dims(p_x.size(), p_y.size(), c);
  auto [f, g] = dual_potentials(ot_cost(p_x, p_y, c).plan.matrix(), c);
  double dual = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) dual += p_x[x] * f[x];
  for (std::size_t y = 0; y < g.size(); ++y) dual += p_y[y] * g[y];
  double primal = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x)
    for (std::size_t y = 0; y < g.size(); ++y) primal += plan.plan(x, y) * c(x, y);
  return {std::move(f), std::move(g), primal - dual};
}

namespace {

// Largest mass a tight cell can carry in a coupling supported on tight cells.
double max_cell_mass(std::span<const double> px, std::span<const double> py, const std::vector<bool>& tight,
                     std::size_t cx, std::size_t cy) {
  const std::size_t nx = px.size(), ny = py.size();
  auto feasible = [&](double m) {
    const std::size_t s = nx + ny, t = s + 1;
    MaxFlow<double> mf(nx + ny + 2, kFlowEps);
    for (std::size_t x = 0; x < nx; ++x) mf.add_edge(s, x, std::max(0.0, px[x] - (x == cx ? m : 0.0)));
    for (std::size_t y = 0; y < ny; ++y) mf.add_edge(nx + y, t, std::max(0.0, py[y] - (y == cy ? m : 0.0)));
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        if (tight[x * ny + y]) mf.add_edge(x, nx + y, 2.0);
    return mf.run(s, t) >= 1.0 - m - 1e-12;
  };
  double hi = std::min(px[cx], py[cy]);
  if (feasible(hi)) return hi;
  double lo = 0.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

SupportSet optimal_support(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double tol, Exec exec) {
  check_dims(p_x.size(), p_y.size(), c);
  const std::size_t nx = p_x.size(), ny = p_y.size();
  const Table plan = transport_plan(p_x.mass(), p_y.mass(), c, nullptr);
  const auto [f, g] = dual_potentials(plan, c);
  std::vector<bool> tight(nx * ny);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) tight[x * ny + y] = c(x, y) - f[x] - g[y] <= 1e-9;

  std::vector<char> keep(nx * ny, 0);
  const auto n = static_cast<std::int64_t>(nx * ny);
#pragma omp parallel for schedule(dynamic) num_threads(thread_budget()) if (exec == Exec::parallel)
  for (std::int64_t k = 0; k < n; ++k) {
    const auto x = static_cast<std::size_t>(k) / ny, y = static_cast<std::size_t>(k) % ny;
    if (!tight[k]) continue;
    if (plan(x, y) > tol) {
      keep[k] = 1;
      continue;
    }
    if (std::min(p_x[x], p_y[y]) <= tol) continue;
    keep[k] = max_cell_mass(p_x.mass(), p_y.mass(), tight, x, y) > tol;
  }
  SupportSet s(nx, ny);
  for (std::size_t k = 0; k < nx * ny; ++k)
    if (keep[k]) s.insert(k / ny, k % ny);
  return s;
}

}  // namespace strassen
