#include "strassen/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "convex.hpp"
#include "strassen/flow.hpp"

namespace strassen {

using detail::BarrierProblem;
using detail::MarginalMap;
using detail::Mat;
using detail::Vec;

namespace {

constexpr double kFlowEps = 1e-15;
// Slack allowed on S when solving for tight potentials; S comes from a
// numerical support computation.
constexpr double kTightSlack = 1e-9;

// Difference constraints d(y) − d(x) ≤ c − eps off S, |d(y) − d(x) − c| on S.
bool potentials(const SupportSet& s, const CostMatrix& c, double eps, std::vector<double>& d) {
  const std::size_t nx = c.rows(), ny = c.cols();
  d.assign(nx + ny, 0.0);
  for (std::size_t round = 0; round <= nx + ny + 1; ++round) {
    bool changed = false;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        const bool in = s.contains(x, y);
        const double fwd = c(x, y) - (in ? 0.0 : eps);
        if (d[x] + fwd < d[nx + y] - 1e-13) {
          d[nx + y] = d[x] + fwd;
          changed = true;
        }
        if (in && d[nx + y] - c(x, y) + kTightSlack < d[x] - 1e-13) {
          d[x] = d[nx + y] - c(x, y) + kTightSlack;
          changed = true;
        }
      }
    if (!changed) return true;
  }
  return false;
}

void check_signed(std::span<const double> b, std::size_t size) {
  if (b.size() != size) throw ValidationError("perturbation and alphabet differ in length");
  double sum = 0.0, scale = 1.0;
  for (double v : b) {
    if (!std::isfinite(v)) throw ValidationError("perturbation entries must be finite");
    sum += v;
    scale = std::max(scale, std::abs(v));
  }
  if (std::abs(sum) > 1e-9 * scale) throw ValidationError("perturbation must sum to zero");
}

void check_mdp(const Dist& p_x, const Dist& p_y, const CostMatrix& c) {
  if (c.rows() != p_x.size() || c.cols() != p_y.size())
    throw ValidationError("cost matrix and marginals differ in dimension");
  if (p_x.size() > kMaxMdpAlphabet || p_y.size() > kMaxMdpAlphabet)
    throw SizeGuardError("moderate-deviation solver supports alphabets of size <= " +
                         std::to_string(kMaxMdpAlphabet));
  for (double v : p_x.mass())
    if (!(v > 0.0)) throw ValidationError("moderate-deviation rates need strictly positive marginals");
  for (double v : p_y.mass())
    if (!(v > 0.0)) throw ValidationError("moderate-deviation rates need strictly positive marginals");
}

std::vector<std::vector<double>> zero_sum_vertices(std::size_t k) {
  std::set<std::vector<double>> out;
  if (k == 1) return {{0.0}};
  for (std::size_t free = 0; free < k; ++free)
    for (std::size_t mask = 0; mask < (std::size_t{1} << (k - 1)); ++mask) {
      std::vector<double> v(k);
      double sum = 0.0;
      for (std::size_t i = 0, bit = 0; i < k; ++i) {
        if (i == free) continue;
        v[i] = (mask >> bit++ & 1) ? 1.0 : -1.0;
        sum += v[i];
      }
      if (std::abs(sum) > 1.0) continue;
      v[free] = -sum == 0.0 ? 0.0 : -sum;
      out.insert(v);
    }
  return {out.begin(), out.end()};
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

bool SignedMatrix::negative_within(const SupportSet& s, double tol) const {
  for (std::size_t x = 0; x < values_.rows(); ++x)
    for (std::size_t y = 0; y < values_.cols(); ++y)
      if (values_(x, y) < -tol && !s.contains(x, y)) return false;
  return true;
}

ThetaModel::ThetaModel(SupportSet s, CostMatrix c)
    : s_(std::move(s)), c_(std::move(c)), reduced_(c_.rows(), c_.cols()), forest_(c_.rows(), c_.cols()) {
  const std::size_t nx = c_.rows(), ny = c_.cols();
  if (s_.rows() != nx || s_.cols() != ny) throw ValidationError("support set and cost matrix differ in dimension");
  // Spanning forest of the bipartite graph S (union-find, row-major).
  std::vector<std::size_t> parent(nx + ny);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (auto [x, y] : s_.cells()) {
    const auto a = find(x), b = find(nx + y);
    if (a != b) {
      parent[a] = b;
      forest_.insert(x, y);
    }
  }
  std::vector<double> d;
  if (!potentials(s_, c_, 0.0, d)) {
    consistent_ = false;
    f_.assign(nx, 0.0);
    g_.assign(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) reduced_(x, y) = c_(x, y);
    return;
  }
  // Largest uniform slack off S (strict complementarity), then use half.
  double lo = 0.0, hi = std::max(1.0, c_.max());
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (potentials(s_, c_, mid, d) ? lo : hi) = mid;
  }
  potentials(s_, c_, 0.5 * lo, d);
  // The relaxation leaves S tight only to kTightSlack; re-derive each tree
  // from its root so forest cells are tight exactly.
  std::vector<bool> seen(nx + ny, false);
  for (std::size_t root = 0; root < nx + ny; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w = 0; w < (v < nx ? ny : nx); ++w) {
        const std::size_t x = v < nx ? v : w, y = v < nx ? w : v - nx;
        const std::size_t other = v < nx ? nx + w : w;
        if (seen[other] || !forest_.contains(x, y)) continue;
        seen[other] = true;
        d[other] = v < nx ? d[v] + c_(x, y) : d[v] - c_(x, y);
        stack.push_back(other);
      }
    }
  }
  f_.resize(nx);
  g_.resize(ny);
  for (std::size_t x = 0; x < nx; ++x) f_[x] = -d[x];
  for (std::size_t y = 0; y < ny; ++y) g_[y] = d[nx + y];
  margin_ = kInf;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      if (s_.contains(x, y)) continue;
      reduced_(x, y) = std::max(0.0, c_(x, y) - f_[x] - g_[y]);
      margin_ = std::min(margin_, reduced_(x, y));
    }
}

double theta(const ThetaModel& model, std::span<const double> beta_x, std::span<const double> beta_y, Table* plan) {
  const CostMatrix& c = model.cost();
  const std::size_t nx = c.rows(), ny = c.cols();
  check_signed(beta_x, nx);
  check_signed(beta_y, ny);
  const std::size_t s = nx + ny, t = s + 1;
  double supply = 0.0;
  for (double v : beta_x) supply += std::max(v, 0.0);
  for (double v : beta_y) supply += std::max(-v, 0.0);
  if (plan) *plan = Table(nx, ny);
  if (supply <= 0.0) return 0.0;

  const bool snapped = model.consistent();
  MinCostFlow<double> mcf(nx + ny + 2, kFlowEps);
  for (std::size_t x = 0; x < nx; ++x) {
    if (beta_x[x] > 0.0) mcf.add_edge(s, x, beta_x[x], 0.0);
    if (beta_x[x] < 0.0) mcf.add_edge(x, t, -beta_x[x], 0.0);
  }
  for (std::size_t y = 0; y < ny; ++y) {
    if (beta_y[y] > 0.0) mcf.add_edge(nx + y, t, beta_y[y], 0.0);
    if (beta_y[y] < 0.0) mcf.add_edge(s, nx + y, -beta_y[y], 0.0);
  }
  const double cap = 2.0 * supply;
  std::vector<std::size_t> fwd(nx * ny), back(nx * ny, SIZE_MAX);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      fwd[x * ny + y] = mcf.add_edge(x, nx + y, cap, snapped ? model.reduced(x, y) : c(x, y));
      if (model.support().contains(x, y))
        back[x * ny + y] = mcf.add_edge(nx + y, x, cap, snapped ? 0.0 : -c(x, y));
    }
  const auto res = mcf.run(s, t, supply);
  if (res.negative_cycle) return -kInf;
  if (res.flow < supply * (1.0 - 1e-12) - 1e-15) return kInf;

  double value = res.cost;
  if (snapped) {
    for (std::size_t x = 0; x < nx; ++x) value += model.f()[x] * beta_x[x];
    for (std::size_t y = 0; y < ny; ++y) value += model.g()[y] * beta_y[y];
  }
  if (plan)
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        double v = mcf.flow(fwd[x * ny + y]);
        if (back[x * ny + y] != SIZE_MAX) v -= mcf.flow(back[x * ny + y]);
        (*plan)(x, y) = v;
      }
  return value;
}

double theta(const SignedVec& beta_x, const SignedVec& beta_y, const SupportSet& s, const CostMatrix& c) {
  return theta(ThetaModel(s, c), beta_x.mass(), beta_y.mass());
}

double theta_lipschitz_constant(const ThetaModel& model) {
  const auto vx = zero_sum_vertices(model.cost().rows());
  const auto vy = zero_sum_vertices(model.cost().cols());
  double best = 0.0;
  for (const auto& a : vx)
    for (const auto& b : vy) best = std::max(best, theta(model, a, b));
  return best;
}

namespace {

struct DirectionSearch {
  std::function<double(const Vec&)> objective;
  int dim;
};

// Grid over unit directions, then Nelder-Mead from the best few.
double minimize_directions(const DirectionSearch& search, const MdpOptions& opt) {
  const auto dirs = detail::direction_samples(search.dim, opt.circle, opt.sphere, opt.scatter);
  std::vector<double> vals(dirs.size());
  const auto count = static_cast<std::int64_t>(dirs.size());
#pragma omp parallel for schedule(dynamic, 8) num_threads(thread_budget()) if (opt.exec == Exec::parallel)
  for (std::int64_t i = 0; i < count; ++i) vals[i] = search.objective(dirs[i]);

  std::vector<std::size_t> order(dirs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return vals[a] < vals[b] || (vals[a] == vals[b] && a < b);
  });
  double best = vals.empty() ? kInf : vals[order.front()];
  if (!std::isfinite(best) || search.dim < 2) return best;
  const double step = search.dim == 2 ? 4.0 * std::numbers::pi / opt.circle : 0.05;
  for (std::size_t k = 0; k < std::min<std::size_t>(3, order.size()); ++k) {
    if (!std::isfinite(vals[order[k]])) break;
    const Vec x = detail::nelder_mead(search.objective, dirs[order[k]], step, 600, 1e-14);
    best = std::min(best, search.objective(x));
  }
  return best;
}

}  // namespace

double mdp_rate_lower(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double delta, const MdpOptions& opt) {
  if (!(delta < 0.0)) throw ValidationError("lower-tail moderate-deviation rate needs delta < 0");
  check_mdp(p_x, p_y, c);
  const ThetaModel model(optimal_support(p_x, p_y, c, 1e-9, opt.exec), c);
  const std::size_t kx = p_x.size(), ky = p_y.size();
  const Mat hx = detail::helmert(kx), hy = detail::helmert(ky);
  DirectionSearch search;
  search.dim = static_cast<int>(kx + ky) - 2;
  search.objective = [&](const Vec& w) {
    const auto ux = to_std(hx * w.head(kx - 1));
    const auto uy = to_std(hy * w.tail(ky - 1));
    const double th = theta(model, ux, uy);
    if (!(th < -1e-14)) return kInf;
    const double q = std::max(chi2_half(ux, p_x.mass()), chi2_half(uy, p_y.mass()));
    return q / (th * th);
  };
  const double best = minimize_directions(search, opt);
  return std::isfinite(best) ? delta * delta * best : kInf;
}

double theta_min_given_x(const ThetaModel& model, const Dist& p_x, const Dist& p_y, std::span<const double> u) {
  const CostMatrix& c = model.cost();
  const std::size_t nx = c.rows(), ny = c.cols();
  check_signed(u, nx);
  const double rho = chi2_half(u, p_x.mass());
  if (rho <= 0.0) return 0.0;
  if (!model.consistent()) throw ValidationError("support set admits no tight dual potentials");

  // Start: u⊗P_Y + K(P_X⊗P_Y − P*), positive off S with zero column sums.
  const auto star = ot_cost(p_x, p_y, c).plan;
  double k = 1.0;
  for (std::size_t x = 0; x < nx; ++x) k = std::max(k, 2.0 * std::abs(u[x]) / p_x[x] + 1.0);
  Table b0(nx, ny);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) b0(x, y) = u[x] * p_y[y] + k * (p_x[x] * p_y[y] - star(x, y));

  // Fold S cells outside the forest onto forest paths; marginals unchanged.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(nx + ny);
  for (auto [x, y] : model.support().cells())
    if (model.in_forest(x, y)) {
      adj[x].push_back({nx + y, x * ny + y});
      adj[nx + y].push_back({x, x * ny + y});
    }
  for (auto [x, y] : model.support().cells()) {
    if (model.in_forest(x, y)) continue;
    const double v = b0(x, y);
    b0(x, y) = 0.0;
    std::vector<std::size_t> via(nx + ny, SIZE_MAX), prev(nx + ny, SIZE_MAX);
    std::vector<std::size_t> queue{x};
    via[x] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi)
      for (auto [to, cell] : adj[queue[qi]])
        if (via[to] == SIZE_MAX) {
          via[to] = cell;
          prev[to] = queue[qi];
          queue.push_back(to);
        }
    std::vector<std::size_t> path;
    for (std::size_t node = nx + y; node != x; node = prev[node]) path.push_back(via[node]);
    std::reverse(path.begin(), path.end());
    for (std::size_t i = 0; i < path.size(); ++i) b0(path[i] / ny, path[i] % ny) += (i % 2 == 0 ? v : -v);
  }

  std::vector<std::size_t> cells;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      if (!model.support().contains(x, y) || model.in_forest(x, y)) cells.push_back(x * ny + y);
  const std::size_t d = cells.size();
  BarrierProblem prob;
  prob.objective = Vec(d);
  prob.eq_a = Mat::Zero(nx, d);
  prob.eq_b = Vec(nx);
  prob.nonneg.assign(d, false);
  Vec start(d);
  MarginalMap cols;
  cols.size = ny;
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t x = cells[i] / ny, y = cells[i] % ny;
    prob.objective[i] = model.f()[x] + model.g()[y] + model.reduced(x, y);
    prob.eq_a(x, i) = 1.0;
    prob.nonneg[i] = !model.support().contains(x, y);
    start[i] = b0(x, y);
    cols.var.push_back(i);
    cols.target.push_back(y);
  }
  for (std::size_t x = 0; x < nx; ++x) prob.eq_b[x] = u[x];
  prob.constraints.push_back(detail::marginal_chi2(cols, p_y.mass(), rho));
  return detail::solve_barrier(prob, start, 1e-12).value;
}

double mdp_rate_upper_oriented(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double delta,
                               const MdpOptions& opt) {
  if (!(delta > 0.0)) throw ValidationError("upper-tail moderate-deviation rate needs delta > 0");
  check_mdp(p_x, p_y, c);
  const ThetaModel model(optimal_support(p_x, p_y, c, 1e-9, opt.exec), c);
  const std::size_t kx = p_x.size();
  if (kx < 2) return kInf;
  const Mat hx = detail::helmert(kx);
  DirectionSearch search;
  search.dim = static_cast<int>(kx) - 1;
  search.objective = [&](const Vec& w) {
    const auto u = to_std(hx * w);
    const double m = theta_min_given_x(model, p_x, p_y, u);
    if (!(m > 1e-12)) return kInf;
    return chi2_half(u, p_x.mass()) / (m * m);
  };
  const double best = minimize_directions(search, opt);
  return std::isfinite(best) ? delta * delta * best : kInf;
}

double mdp_rate_upper(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double delta, const MdpOptions& opt) {
  return std::min(mdp_rate_upper_oriented(p_x, p_y, c, delta, opt),
                  mdp_rate_upper_oriented(p_y, p_x, c.transposed(), delta, opt));
}

SetaCheck seta_check(const Dist& p_x, const Dist& p_y, const CostMatrix& c, const Dist& q_x, const Dist& q_y,
                     double a) {
  if (!(a > 0.0)) throw ValidationError("scale a must be positive");
  if (!q_x.same_alphabet(p_x) || !q_y.same_alphabet(p_y)) throw ValidationError("alphabet mismatch");
  const double alpha = ot_value(p_x.mass(), p_y.mass(), c);
  const ThetaModel model(optimal_support(p_x, p_y, c, 1e-9, Exec::serial), c);
  std::vector<double> bx(p_x.size()), by(p_y.size());
  for (std::size_t i = 0; i < bx.size(); ++i) bx[i] = (q_x[i] - p_x[i]) / a;
  for (std::size_t j = 0; j < by.size(); ++j) by[j] = (q_y[j] - p_y[j]) / a;
  SetaCheck out;
  out.lhs = (ot_value(q_x.mass(), q_y.mass(), c) - alpha) / a;
  out.rhs = theta(model, bx, by);
  out.holds = out.lhs >= out.rhs - 1e-9;
  return out;
}

std::vector<double> seta_gaps(const Dist& p_x, const Dist& p_y, const CostMatrix& c, const SignedVec& beta_x,
                              const SignedVec& beta_y, const std::vector<double>& a_list) {
  const double alpha = ot_value(p_x.mass(), p_y.mass(), c);
  const ThetaModel model(optimal_support(p_x, p_y, c, 1e-9, Exec::serial), c);
  const double th = theta(model, beta_x.mass(), beta_y.mass());
  std::vector<double> gaps;
  for (double a : a_list) {
    std::vector<double> qx(p_x.size()), qy(p_y.size());
    for (std::size_t i = 0; i < qx.size(); ++i) qx[i] = p_x[i] + a * beta_x[i];
    for (std::size_t j = 0; j < qy.size(); ++j) qy[j] = p_y[j] + a * beta_y[j];
    for (double v : qx)
      if (v < -1e-15) throw ValidationError("P + a·beta leaves the simplex");
    for (double v : qy)
      if (v < -1e-15) throw ValidationError("P + a·beta leaves the simplex");
    for (double& v : qx) v = std::max(v, 0.0);
    for (double& v : qy) v = std::max(v, 0.0);
    gaps.push_back((ot_value(qx, qy, c) - alpha) / a - th);
  }
  return gaps;
}

}  // namespace strassen
