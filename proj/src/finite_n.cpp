#include "strassen/finite_n.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "strassen/flow.hpp"

namespace strassen {

namespace {

struct CacheKey {
  int nx, ny;
  std::size_t kx, ky;
  std::vector<double> cost;
  auto operator<=>(const CacheKey&) const = default;
};

std::mutex cache_mutex;
std::map<CacheKey, std::shared_ptr<const Table>> cache;

}  // namespace

std::shared_ptr<const Table> inner_cost_table(const std::vector<TypeVector>& tx, const std::vector<TypeVector>& ty,
                                              const CostMatrix& c, Exec exec) {
  if (tx.empty() || ty.empty()) throw ValidationError("empty type lattice");
  CacheKey key{tx.front().n, ty.front().n, tx.front().counts.size(), ty.front().counts.size(),
               std::vector<double>(c.values().data().begin(), c.values().data().end())};
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto table = std::make_shared<Table>(tx.size(), ty.size());
  std::vector<std::vector<double>> dy(ty.size());
  for (std::size_t j = 0; j < ty.size(); ++j) dy[j] = ty[j].induced();
  const auto rows = static_cast<std::int64_t>(tx.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_budget()) if (exec == Exec::parallel)
  for (std::int64_t i = 0; i < rows; ++i) {
    const auto dx = tx[i].induced();
    for (std::size_t j = 0; j < ty.size(); ++j) (*table)(i, j) = ot_value(dx, dy[j], c);
  }
  std::lock_guard lock(cache_mutex);
  return cache.emplace(std::move(key), std::move(table)).first->second;
}

void clear_inner_cost_cache() {
  std::lock_guard lock(cache_mutex);
  cache.clear();
}

NestedInstance::NestedInstance(const Dist& p_x, const Dist& p_y, const CostMatrix& c, int n, Exec exec)
    : mu_(TypeMeasure::of(p_x, n)), nu_(TypeMeasure::of(p_y, n)), cost_(c) {
  if (c.rows() != p_x.size() || c.cols() != p_y.size())
    throw ValidationError("cost matrix and marginals differ in dimension");
  inner_ = inner_cost_table(mu_.lattice(), nu_.lattice(), c, exec);
}

double empirical_ot_cost(const TypeVector& tx, const TypeVector& ty, const CostMatrix& c) {
  if (tx.n != ty.n) throw ValidationError("types of different lengths");
  const std::size_t kx = tx.counts.size(), ky = ty.counts.size();
  if (c.rows() != kx || c.cols() != ky) throw ValidationError("cost matrix and types differ in dimension");
  const std::size_t s = kx + ky, t = s + 1;
  MinCostFlow<std::int64_t> mcf(kx + ky + 2);
  for (std::size_t x = 0; x < kx; ++x) mcf.add_edge(s, x, tx.counts[x], 0.0);
  for (std::size_t y = 0; y < ky; ++y) mcf.add_edge(kx + y, t, ty.counts[y], 0.0);
  for (std::size_t x = 0; x < kx; ++x)
    for (std::size_t y = 0; y < ky; ++y) mcf.add_edge(x, kx + y, tx.n, c(x, y));
  return mcf.run(s, t, tx.n).cost / tx.n;
}

bool banded_gn(const TypeMeasure& mu, const TypeMeasure& nu, const Table& inner, double alpha, GnValue& out) {
  const std::size_t m = mu.size(), k = nu.size();
  std::vector<std::size_t> lo(m), hi(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = 0;
    while (j < k && !admissible(inner(i, j), alpha)) ++j;
    if (j == k) return false;
    lo[i] = j;
    while (j < k && admissible(inner(i, j), alpha)) ++j;
    hi[i] = j - 1;
    for (; j < k; ++j)
      if (admissible(inner(i, j), alpha)) return false;
    if (i > 0 && (lo[i] < lo[i - 1] || hi[i] < hi[i - 1])) return false;
  }

  // 1 − G: greedy leftmost assignment is a maximum flow on monotone intervals.
  const auto nu_mass = nu.mass();
  std::vector<double> ry(nu_mass);
  double matched = 0.0;
  std::size_t ptr = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double rem = std::exp(mu.logmass()[i]);
    ptr = std::max(ptr, lo[i]);
    for (std::size_t j = ptr; j <= hi[i] && rem > 0.0; ++j) {
      const double t = std::min(rem, ry[j]);
      matched += t;
      rem -= t;
      if (t == ry[j]) ry[j] = 0.0;
      else ry[j] -= t;
      if (ry[j] == 0.0 && j == ptr) ++ptr;
    }
  }

  // G via the dual: runs of rows whose neighborhoods are pairwise separated.
  // sep[s] = first row whose interval reaches column lo[s].
  std::vector<std::size_t> sep(m);
  for (std::size_t s = 0, e = 0; s < m; ++s) {
    while (e < m && hi[e] < lo[s]) ++e;
    sep[s] = e;
  }
  const auto& lmu = mu.logmass();
  const auto& lnu = nu.logmass();
  // Log prefix/suffix masses: pre[i] = log Σ_{<i}, suf[i] = log Σ_{≥i}.
  auto tails = [](const std::vector<double>& l, std::vector<double>& pre, std::vector<double>& suf) {
    pre.assign(l.size() + 1, -kInf);
    suf.assign(l.size() + 1, -kInf);
    for (std::size_t i = 0; i < l.size(); ++i) pre[i + 1] = log_add_exp(pre[i], l[i]);
    for (std::size_t i = l.size(); i-- > 0;) suf[i] = log_add_exp(suf[i + 1], l[i]);
  };
  std::vector<double> pre_mu, suf_mu, pre_nu, suf_nu;
  tails(lmu, pre_mu, suf_mu);
  tails(lnu, pre_nu, suf_nu);
  // exp(x) − exp(y) for x ≥ y.
  auto gap = [](double x, double y) { return y == -kInf ? std::exp(x) : std::exp(x) * -std::expm1(y - x); };
  const double log_half = std::log(0.5);

  std::vector<double> dp(m + 1, 0.0);
  for (std::size_t e = 0; e < m; ++e) {
    double best = dp[e];
    double log_a = -kInf, log_b = -kInf;
    for (std::size_t j = lo[e]; j <= hi[e]; ++j) log_b = log_add_exp(log_b, lnu[j]);
    for (std::size_t s = e + 1; s-- > 0;) {
      log_a = log_add_exp(log_a, lmu[s]);
      if (s < e)
        for (std::size_t j = lo[s]; j < lo[s + 1]; ++j) log_b = log_add_exp(log_b, lnu[j]);
      if (log_a <= log_b) continue;
      double term;
      if (log_a < log_half) {
        term = gap(log_a, log_b);
      } else {
        // Both masses near one: μ(run) − ν(N) = ν(Nᶜ) − μ(runᶜ).
        const double out_b = log_add_exp(pre_nu[lo[s]], suf_nu[hi[e] + 1]);
        const double out_a = log_add_exp(pre_mu[s], suf_mu[e + 1]);
        term = out_b > out_a ? gap(out_b, out_a) : 0.0;
      }
      best = std::max(best, term + dp[sep[s]]);
    }
    dp[e + 1] = best;
  }
  out.value = std::clamp(dp[m], 0.0, 1.0);
  out.complement = std::clamp(matched, 0.0, 1.0);
  return true;
}

GnValue exact_gn_full(const NestedInstance& inst, double alpha) {
  GnValue out;
  if (banded_gn(inst.mu(), inst.nu(), inst.inner_cost(), alpha, out)) return out;
  const auto sol = ecp_masses(inst.mu().mass(), inst.nu().mass(), inst.inner_cost(), alpha);
  out.value = sol.value;
  out.complement = sol.matched;
  return out;
}

GnValue exact_gn_full(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha, int n) {
  return exact_gn_full(NestedInstance(p_x, p_y, c, n), alpha);
}

double exact_gn(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha, int n) {
  return exact_gn_full(p_x, p_y, c, alpha, n).value;
}

namespace {

std::vector<double> product_law(const Dist& p, int n) {
  std::size_t size = 1;
  for (int i = 0; i < n; ++i) size *= p.size();
  std::vector<double> law(size);
  for (std::size_t code = 0; code < size; ++code) {
    double m = 1.0;
    std::size_t rest = code;
    for (int i = 0; i < n; ++i) {
      m *= p[rest % p.size()];
      rest /= p.size();
    }
    law[code] = m;
  }
  return law;
}

}  // namespace

double direct_gn_oracle(const Dist& p_x, const Dist& p_y, const CostMatrix& c, double alpha, int n) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (c.rows() != p_x.size() || c.cols() != p_y.size())
    throw ValidationError("cost matrix and marginals differ in dimension");
  const double cells = std::pow(static_cast<double>(p_x.size()), n) * std::pow(static_cast<double>(p_y.size()), n);
  if (cells > kMaxProductSpace) throw SizeGuardError("product space exceeds the 1e6 guard");
  const auto lx = product_law(p_x, n), ly = product_law(p_y, n);
  Table cost(lx.size(), ly.size());
  for (std::size_t a = 0; a < lx.size(); ++a)
    for (std::size_t b = 0; b < ly.size(); ++b) {
      double s = 0.0;
      std::size_t ra = a, rb = b;
      for (int i = 0; i < n; ++i) {
        s += c(ra % p_x.size(), rb % p_y.size());
        ra /= p_x.size();
        rb /= p_y.size();
      }
      cost(a, b) = s / n;
    }
  return ecp_masses(lx, ly, cost, alpha).value;
}

std::vector<SeriesRow> exponent_series(const Dist& p_x, const Dist& p_y, const CostMatrix& c,
                                       const std::function<double(int)>& alpha_fn, const std::vector<int>& n_list,
                                       Tail mode, Exec exec) {
  std::vector<SeriesRow> rows(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    rows[i].n = n_list[i];
    rows[i].alpha = alpha_fn(n_list[i]);
  }
  // Validate sizes up front so a guard refusal is not thrown inside the team.
  for (int n : n_list) {
    if (n < 1) throw ValidationError("n must be >= 1");
    if (lattice_size(n, static_cast<int>(p_x.size())) > kMaxLatticeSize ||
        lattice_size(n, static_cast<int>(p_y.size())) > kMaxLatticeSize)
      throw SizeGuardError("type lattice for n=" + std::to_string(n) + " exceeds the 1e7 guard");
  }
  const auto count = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_budget()) if (exec == Exec::parallel)
  for (std::int64_t i = 0; i < count; ++i) {
    auto& r = rows[i];
    const NestedInstance inst(p_x, p_y, c, r.n, Exec::serial);
    const auto v = exact_gn_full(inst, r.alpha);
    r.g = v.value;
    r.complement = v.complement;
    const double tail = mode == Tail::lower ? v.complement : v.value;
    r.exponent = tail > 0.0 ? -std::log(tail) / r.n : kInf;
  }
  return rows;
}

RateCurve to_curve(const std::vector<SeriesRow>& rows, std::string meta) {
  RateCurve curve;
  curve.meta = std::move(meta);
  for (const auto& r : rows) curve.push(r.n, r.exponent);
  return curve;
}

}  // namespace strassen
