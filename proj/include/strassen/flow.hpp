#pragma once

// Network-flow kernels shared by the transport, nested-formula and
// moderate-deviation layers. Both solvers are templated on the capacity type:
// double for probability masses, std::int64_t for the exact integral mode
// (marginals rescaled to a common denominator, or type counts).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

namespace strassen {

/// Dinic's blocking-flow max-flow.
template <class Cap>
class MaxFlow {
 public:
  /// Residual capacities at or below `eps` count as saturated.
  explicit MaxFlow(std::size_t nodes, Cap eps = Cap{}) : adj_(nodes), eps_(eps) {}

  std::size_t add_edge(std::size_t from, std::size_t to, Cap cap) {
    const std::size_t id = edges_.size();
    edges_.push_back({to, cap});
    edges_.push_back({from, Cap{}});
    original_.push_back(cap);
    original_.push_back(Cap{});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
  }

  Cap run(std::size_t s, std::size_t t) {
    Cap total{};
    while (bfs(s, t)) {
      it_.assign(adj_.size(), 0);
      for (;;) {
        const Cap pushed = dfs(s, t, std::numeric_limits<Cap>::max());
        if (!(pushed > eps_)) break;
        total += pushed;
      }
    }
    return total;
  }

  Cap flow(std::size_t edge) const { return original_[edge] - edges_[edge].cap; }

  /// Nodes reachable from `s` in the residual graph: the source side of a
  /// minimum cut once run() has returned.
  std::vector<bool> source_side(std::size_t s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t id : adj_[u]) {
        const auto& e = edges_[id];
        if (e.cap > eps_ && !seen[e.to]) {
          seen[e.to] = true;
          stack.push_back(e.to);
        }
      }
    }
    return seen;
  }

  std::size_t nodes() const { return adj_.size(); }

 private:
  struct Edge {
    std::size_t to;
    Cap cap;
  };

  bool bfs(std::size_t s, std::size_t t) {
    level_.assign(adj_.size(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t id : adj_[u]) {
        const auto& e = edges_[id];
        if (e.cap > eps_ && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  Cap dfs(std::size_t u, std::size_t t, Cap limit) {
    if (u == t) return limit;
    for (std::size_t& i = it_[u]; i < adj_[u].size(); ++i) {
      const std::size_t id = adj_[u][i];
      auto& e = edges_[id];
      if (e.cap > eps_ && level_[e.to] == level_[u] + 1) {
        const Cap got = dfs(e.to, t, std::min(limit, e.cap));
        if (got > eps_) {
          e.cap -= got;
          edges_[id ^ 1].cap += got;
          return got;
        }
      }
    }
    return Cap{};
  }

  std::vector<Edge> edges_;
  std::vector<Cap> original_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
  Cap eps_;
};

/// Successive shortest paths with Johnson potentials. Arc costs may be
/// negative (Bellman-Ford seeds the potentials); a negative cycle reachable
/// from the source is reported rather than followed.
template <class Cap>
class MinCostFlow {
 public:
  struct Result {
    Cap flow{};
    double cost = 0.0;
    bool negative_cycle = false;
  };

  explicit MinCostFlow(std::size_t nodes, Cap eps = Cap{}) : adj_(nodes), eps_(eps) {}

  std::size_t add_edge(std::size_t from, std::size_t to, Cap cap, double cost) {
    const std::size_t id = edges_.size();
    edges_.push_back({from, to, cap, cost});
    edges_.push_back({to, from, Cap{}, -cost});
    original_.push_back(cap);
    original_.push_back(Cap{});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
  }

  /// Sends up to `limit` units from s to t at minimum cost.
  Result run(std::size_t s, std::size_t t, Cap limit) {
    const std::size_t n = adj_.size();
    Result res;
    potential_.assign(n, 0.0);
    if (!bellman_ford(s)) {
      res.negative_cycle = true;
      return res;
    }
    std::vector<double> dist(n);
    std::vector<std::size_t> via(n);
    std::vector<bool> done(n);
    while (limit - res.flow > eps_) {
      std::fill(dist.begin(), dist.end(), kUnreached);
      std::fill(done.begin(), done.end(), false);
      dist[s] = 0.0;
      for (;;) {
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v)
          if (!done[v] && dist[v] < kUnreached && (u == n || dist[v] < dist[u])) u = v;
        if (u == n) break;
        done[u] = true;
        for (std::size_t id : adj_[u]) {
          const auto& e = edges_[id];
          if (!(e.cap > eps_) || done[e.to]) continue;
          const double reduced = std::max(0.0, e.cost + potential_[u] - potential_[e.to]);
          if (dist[u] + reduced < dist[e.to]) {
            dist[e.to] = dist[u] + reduced;
            via[e.to] = id;
          }
        }
      }
      if (!(dist[t] < kUnreached)) break;
      double reached_max = 0.0;
      for (std::size_t v = 0; v < n; ++v)
        if (dist[v] < kUnreached) reached_max = std::max(reached_max, dist[v]);
      for (std::size_t v = 0; v < n; ++v)
        potential_[v] += dist[v] < kUnreached ? dist[v] : reached_max;

      Cap push = limit - res.flow;
      for (std::size_t v = t; v != s; v = edges_[via[v]].from) push = std::min(push, edges_[via[v]].cap);
      for (std::size_t v = t; v != s; v = edges_[via[v]].from) {
        edges_[via[v]].cap -= push;
        edges_[via[v] ^ 1].cap += push;
      }
      res.flow += push;
    }
    for (std::size_t id = 0; id < edges_.size(); id += 2)
      res.cost += static_cast<double>(flow(id)) * edges_[id].cost;
    return res;
  }

  Cap flow(std::size_t edge) const { return original_[edge] - edges_[edge].cap; }
  const std::vector<double>& potentials() const { return potential_; }

 private:
  static constexpr double kUnreached = std::numeric_limits<double>::infinity();

  struct Edge {
    std::size_t from;
    std::size_t to;
    Cap cap;
    double cost;
  };

  bool bellman_ford(std::size_t s) {
    const std::size_t n = adj_.size();
    std::vector<double> d(n, kUnreached);
    d[s] = 0.0;
    for (std::size_t round = 0; round <= n; ++round) {
      bool changed = false;
      for (const auto& e : edges_) {
        if (!(e.cap > eps_) || !(d[e.from] < kUnreached)) continue;
        if (d[e.from] + e.cost < d[e.to] - 1e-12) {
          d[e.to] = d[e.from] + e.cost;
          changed = true;
        }
      }
      if (!changed) {
        for (std::size_t v = 0; v < n; ++v) potential_[v] = d[v] < kUnreached ? d[v] : 0.0;
        return true;
      }
    }
    return false;
  }

  std::vector<Edge> edges_;
  std::vector<Cap> original_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<double> potential_;
  Cap eps_;
};

extern template class MaxFlow<double>;
extern template class MaxFlow<std::int64_t>;
extern template class MinCostFlow<double>;
extern template class MinCostFlow<std::int64_t>;

}  // namespace strassen
