#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace imcf {

/// Dinic maximum flow with double capacities.
///
/// Residual capacities at or below `tolerance` are treated as saturated, so
/// rounding noise from augmenting real-valued capacities does not leave
/// phantom paths. The residual graph after `solve` yields the two extremal
/// minimum cuts.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : adj_(nodes), level_(nodes), iter_(nodes) {}

  std::size_t size() const { return adj_.size(); }

  void add_edge(std::size_t from, std::size_t to, double cap, double reverse_cap = 0.0) {
    if (cap <= 0.0 && reverse_cap <= 0.0) return;
    adj_[from].push_back(edges_.size());
    edges_.push_back({to, cap});
    adj_[to].push_back(edges_.size());
    edges_.push_back({from, reverse_cap});
    max_cap_ = std::max({max_cap_, cap, reverse_cap});
  }

  double solve(std::size_t s, std::size_t t, double relative_tolerance = 1e-12) {
    tol_ = relative_tolerance * max_cap_;
    double flow = 0.0;
    while (bfs(s, t)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      while (true) {
        const double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= tol_) break;
        flow += f;
      }
    }
    return flow;
  }

  /// Nodes reachable from s in the residual graph (the minimal source side).
  std::vector<bool> source_side(std::size_t s) const {
    std::vector<bool> seen(size(), false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t e : adj_[v]) {
        const Edge& ed = edges_[e];
        if (ed.cap > tol_ && !seen[ed.to]) {
          seen[ed.to] = true;
          stack.push_back(ed.to);
        }
      }
    }
    return seen;
  }

  /// Nodes that cannot reach t in the residual graph (the maximal source side).
  std::vector<bool> not_reaching_sink(std::size_t t) const {
    std::vector<bool> reach(size(), false);
    std::vector<std::size_t> stack{t};
    reach[t] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t e : adj_[v]) {
        // Edge v -> w paired with w -> v at e ^ 1; w reaches v if that has residual.
        const std::size_t w = edges_[e].to;
        if (!reach[w] && edges_[e ^ 1].cap > tol_) {
          reach[w] = true;
          stack.push_back(w);
        }
      }
    }
    reach.flip();
    return reach;
  }

 private:
  struct Edge {
    std::size_t to;
    double cap;
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      for (std::size_t e : adj_[v]) {
        const Edge& ed = edges_[e];
        if (ed.cap > tol_ && level_[ed.to] < 0) {
          level_[ed.to] = level_[v] + 1;
          q.push(ed.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  // Iterative blocking-flow search; path graphs make recursion depth O(V).
  double dfs(std::size_t s, std::size_t t, double limit) {
    std::vector<std::size_t> path;  // edge indices
    std::size_t v = s;
    while (true) {
      if (v == t) {
        double f = limit;
        for (std::size_t e : path) f = std::min(f, edges_[e].cap);
        for (std::size_t e : path) {
          edges_[e].cap -= f;
          edges_[e ^ 1].cap += f;
        }
        return f;
      }
      bool advanced = false;
      for (; iter_[v] < adj_[v].size(); ++iter_[v]) {
        const std::size_t e = adj_[v][iter_[v]];
        const Edge& ed = edges_[e];
        if (ed.cap > tol_ && level_[ed.to] == level_[v] + 1) {
          path.push_back(e);
          v = ed.to;
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      // Dead end: retreat and skip the edge that led here.
      level_[v] = -1;
      if (path.empty()) return 0.0;
      const std::size_t back = path.back();
      path.pop_back();
      v = edges_[back ^ 1].to;
      ++iter_[v];
    }
  }

  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
  double max_cap_ = 0.0;
  double tol_ = 0.0;
};

}  // namespace imcf
