#pragma once

#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace bbqec {

/// Maximum-cardinality bipartite matching (Hopcroft-Karp).
///
/// Left vertices are 0..adj.size()-1, right vertices 0..num_right-1. Adjacency
/// lists are visited in the order given, so sorted lists give reproducible results.
class HopcroftKarp {
 public:
  HopcroftKarp(const std::vector<std::vector<int>>& adj, int num_right)
      : adj_(adj), num_left_(static_cast<int>(adj.size())), num_right_(num_right) {}
  // Holds a reference to the adjacency lists; they must outlive the matcher.
  HopcroftKarp(std::vector<std::vector<int>>&&, int) = delete;

  /// Returns the matching size; match_left()[u] is the partner of u or -1.
  int solve() {
    match_left_.assign(static_cast<std::size_t>(num_left_), -1);
    match_right_.assign(static_cast<std::size_t>(num_right_), -1);
    dist_.assign(static_cast<std::size_t>(num_left_), 0);
    int size = 0;
    while (bfs()) {
      it_.assign(static_cast<std::size_t>(num_left_), 0);
      for (int u = 0; u < num_left_; ++u)
        if (match_left_[static_cast<std::size_t>(u)] < 0 && dfs(u)) ++size;
    }
    return size;
  }

  const std::vector<int>& match_left() const { return match_left_; }
  const std::vector<int>& match_right() const { return match_right_; }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max();

  bool bfs() {
    std::queue<int> q;
    for (int u = 0; u < num_left_; ++u) {
      if (match_left_[static_cast<std::size_t>(u)] < 0) {
        dist_[static_cast<std::size_t>(u)] = 0;
        q.push(u);
      } else {
        dist_[static_cast<std::size_t>(u)] = kInf;
      }
    }
    bool found = false;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj_[static_cast<std::size_t>(u)]) {
        const int w = match_right_[static_cast<std::size_t>(v)];
        if (w < 0) {
          found = true;
        } else if (dist_[static_cast<std::size_t>(w)] == kInf) {
          dist_[static_cast<std::size_t>(w)] = dist_[static_cast<std::size_t>(u)] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  bool dfs(int u) {
    auto& next = it_[static_cast<std::size_t>(u)];
    const auto& nbrs = adj_[static_cast<std::size_t>(u)];
    for (; next < nbrs.size(); ++next) {
      const int v = nbrs[next];
      const int w = match_right_[static_cast<std::size_t>(v)];
      if (w < 0 || (dist_[static_cast<std::size_t>(w)] == dist_[static_cast<std::size_t>(u)] + 1 && dfs(w))) {
        match_left_[static_cast<std::size_t>(u)] = v;
        match_right_[static_cast<std::size_t>(v)] = u;
        ++next;
        return true;
      }
    }
    dist_[static_cast<std::size_t>(u)] = kInf;
    return false;
  }

  const std::vector<std::vector<int>>& adj_;
  int num_left_;
  int num_right_;
  std::vector<int> match_left_;
  std::vector<int> match_right_;
  std::vector<int> dist_;
  std::vector<std::size_t> it_;
};

/// Minimum-cost perfect assignment on a square cost matrix (row-major, n x n),
/// shortest augmenting path form of the Hungarian method, O(n^3).
/// Entries equal to +infinity are forbidden. Returns the column assigned to
/// each row; throws if no finite-cost perfect assignment exists.
inline std::vector<int> min_cost_assignment(std::span<const double> cost, int n) {
  if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != cost.size())
    throw std::invalid_argument("assignment cost matrix must be square");
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto N = static_cast<std::size_t>(n);
  // 1-based potentials; column 0 is a virtual root.
  std::vector<double> u(N + 1, 0.0), v(N + 1, 0.0), minv(N + 1);
  std::vector<std::size_t> p(N + 1, 0), way(N + 1, 0);
  std::vector<char> used(N + 1);
  for (std::size_t i = 1; i <= N; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= N; ++j) {
        if (used[j]) continue;
        const double c = cost[(i0 - 1) * N + (j - 1)];
        if (c < inf) {
          const double cur = c - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0 || delta == inf) throw std::runtime_error("no feasible perfect assignment");
      for (std::size_t j = 0; j <= N; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(N, -1);
  for (std::size_t j = 1; j <= N; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  return row_to_col;
}

}  // namespace bbqec
