#pragma once

// Slow, independent reference computations used by the unit and acceptance
// tests. None of them share code with the library beyond the data types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pwspd/types.hpp"

namespace oracle {

using pwspd::Index;
inline constexpr double inf = std::numeric_limits<double>::infinity();

// Raw lengths of a graph as a dense matrix; +inf where there is no edge.
inline Eigen::MatrixXd adjacency(const pwspd::NeighborGraph& g) {
  const Index n = g.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(n, n, inf);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = 0.0;
    for (Index s = g.offset(i); s < g.offset(i + 1); ++s) a(i, g.target(s)) = g.length(s);
  }
  return a;
}

inline Eigen::MatrixXd euclidean(const pwspd::PointMatrix& x) {
  const Index n = x.rows();
  Eigen::MatrixXd a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = (x.row(i) - x.row(j)).norm();
  return a;
}

// Exhaustive minimum over every simple path of sum(leg^p), then the 1/p
// root. best[mask][v] is the cheapest path from s that visits exactly the
// vertices in mask and ends at v; every simple path is one such state.
inline Eigen::MatrixXd enumerate_paths(const Eigen::MatrixXd& len, double p) {
  const Index n = len.rows();
  const std::size_t states = std::size_t{1} << n;
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(n, n, inf);
  std::vector<double> best(states * static_cast<std::size_t>(n));
  for (Index s = 0; s < n; ++s) {
    std::fill(best.begin(), best.end(), inf);
    best[(std::size_t{1} << s) * n + s] = 0.0;
    for (std::size_t mask = 1; mask < states; ++mask) {
      if (!(mask >> s & 1)) continue;
      for (Index v = 0; v < n; ++v) {
        const double c = best[mask * n + v];
        if (c == inf) continue;
        out(s, v) = std::min(out(s, v), c);
        for (Index w = 0; w < n; ++w) {
          if (mask >> w & 1 || len(v, w) == inf || w == v) continue;
          const std::size_t next = mask | std::size_t{1} << w;
          best[next * n + w] = std::min(best[next * n + w], c + std::pow(len(v, w), p));
        }
      }
    }
  }
  return out.unaryExpr([p](double c) { return c == inf ? inf : std::pow(c, 1.0 / p); });
}

// Floyd-Warshall on powered lengths; returns the 1/p root.
inline Eigen::MatrixXd floyd_warshall(const Eigen::MatrixXd& len, double p) {
  const Index n = len.rows();
  Eigen::MatrixXd c = len.unaryExpr([p](double l) { return l == inf ? inf : std::pow(l, p); });
  for (Index m = 0; m < n; ++m)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) c(i, j) = std::min(c(i, j), c(i, m) + c(m, j));
  return c.unaryExpr([p](double v) { return v == inf ? inf : std::pow(v, 1.0 / p); });
}

// Minimax path value via a minimum spanning forest (Prim): the bottleneck of
// the unique tree path, +inf across components.
inline Eigen::MatrixXd mst_bottleneck(const Eigen::MatrixXd& len) {
  const Index n = len.rows();
  std::vector<std::vector<std::pair<Index, double>>> tree(n);
  std::vector<char> in(n, 0);
  std::vector<double> key(n, inf);
  std::vector<Index> parent(n, -1);
  for (Index root = 0; root < n; ++root) {
    if (in[root]) continue;
    key[root] = 0.0;
    for (;;) {
      Index u = -1;
      for (Index v = 0; v < n; ++v)
        if (!in[v] && key[v] < inf && (u < 0 || key[v] < key[u])) u = v;
      if (u < 0) break;
      in[u] = 1;
      if (parent[u] >= 0) {
        tree[u].emplace_back(parent[u], key[u]);
        tree[parent[u]].emplace_back(u, key[u]);
      }
      for (Index v = 0; v < n; ++v)
        if (!in[v] && v != u && len(u, v) < key[v]) {
          key[v] = len(u, v);
          parent[v] = u;
        }
    }
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(n, n, inf);
  for (Index s = 0; s < n; ++s) {
    out(s, s) = 0.0;
    std::vector<Index> stack{s};
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (auto [v, w] : tree[u])
        if (out(s, v) == inf && v != s) {
          out(s, v) = std::max(out(s, u), w);
          stack.push_back(v);
        }
    }
  }
  return out;
}

// Full sort of every other point by (squared distance, index).
inline std::vector<std::vector<Index>> knn_full_sort(const pwspd::PointMatrix& x, Index k) {
  const Index n = x.rows();
  std::vector<std::vector<Index>> out(n);
  for (Index i = 0; i < n; ++i) {
    std::vector<std::pair<double, Index>> all;
    for (Index j = 0; j < n; ++j)
      if (j != i) all.emplace_back((x.row(i) - x.row(j)).squaredNorm(), j);
    std::sort(all.begin(), all.end());
    for (Index r = 0; r < k; ++r) out[i].push_back(all[r].second);
  }
  return out;
}

// |a - b| <= tol * max(1, |b|), treating equal infinities as equal.
inline bool close(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

inline double max_rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) == b(i, j)) continue;
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::max(1.0, std::abs(b(i, j))));
    }
  return worst;
}

// Optimal 2-means of 1-D data: the optimal partition is a split of the
// sorted values, so try every split.
inline double two_means_1d(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double best = inf;
  for (std::size_t cut = 1; cut < v.size(); ++cut) {
    double cost = 0.0;
    for (auto [lo, hi] : {std::pair{std::size_t{0}, cut}, std::pair{cut, v.size()}}) {
      const double m = std::accumulate(v.begin() + lo, v.begin() + hi, 0.0) / static_cast<double>(hi - lo);
      for (std::size_t t = lo; t < hi; ++t) cost += (v[t] - m) * (v[t] - m);
    }
    best = std::min(best, cost);
  }
  return best;
}

}  // namespace oracle
