#include "pwspd/neighbors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "pwspd/core.hpp"
#include "pwspd/parallel.hpp"

namespace pwspd {

namespace {

using Candidate = std::pair<double, Index>;  // (squared distance, index)

void check_k(Index n, Index k) {
  if (k < 1 || k > n - 1)
    throw InvalidArgument("k must satisfy 1 <= k <= n-1 (k=" + std::to_string(k) + ", n=" + std::to_string(n) +
                          ")");
}

void write_row(KnnLists& out, Index i, std::vector<Candidate>& best, bool squared) {
  std::sort(best.begin(), best.end());
  for (Index r = 0; r < out.k; ++r) {
    out.index[i * out.k + r] = best[r].second;
    out.distance[i * out.k + r] = squared ? std::sqrt(best[r].first) : best[r].first;
  }
}

KnnLists make_lists(Index n, Index k) {
  KnnLists out;
  out.n = n;
  out.k = k;
  out.index.resize(static_cast<std::size_t>(n * k));
  out.distance.resize(static_cast<std::size_t>(n * k));
  return out;
}

/// Uniform grid over the bounding box, points bucketed by cell.
class Grid {
 public:
  Grid(const PointMatrix& pts, Index target_per_cell) : pts_(pts), dims_(pts.cols()) {
    const Index n = pts.rows();
    lo_.fill(0.0);
    double extent = 0.0;
    for (Index c = 0; c < dims_; ++c) {
      lo_[c] = pts.col(c).minCoeff();
      extent = std::max(extent, pts.col(c).maxCoeff() - lo_[c]);
    }
    const double cells_total = std::max(1.0, static_cast<double>(n) / static_cast<double>(target_per_cell));
    Index per_dim = std::max<Index>(1, static_cast<Index>(std::floor(std::pow(cells_total, 1.0 / dims_))));
    cell_ = extent > 0.0 ? extent / static_cast<double>(per_dim) : 1.0;
    if (extent == 0.0) per_dim = 1;
    for (Index c = 0; c < dims_; ++c) count_[c] = per_dim;
    const Index total = count_[0] * count_[1] * count_[2];
    start_.assign(static_cast<std::size_t>(total) + 1, 0);
    cell_of_.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      cell_of_[i] = flat(coords(i));
      ++start_[cell_of_[i] + 1];
    }
    for (Index c = 0; c < total; ++c) start_[c + 1] += start_[c];
    members_.resize(static_cast<std::size_t>(n));
    std::vector<Index> fill(start_.begin(), start_.end() - 1);
    for (Index i = 0; i < n; ++i) members_[fill[cell_of_[i]]++] = i;
  }

  std::array<Index, 3> coords(Index i) const {
    std::array<Index, 3> c{0, 0, 0};
    for (Index a = 0; a < dims_; ++a) {
      const Index v = static_cast<Index>(std::floor((pts_(i, a) - lo_[a]) / cell_));
      c[a] = std::clamp<Index>(v, 0, count_[a] - 1);
    }
    return c;
  }

  Index flat(const std::array<Index, 3>& c) const { return (c[2] * count_[1] + c[1]) * count_[0] + c[0]; }

  /// Nearest k other points of i, as (squared distance, index), unsorted.
  void query(Index i, Index k, std::vector<Candidate>& heap) const {
    heap.clear();
    const auto home = coords(i);
    const Index max_ring = std::max({count_[0], count_[1], count_[2]});
    auto visit_cell = [&](const std::array<Index, 3>& c) {
      const Index f = flat(c);
      for (Index s = start_[f]; s < start_[f + 1]; ++s) {
        const Index j = members_[s];
        if (j == i) continue;
        const Candidate cand{squared_distance(pts_, i, j), j};
        if (static_cast<Index>(heap.size()) < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end());
        }
      }
    };
    for (Index r = 0; r <= max_ring; ++r) {
      std::array<Index, 3> lo{}, hi{};
      for (Index a = 0; a < 3; ++a) {
        lo[a] = std::max<Index>(0, home[a] - r);
        hi[a] = std::min<Index>(count_[a] - 1, home[a] + r);
      }
      std::array<Index, 3> c{};
      for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2])
        for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1]) {
          const bool inner_yz = std::abs(c[1] - home[1]) < r && std::abs(c[2] - home[2]) < r;
          if (inner_yz) {
            // Only the two x-extremes of this row lie on ring r.
            for (Index x : {home[0] - r, home[0] + r})
              if (x >= 0 && x < count_[0]) {
                c[0] = x;
                visit_cell(c);
              }
          } else {
            for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0]) visit_cell(c);
          }
        }
      if (static_cast<Index>(heap.size()) == k) {
        // Unvisited cells are at least r * cell_ away from point i.
        const double reach = static_cast<double>(r) * cell_;
        if (heap.front().first < reach * reach * (1.0 - 1e-9)) return;
      }
    }
  }

  Index cell_count() const { return static_cast<Index>(start_.size()) - 1; }
  double cell_size() const { return cell_; }

  /// Answers every point of one cell from the candidates in the surrounding
  /// 3^D block. Points whose k-th neighbor is not provably inside the block
  /// are left in `deferred` for the ring-by-ring query.
  void query_cell(Index cell, Index k, KnnLists& out, std::vector<Index>& deferred) const {
    if (start_[cell] == start_[cell + 1]) return;
    const Index first = members_[start_[cell]];
    const auto home = coords(first);
    std::vector<Index> pool;
    std::array<Index, 3> c{};
    for (c[2] = std::max<Index>(0, home[2] - 1); c[2] <= std::min(count_[2] - 1, home[2] + 1); ++c[2])
      for (c[1] = std::max<Index>(0, home[1] - 1); c[1] <= std::min(count_[1] - 1, home[1] + 1); ++c[1])
        for (c[0] = std::max<Index>(0, home[0] - 1); c[0] <= std::min(count_[0] - 1, home[0] + 1); ++c[0]) {
          const Index f = flat(c);
          pool.insert(pool.end(), members_.begin() + start_[f], members_.begin() + start_[f + 1]);
        }
    const double bound = cell_ * cell_ * (1.0 - 1e-9);
    std::vector<Candidate> cand;
    for (Index s = start_[cell]; s < start_[cell + 1]; ++s) {
      const Index i = members_[s];
      if (static_cast<Index>(pool.size()) - 1 < k) {
        deferred.push_back(i);
        continue;
      }
      cand.clear();
      for (Index j : pool)
        if (j != i) cand.emplace_back(squared_distance(pts_, i, j), j);
      std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
      if (!(cand[k - 1].first < bound)) {
        deferred.push_back(i);
        continue;
      }
      cand.resize(static_cast<std::size_t>(k));
      write_row(out, i, cand, true);
    }
  }

 private:
  const PointMatrix& pts_;
  Index dims_;
  std::array<double, 3> lo_{};
  std::array<Index, 3> count_{1, 1, 1};
  double cell_ = 1.0;
  std::vector<Index> start_;
  std::vector<Index> cell_of_;
  std::vector<Index> members_;
};

}  // namespace

double unit_ball_volume(int d) {
  const double h = 0.5 * d;
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

KnnLists knn_lists_brute(const PointCloud& cloud, Index k) {
  const Index n = cloud.size();
  check_k(n, k);
  KnnLists out = make_lists(n, k);
  const auto& pts = cloud.points();
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
    const Index i = static_cast<Index>(ui);
    std::vector<Candidate> all;
    all.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j)
      if (j != i) all.emplace_back(squared_distance(pts, i, j), j);
    std::nth_element(all.begin(), all.begin() + (k - 1), all.end());
    all.resize(static_cast<std::size_t>(k));
    write_row(out, i, all, true);
  });
  return out;
}

KnnLists knn_lists(const PointCloud& cloud, Index k) {
  const Index n = cloud.size();
  check_k(n, k);
  if (cloud.ambient_dim() > 3 || n < 64) return knn_lists_brute(cloud, k);
  KnnLists out = make_lists(n, k);
  const Grid grid(cloud.points(), std::max<Index>(4, k / 2));
  const auto cells = static_cast<std::size_t>(grid.cell_count());
  std::vector<std::vector<Index>> deferred(cells);
  parallel_for(cells, [&](std::size_t c) { grid.query_cell(static_cast<Index>(c), k, out, deferred[c]); });
  std::vector<Index> rest;
  for (const auto& d : deferred) rest.insert(rest.end(), d.begin(), d.end());
  parallel_for(rest.size(), [&](std::size_t t) {
    thread_local std::vector<Candidate> heap;
    grid.query(rest[t], k, heap);
    write_row(out, rest[t], heap, true);
  });
  return out;
}

KnnLists knn_lists(const DistanceMatrix& metric, Index k) {
  const Index n = metric.size();
  if (metric.values.cols() != n) throw InvalidArgument("metric matrix must be square");
  if (metric.values != metric.values.transpose())
    throw InvalidArgument("metric matrix must be symmetric");
  check_k(n, k);
  KnnLists out = make_lists(n, k);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
    const Index i = static_cast<Index>(ui);
    std::vector<Candidate> all;
    all.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j)
      if (j != i) all.emplace_back(metric.values(i, j), j);
    std::nth_element(all.begin(), all.begin() + (k - 1), all.end());
    all.resize(static_cast<std::size_t>(k));
    write_row(out, i, all, false);
  });
  return out;
}

NeighborGraph graph_from_lists(const KnnLists& lists, Index k) {
  if (k < 1 || k > lists.k) throw InvalidArgument("k exceeds the neighbor list length");
  const Index n = lists.n;
  // Reverse lists: who names i among their first k neighbors.
  std::vector<Index> rev_offsets(static_cast<std::size_t>(n) + 1, 0);
  for (Index i = 0; i < n; ++i)
    for (Index r = 0; r < k; ++r)
      if (lists.dist(i, r) > 0.0) ++rev_offsets[lists.neighbor(i, r) + 1];
  for (Index i = 0; i < n; ++i) rev_offsets[i + 1] += rev_offsets[i];
  std::vector<std::pair<Index, double>> rev(static_cast<std::size_t>(rev_offsets[n]));
  {
    std::vector<Index> fill(rev_offsets.begin(), rev_offsets.end() - 1);
    for (Index i = 0; i < n; ++i)
      for (Index r = 0; r < k; ++r)
        if (lists.dist(i, r) > 0.0) rev[fill[lists.neighbor(i, r)]++] = {i, lists.dist(i, r)};
  }
  std::vector<Index> offsets(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> targets;
  std::vector<double> lengths;
  targets.reserve(static_cast<std::size_t>(2 * n * k));
  lengths.reserve(static_cast<std::size_t>(2 * n * k));
  std::vector<std::pair<Index, double>> row;
  for (Index i = 0; i < n; ++i) {
    row.clear();
    for (Index r = 0; r < k; ++r)
      if (lists.dist(i, r) > 0.0) row.emplace_back(lists.neighbor(i, r), lists.dist(i, r));
    row.insert(row.end(), rev.begin() + rev_offsets[i], rev.begin() + rev_offsets[i + 1]);
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (t > 0 && row[t].first == row[t - 1].first) continue;
      targets.push_back(row[t].first);
      lengths.push_back(row[t].second);
    }
    offsets[i + 1] = static_cast<Index>(targets.size());
  }
  return NeighborGraph::from_adjacency(n, k == n - 1 ? NeighborGraph::kComplete : k, std::move(offsets),
                                       std::move(targets), std::move(lengths));
}

NeighborGraph knn_graph(const PointCloud& cloud, Index k) { return graph_from_lists(knn_lists(cloud, k), k); }

NeighborGraph knn_graph(const DistanceMatrix& metric, Index k) {
  return graph_from_lists(knn_lists(metric, k), k);
}

NeighborGraph complete_graph(const PointCloud& cloud) {
  const Index n = cloud.size();
  const auto& pts = cloud.points();
  std::vector<NeighborGraph::Edge> edges;
  edges.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) edges.push_back({i, j, std::sqrt(squared_distance(pts, i, j))});
  return NeighborGraph(n, edges, NeighborGraph::kComplete);
}

NeighborGraph complete_graph(const DistanceMatrix& metric) {
  const Index n = metric.size();
  if (metric.values != metric.values.transpose()) throw InvalidArgument("metric matrix must be symmetric");
  std::vector<NeighborGraph::Edge> edges;
  edges.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) edges.push_back({i, j, metric.values(i, j)});
  return NeighborGraph(n, edges, NeighborGraph::kComplete);
}

ScaleVector knn_scales(const PointCloud& cloud, Index k) {
  const KnnLists lists = knn_lists(cloud, k);
  ScaleVector out;
  out.k = k;
  out.sigmas.resize(cloud.size());
  for (Index i = 0; i < cloud.size(); ++i) out.sigmas[i] = lists.dist(i, k - 1);
  return out;
}

DensityEstimate knn_density(const PointCloud& cloud, Index k) {
  const ScaleVector scales = knn_scales(cloud, k);
  const Index n = cloud.size();
  const int d = cloud.intrinsic_dim();
  const double denom = static_cast<double>(n) * unit_ball_volume(d);
  DensityEstimate out;
  out.k = k;
  out.d = d;
  out.values.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double s = scales.sigmas[i];
    if (!(s > 0.0))
      throw InvalidArgument("duplicate points give a zero k-th neighbor distance at index " + std::to_string(i));
    out.values[i] = static_cast<double>(k) / (denom * std::pow(s, d));
  }
  return out;
}

}  // namespace pwspd
