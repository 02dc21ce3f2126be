#pragma once

#include <vector>

#include "pwspd/types.hpp"

namespace pwspd {

/// Ordered k-nearest-neighbor lists, row i holding the k nearest other
/// points of i (self excluded), ties broken by lower index.
struct KnnLists {
  Index n = 0;
  Index k = 0;
  std::vector<Index> index;     ///< n*k, row-major
  std::vector<double> distance; ///< n*k, same layout

  Index neighbor(Index i, Index r) const { return index[i * k + r]; }
  double dist(Index i, Index r) const { return distance[i * k + r]; }
};

/// Per-point distance to the k-th nearest neighbor.
struct ScaleVector {
  Eigen::VectorXd sigmas;
  Index k = 0;
};

/// kNN density estimate f_n(x_i) = k / (n vol(B_1^d) sigma_{i,k}^d).
struct DensityEstimate {
  Eigen::VectorXd values;
  Index k = 0;
  int d = 0;
};

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

/// Brute-force Euclidean kNN; the reference path.
KnnLists knn_lists_brute(const PointCloud& cloud, Index k);
/// Euclidean kNN. Uses a uniform-grid index for ambient dimension <= 3;
/// the result is identical to knn_lists_brute.
KnnLists knn_lists(const PointCloud& cloud, Index k);
/// kNN under a user-supplied metric (e.g. intrinsic distances).
KnnLists knn_lists(const DistanceMatrix& metric, Index k);

/// Symmetrized graph from neighbor lists: {i,j} kept when j is among the
/// first k of i's list or i among the first k of j's list.
NeighborGraph graph_from_lists(const KnnLists& lists, Index k);

NeighborGraph knn_graph(const PointCloud& cloud, Index k);
NeighborGraph knn_graph(const DistanceMatrix& metric, Index k);
NeighborGraph complete_graph(const PointCloud& cloud);
NeighborGraph complete_graph(const DistanceMatrix& metric);

ScaleVector knn_scales(const PointCloud& cloud, Index k);
DensityEstimate knn_density(const PointCloud& cloud, Index k);

}  // namespace pwspd
