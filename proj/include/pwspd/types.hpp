#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pwspd {

/// Row-per-point storage; each row is one sample in ambient space.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Index = std::ptrdiff_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Thrown when an argument violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when input data cannot be parsed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A finite sample X = {x_i} with a declared intrinsic dimension.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(PointMatrix points, int intrinsic_dim,
             std::optional<std::vector<int>> labels = std::nullopt);

  Index size() const noexcept { return points_.rows(); }
  Index ambient_dim() const noexcept { return points_.cols(); }
  int intrinsic_dim() const noexcept { return intrinsic_dim_; }

  const PointMatrix& points() const noexcept { return points_; }
  auto point(Index i) const { return points_.row(i); }

  bool has_labels() const noexcept { return labels_.has_value(); }
  const std::vector<int>& labels() const;
  const std::optional<std::vector<int>>& maybe_labels() const noexcept { return labels_; }

 private:
  PointMatrix points_;
  int intrinsic_dim_ = 1;
  std::optional<std::vector<int>> labels_;
};

/// Dense symmetric matrix of pairwise metric values.
struct DistanceMatrix {
  Eigen::MatrixXd values;
  /// Power parameter; 1 for plain Euclidean input.
  double p = 1.0;
  bool euclidean = false;
  /// True when the n^{(p-1)/(pd)} scaling has been applied.
  bool normalized = false;
  /// Number of unreachable (+inf) off-diagonal pairs, counted once per pair.
  Index unreachable_pairs = 0;

  Index size() const noexcept { return values.rows(); }
  double operator()(Index i, Index j) const { return values(i, j); }
};

/// Symmetric neighbor graph in compressed adjacency form.
///
/// Stores raw (unpowered) edge lengths so one graph serves every p.
class NeighborGraph {
 public:
  struct Edge {
    Index i;
    Index j;
    double length;
  };

  /// Marker for the complete graph in place of a neighborhood size.
  static constexpr Index kComplete = -1;

  NeighborGraph() = default;
  /// Builds from an undirected edge list; duplicates and both orientations
  /// are merged. Zero-length edges and self-loops are dropped.
  NeighborGraph(Index n, const std::vector<Edge>& edges, Index k);

  /// Adopts ready-made compressed adjacency. Each row must be sorted by
  /// target, free of duplicates and self-loops, and the whole symmetric.
  static NeighborGraph from_adjacency(Index n, Index k, std::vector<Index> offsets, std::vector<Index> targets,
                                      std::vector<double> lengths);

  Index size() const noexcept { return n_; }
  Index k() const noexcept { return k_; }
  bool is_complete() const noexcept { return k_ == kComplete; }
  Index edge_count() const noexcept { return static_cast<Index>(targets_.size()) / 2; }

  /// Neighbors of node i, sorted by index.
  std::pair<const Index*, const Index*> neighbors(Index i) const {
    return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
  }
  Index offset(Index i) const { return offsets_[i]; }
  Index degree(Index i) const { return offsets_[i + 1] - offsets_[i]; }
  Index target(Index slot) const { return targets_[slot]; }
  double length(Index slot) const { return lengths_[slot]; }
  const std::vector<double>& lengths() const noexcept { return lengths_; }

  bool has_edge(Index i, Index j) const;
  /// Each undirected edge once, with i < j.
  std::vector<Edge> edges() const;

 private:
  Index n_ = 0;
  Index k_ = 0;
  std::vector<Index> offsets_{0};
  std::vector<Index> targets_;
  std::vector<double> lengths_;
};

}  // namespace pwspd
