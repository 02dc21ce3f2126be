#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include "pwspd/types.hpp"

namespace pwspd {

/// Pairwise 2-norm distances between the rows of `rows`.
///
/// Differences are formed explicitly (no Gram-matrix shortcut) so the
/// diagonal is exactly zero and duplicates give exactly zero.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> pairwise_distances(
    const Eigen::MatrixBase<Derived>& rows) {
  using Scalar = typename Derived::Scalar;
  const Index n = rows.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
  for (Index i = 0; i < n; ++i) {
    out(i, i) = Scalar(0);
    for (Index j = i + 1; j < n; ++j) {
      const Scalar d = (rows.row(i) - rows.row(j)).norm();
      out(i, j) = d;
      out(j, i) = d;
    }
  }
  return out;
}

DistanceMatrix pairwise_euclidean(const PointCloud& cloud);

/// Squared Euclidean distance between two points of a cloud. Every
/// neighbor search in the library ranks by this exact expression.
inline double squared_distance(const PointMatrix& pts, Index i, Index j) {
  double s = 0.0;
  for (Index c = 0; c < pts.cols(); ++c) {
    const double t = pts(i, c) - pts(j, c);
    s += t * t;
  }
  return s;
}

struct PowerOptions {
  /// Accept 0 < p < 1, where l_p is no longer a metric (l_p^p still is).
  bool allow_non_metric = false;
};

/// Checks p against the metric/non-metric rules; throws InvalidArgument.
void validate_power(double p, PowerOptions options = {});

/// Edge weights length^p, aligned with the graph's adjacency slots.
std::vector<double> power_weights(const NeighborGraph& graph, double p, PowerOptions options = {});

// --- I/O --------------------------------------------------------------------

struct CsvOptions {
  /// Treat the final column as an integer cluster label.
  bool label_column = false;
};

/// Parses the header-less point CSV format. Lines starting with '#' and
/// blank lines are skipped.
PointCloud parse_point_cloud(std::istream& in, int intrinsic_dim, CsvOptions options = {});
PointCloud load_point_cloud(const std::string& path, int intrinsic_dim, CsvOptions options = {});

/// Writes one point per row using shortest round-trip decimal form.
void write_point_cloud(std::ostream& out, const PointCloud& cloud);

void write_distance_csv(std::ostream& out, const DistanceMatrix& dist);
/// Reads a dense square CSV matrix (comment lines allowed).
DistanceMatrix parse_distance_csv(std::istream& in);

/// FNV-1a over the IEEE-754 bit patterns of the values in row-major order,
/// as 16 lowercase hex digits.
std::string checksum(const Eigen::MatrixXd& values);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace pwspd
