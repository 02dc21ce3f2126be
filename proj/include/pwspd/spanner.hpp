#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pwspd/neighbors.hpp"
#include "pwspd/types.hpp"

namespace pwspd {

/// Inputs to the kNN 1-spanner sufficient condition.
struct SpannerParams {
  double p = 2.0;
  int d = 2;
  Index n = 2;
  double kappa = 1.0;          ///< manifold regularity constant
  double density_ratio = 1.0;  ///< f_max / f_min
};

/// Coefficient of log(n) in the sufficient neighborhood size:
/// kappa^2 * 3 * ratio * (4 / (4^{1-1/p} - 1))^{d/2}.
double theoretical_k_slope(const SpannerParams& params);

/// 1 + slope * log(n). Callers take the ceiling.
double theoretical_k_euclidean(const SpannerParams& params);

/// Intrinsic-metric limit form: the Euclidean formula with kappa = 1.
double theoretical_k_intrinsic(const SpannerParams& params);

/// ceil(theoretical_k_euclidean), clamped to n - 1.
Index required_k(const SpannerParams& params);

/// Radius of the ball about the midpoint of x, y (|x - y| = s) contained in
/// the p-elongated set {z : |x-z|^p + |z-y|^p <= alpha |x-y|^p}.
/// Zero when that ball is empty.
double elongated_ball_radius(double s, double alpha, double p);

/// True iff the direct edge {i, j} attains l_p^p(i, j) in the complete graph,
/// to relative tolerance 1e-12.
bool is_critical_edge(const PointCloud& cloud, double p, Index i, Index j);

/// All critical edges (i < j) of the complete graph.
std::vector<std::pair<Index, Index>> critical_edges(const PointCloud& cloud, double p);

inline constexpr double kSpannerTolerance = 1e-10;

/// Reusable 1-spanner test of kNN subgraphs of one sample at one p.
///
/// A subgraph H is a 1-spanner of the complete graph exactly when every
/// pair {i, j} admits an H-path no longer than |x_i - x_j| in l_p. Pairs
/// with a strictly cheaper two-hop detour through a listed neighbor cannot
/// be the sole shortest path, so only the remaining candidate pairs are
/// tested, each by a Dijkstra run bounded at its own edge cost.
class SpannerChecker {
 public:
  SpannerChecker(const PointCloud& cloud, double p, Index k_max);

  /// Whether the kNN graph with k <= k_max neighbors is a 1-spanner, with
  /// |l_p - l_p^H| compared against tol.
  bool is_spanner(Index k, double tol = kSpannerTolerance) const;

  /// Smallest k in the ascending grid for which is_spanner holds, or -1.
  Index first_spanner_k(const std::vector<Index>& k_grid, double tol = kSpannerTolerance) const;

  std::size_t candidate_count() const noexcept { return candidates_.size(); }
  Index k_max() const noexcept { return lists_.k; }

 private:
  struct Candidate {
    Index i;
    Index j;
    double length;
    Index rank;  ///< smallest neighbor-list rank linking i and j; k_max if none
  };

  const PointCloud& cloud_;
  double p_;
  KnnLists lists_;
  std::vector<Candidate> candidates_;
};

/// Success iff the kNN graph reproduces every complete-graph l_p value to
/// within tol. A disconnected kNN graph is a failure.
bool verify_one_spanner(const PointCloud& cloud, double p, Index k, double tol = kSpannerTolerance);

/// Literal check: both all-pairs matrices, compared entrywise. O(n^3).
bool verify_one_spanner_all_pairs(const PointCloud& cloud, double p, Index k, double tol = kSpannerTolerance);

enum class SampleDistribution { UniformCube, Sphere, Gaussian };

SampleDistribution parse_distribution(const std::string& name);
std::string to_string(SampleDistribution dist);

/// n i.i.d. points in R^dim: uniform on [0,1]^dim, uniform on the unit sphere
/// S^{dim-1} (intrinsic dimension dim-1), or standard Gaussian.
PointCloud sample_distribution(SampleDistribution dist, int dim, Index n, std::uint64_t seed);

struct HeatmapResult {
  std::vector<Index> n_grid;
  std::vector<Index> k_grid;
  /// success_fraction[a][b] for n_grid[a], k_grid[b].
  std::vector<std::vector<double>> success_fraction;
  Index trials_per_cell = 0;
  /// Per n: the first k with every trial successful, or -1.
  std::vector<Index> first_all_success_k;
  /// Least-squares slope of first_all_success_k against log(n).
  double transition_slope = 0.0;
  double transition_intercept = 0.0;
  /// n columns with no all-success k, left out of the fit.
  Index skipped_columns = 0;
};

struct HeatmapConfig {
  int dim = 3;
  double p = 2.0;
  SampleDistribution distribution = SampleDistribution::UniformCube;
  std::vector<Index> n_grid;
  std::vector<Index> k_grid;
  Index trials = 20;
  std::uint64_t seed = 0;
  double tol = kSpannerTolerance;
  /// Called after each n column with a one-line status.
  std::function<void(const std::string&)> progress;
};

/// Default desk-scale grids.
std::vector<Index> default_heatmap_n_grid();
std::vector<Index> default_heatmap_k_grid();

/// Success fraction per (n, k) cell. Each (n, trial) sample is drawn from
/// derive_seed(seed, {n index, trial}) and tested against every k, so each
/// trial's row is monotone in k.
HeatmapResult spanner_heatmap(const HeatmapConfig& config);

/// Least-squares line y = intercept + slope x; returns {slope, intercept}.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pwspd
