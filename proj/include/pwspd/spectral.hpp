#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwspd/kernels.hpp"
#include "pwspd/types.hpp"

namespace pwspd {

enum class LaplacianKind { Unnormalized, RandomWalk, Symmetric };

std::string to_string(LaplacianKind kind);
LaplacianKind parse_laplacian_kind(const std::string& name);

/// L = Deg - W, L_RW = Deg^{-1} L, or L_SYM = Deg^{-1/2} L Deg^{-1/2}.
Eigen::MatrixXd laplacian(const Eigen::MatrixXd& w, LaplacianKind kind);
inline Eigen::MatrixXd laplacian(const KernelMatrix& w, LaplacianKind kind) { return laplacian(w.values, kind); }

/// The K lowest-frequency eigenpairs.
struct SpectralEmbedding {
  Eigen::VectorXd eigenvalues;  ///< ascending
  Eigen::MatrixXd vectors;      ///< n x K, unit-norm columns
  LaplacianKind kind = LaplacianKind::Symmetric;
  /// max_j |L phi_j - lambda_j phi_j|, measured on the symmetric operator.
  double max_residual = 0.0;
};

/// K smallest eigenpairs of a symmetric matrix. Each vector's sign is fixed
/// so that its largest-magnitude coordinate (first on ties) is positive.
SpectralEmbedding embed(const Eigen::MatrixXd& symmetric_laplacian, Index K,
                        LaplacianKind kind = LaplacianKind::Symmetric);

/// Embedding straight from affinities. For the random-walk Laplacian the
/// symmetric problem is solved and vectors are mapped through Deg^{-1/2}.
SpectralEmbedding spectral_embedding(const Eigen::MatrixXd& w, Index K, LaplacianKind kind);

struct KMeansResult {
  std::vector<int> labels;
  double cost = 0.0;  ///< within-cluster sum of squares
  Index iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` runs.
/// Rows of `data` are the points.
KMeansResult kmeans(const Eigen::MatrixXd& data, int clusters, std::uint64_t seed, int restarts = 10,
                    int max_iterations = 300);

/// Fraction of points correctly labeled after the best relabeling.
double accuracy(const std::vector<int>& labels, const std::vector<int>& truth);

struct ClusteringResult {
  std::vector<int> labels;
  double accuracy = 0.0;
  double p = 1.0;
};

struct SweepConfig {
  /// Kernel scale is this percentile of each metric's pairwise distances.
  double epsilon_percentile = 15.0;
  LaplacianKind laplacian = LaplacianKind::Symmetric;
  int clusters = 2;
  int restarts = 10;
};

/// Spectral clustering on a given affinity matrix, embedding with phi_2 only
/// (or phi_2..phi_K for K > 2 clusters).
ClusteringResult cluster_affinity(const Eigen::MatrixXd& w, const std::vector<int>& truth,
                                  const SweepConfig& config, std::uint64_t seed);

/// Complete-graph PWSPD spectral clustering at one p.
ClusteringResult pwspd_spectral_clustering(const PointCloud& cloud, double p, const SweepConfig& config,
                                           std::uint64_t seed);

/// Euclidean spectral clustering baseline (Gaussian kernel on |x - y|).
ClusteringResult euclidean_spectral_clustering(const PointCloud& cloud, const SweepConfig& config,
                                               std::uint64_t seed);
/// Self-tuning baseline with scales from the k-th neighbor.
ClusteringResult self_tuning_spectral_clustering(const PointCloud& cloud, Index k, const SweepConfig& config,
                                                 std::uint64_t seed);
/// Diffusion-maps-normalized baseline.
ClusteringResult diffusion_spectral_clustering(const PointCloud& cloud, double alpha, const SweepConfig& config,
                                               std::uint64_t seed);

struct SweepPoint {
  double p = 1.0;
  double accuracy = 0.0;
};

/// accuracy of PWSPD spectral clustering for each p in p_grid.
std::vector<SweepPoint> accuracy_vs_p_sweep(const PointCloud& cloud, const std::vector<double>& p_grid,
                                            const SweepConfig& config, std::uint64_t seed);

}  // namespace pwspd
