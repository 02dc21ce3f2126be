#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pwspd/neighbors.hpp"
#include "pwspd/types.hpp"

namespace pwspd {

enum class KernelKind { Gaussian, SelfTuning, Diffusion, PwspdGaussian };

std::string to_string(KernelKind kind);
KernelKind parse_kernel_kind(const std::string& name);

/// Dense symmetric affinity matrix with the parameters that built it.
struct KernelMatrix {
  Eigen::MatrixXd values;
  KernelKind kind = KernelKind::Gaussian;
  double epsilon = 0.0;
  double a = 1.0;
  double alpha = 0.0;
  double p = 1.0;
  Index k = 0;

  Index size() const noexcept { return values.rows(); }
};

/// h_a applied entrywise: exp(-(x / epsilon)^{2a}). Infinite entries map to 0.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> gaussian_affinity(
    const Eigen::MatrixBase<Derived>& dist, typename Derived::Scalar epsilon, typename Derived::Scalar a) {
  using Scalar = typename Derived::Scalar;
  return dist.unaryExpr([epsilon, a](Scalar x) {
    const Scalar t = x / epsilon;
    return a == Scalar(1) ? std::exp(-t * t) : std::exp(-std::pow(t, Scalar(2) * a));
  });
}

KernelMatrix gaussian_kernel(const DistanceMatrix& dist, double epsilon, double a = 1.0);

/// W_ij = exp(-|x_i - x_j|^2 / (sigma_{i,k} sigma_{j,k})).
KernelMatrix self_tuning_kernel(const PointCloud& cloud, Index k);

/// Diffusion-maps normalized kernel
/// W_ij = exp(-|x_i - x_j|^2 / eps^2) / (deg_i^alpha deg_j^alpha).
/// With alpha = 0 the result is bit-identical to the Euclidean Gaussian kernel.
KernelMatrix diffusion_kernel(const PointCloud& cloud, double epsilon, double alpha);

/// Row-stochastic matrix Deg^{-1} W.
Eigen::MatrixXd random_walk_matrix(const Eigen::MatrixXd& w);

/// d_{f,euc}(x, y) = |x - y| / (f(x) f(y))^{(p-1)/(2d)}.
DistanceMatrix density_stretched_distance(const DistanceMatrix& euclidean, const DensityEstimate& density,
                                          double p, int d);

/// Nearest-rank percentile (q in (0, 100]) of the off-diagonal entries
/// i < j, sorted ascending. Infinite entries are excluded.
double distance_percentile(const DistanceMatrix& dist, double q);

// --- Local equivalence diagnostic ---------------------------------------------

struct PairEquivalence {
  Index i = 0;
  Index j = 0;
  double euclidean = 0.0;
  double pwspd_power = 0.0;  ///< normalized discrete l~_p^p
  double stretched = 0.0;    ///< d_{f,euc}
  double ratio = 0.0;        ///< pwspd_power / stretched
  double normalized_ratio = 0.0;  ///< ratio / median ratio
  double rho = 1.0;          ///< max / min density over the epsilon-ball of x_i
  double lower = 1.0;
  double upper = 1.0;
  bool within_bounds = true;
};

struct EquivalenceReport {
  double p = 1.0;
  double epsilon = 0.0;
  double kappa = 0.0;
  std::vector<PairEquivalence> pairs;
  Index skipped_far_pairs = 0;
  double median_ratio = 0.0;
  /// Largest |log normalized_ratio| over pairs.
  double worst_log_ratio = 0.0;
  double coefficient_of_variation = 0.0;
  double violation_fraction = 0.0;
};

struct EquivalenceOptions {
  /// Density estimate to use; estimated with knn_density when absent.
  std::optional<DensityEstimate> density;
  /// Neighbor count for the density estimate; 0 means round(sqrt(n)).
  Index density_k = 0;
  /// kNN graph size for the path computation; 0 means the theoretical
  /// 1-spanner value for (p, d, n).
  Index graph_k = 0;
};

/// Compares normalized discrete l~_p^p with d_{f,euc} on close pairs against
/// the bounds rho^{-(p-1)/d} and rho^{(p-1)/d}(1 + kappa eps^2). Ratios are
/// normalized by their median because the limiting constant C_{p,d}^p is
/// unknown. Pairs farther apart than epsilon are skipped.
EquivalenceReport local_equivalence_report(const PointCloud& cloud, double p, double epsilon, double kappa,
                                           const std::vector<std::pair<Index, Index>>& pairs,
                                           const EquivalenceOptions& options = {});

/// Random pairs at Euclidean distance in (0, epsilon], first point drawn from
/// points whose epsilon-ball stays inside the bounding box shrunk by margin.
std::vector<std::pair<Index, Index>> sample_close_pairs(const PointCloud& cloud, double epsilon, Index count,
                                                        std::uint64_t seed, double margin);

}  // namespace pwspd
