#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pwspd/types.hpp"

namespace pwspd {

/// Parameters of a synthetic labeled dataset. Unset (zero) geometry fields
/// take the named dataset's defaults.
struct DatasetSpec {
  std::string name = "two-rings";
  std::uint64_t seed = 0;
  // two-rings
  Index ring_points = 500;        ///< per ring
  double inner_radius = 1.0;
  double outer_radius = 2.0;
  double radial_noise = 0.05;
  // long-bottleneck
  Index disc_points = 400;        ///< first disc; the second gets half
  double disc_radius = 1.0;
  double disc_separation = 6.0;   ///< center to center
  Index strip_points = 300;       ///< denser than the discs
  double strip_length = 4.0;
  double strip_width = 0.2;
  // short-bottleneck
  Index rect_points = 500;        ///< per rectangle
  double rect_length = 3.0;
  double rect_width = 0.5;
  Index bridge_points = 50;
  double bridge_length = 0.5;     ///< gap spanned between the rectangles
  double bridge_width = 0.3;

  void validate() const;
};

std::vector<std::string> dataset_names();

/// Deterministic labeled 2-D dataset. Labels are 0/1.
PointCloud gen_dataset(const DatasetSpec& spec);

/// Axis-aligned box [lo, hi].
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  double volume() const;
};

/// Homogeneous Poisson point process on a box: N ~ Poisson(intensity |box|),
/// then N i.i.d. uniform points. The result may have zero rows.
PointMatrix sample_ppp(double intensity, const Box& region, std::uint64_t seed);

inline constexpr double kPppMeanLimit = 1e8;

struct ChiConfig {
  int d = 2;
  double p = 2.0;
  std::vector<Index> n_grid;
  Index trials = 500;
  std::uint64_t seed = 0;
  /// Called after each n with a one-line status.
  std::function<void(const std::string&)> progress;
};

std::vector<Index> default_chi_n_grid();

/// Fluctuation-exponent estimate from the variance scaling of l~_p between
/// two fixed interior points.
struct ChiEstimate {
  int d = 2;
  double p = 2.0;
  std::vector<Index> n_grid;
  std::vector<Index> k_per_n;          ///< kNN size used at each n
  std::vector<double> means;           ///< mean l~_p per n
  std::vector<double> variances;       ///< unbiased sample variance per n
  std::vector<Index> valid_trials;     ///< trials with a finite value
  std::vector<Index> resampled;        ///< trials redrawn after a disconnected graph
  std::vector<Index> failures;         ///< trials disconnected twice
  double slope = 0.0;                  ///< m in log Var = m log n + c
  double intercept = 0.0;
  double slope_se = 0.0;
  double slope_ci_low = 0.0;
  double slope_ci_high = 0.0;
  double chi = 0.0;                    ///< m d / 2 + 1
  double chi_ci_low = 0.0;
  double chi_ci_high = 0.0;
  std::vector<double> residuals;       ///< of the log-log fit
  Index trials_per_n = 0;
};

/// chi from a log-variance slope m: m d / 2 + 1.
double chi_from_slope(double slope, int d);

/// Two-sided 95% Student-t quantile for the given degrees of freedom.
double student_t_975(Index dof);

/// One trial: n uniform points in [0,1]^d plus the endpoints
/// x = (0.25, 0.5, ..., 0.5), y = (0.75, 0.5, ..., 0.5); returns l~_p(x, y)
/// on the kNN graph, or +inf if x and y are disconnected.
double chi_trial_value(int d, double p, Index n, Index k, std::uint64_t seed);

ChiEstimate estimate_chi(const ChiConfig& config);

}  // namespace pwspd
