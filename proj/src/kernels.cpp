#include "pwspd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pwspd/core.hpp"
#include "pwspd/paths.hpp"
#include "pwspd/random.hpp"
#include "pwspd/spanner.hpp"

namespace pwspd {

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Gaussian: return "gaussian";
    case KernelKind::SelfTuning: return "self-tuning";
    case KernelKind::Diffusion: return "diffusion";
    case KernelKind::PwspdGaussian: return "pwspd-gaussian";
  }
  return "unknown";
}

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "gaussian") return KernelKind::Gaussian;
  if (name == "self-tuning") return KernelKind::SelfTuning;
  if (name == "diffusion") return KernelKind::Diffusion;
  if (name == "pwspd-gaussian") return KernelKind::PwspdGaussian;
  throw InvalidArgument("unknown kernel kind '" + name + "'");
}

KernelMatrix gaussian_kernel(const DistanceMatrix& dist, double epsilon, double a) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(a > 0.0)) throw InvalidArgument("kernel exponent a must be positive");
  KernelMatrix out;
  out.values = gaussian_affinity(dist.values, epsilon, a);
  out.kind = dist.euclidean ? KernelKind::Gaussian : KernelKind::PwspdGaussian;
  out.epsilon = epsilon;
  out.a = a;
  out.p = dist.p;
  return out;
}

KernelMatrix self_tuning_kernel(const PointCloud& cloud, Index k) {
  const ScaleVector scales = knn_scales(cloud, k);
  for (Index i = 0; i < cloud.size(); ++i)
    if (!(scales.sigmas[i] > 0.0))
      throw InvalidArgument("zero neighbor scale at index " + std::to_string(i) + " (duplicate points)");
  const Index n = cloud.size();
  KernelMatrix out;
  out.kind = KernelKind::SelfTuning;
  out.k = k;
  out.values.resize(n, n);
  const auto& pts = cloud.points();
  for (Index i = 0; i < n; ++i) {
    out.values(i, i) = 1.0;
    for (Index j = i + 1; j < n; ++j) {
      const double w = std::exp(-squared_distance(pts, i, j) / (scales.sigmas[i] * scales.sigmas[j]));
      out.values(i, j) = w;
      out.values(j, i) = w;
    }
  }
  return out;
}

KernelMatrix diffusion_kernel(const PointCloud& cloud, double epsilon, double alpha) {
  KernelMatrix out = gaussian_kernel(pairwise_euclidean(cloud), epsilon, 1.0);
  out.kind = KernelKind::Diffusion;
  out.alpha = alpha;
  if (alpha == 0.0) return out;
  const Eigen::VectorXd scale = out.values.rowwise().sum().array().pow(-alpha);
  // s_i s_j is formed first so the result is exactly symmetric.
  out.values = out.values.cwiseProduct(scale * scale.transpose());
  return out;
}

Eigen::MatrixXd random_walk_matrix(const Eigen::MatrixXd& w) {
  const Eigen::VectorXd deg = w.rowwise().sum();
  for (Index i = 0; i < deg.size(); ++i)
    if (!(deg[i] > 0.0)) throw InvalidArgument("zero degree at node " + std::to_string(i));
  return deg.cwiseInverse().asDiagonal() * w;
}

DistanceMatrix density_stretched_distance(const DistanceMatrix& euclidean, const DensityEstimate& density,
                                          double p, int d) {
  const Index n = euclidean.size();
  if (density.values.size() != n) throw InvalidArgument("density length does not match the distance matrix");
  if (d < 1) throw InvalidArgument("intrinsic dimension must be >= 1");
  for (Index i = 0; i < n; ++i)
    if (!(density.values[i] > 0.0))
      throw InvalidArgument("density must be positive (index " + std::to_string(i) + ")");
  DistanceMatrix out = euclidean;
  out.p = p;
  out.euclidean = false;
  if (p == 1.0) return out;
  const double exponent = (p - 1.0) / (2.0 * d);
  const Eigen::VectorXd inv = density.values.array().pow(-exponent);
  out.values = euclidean.values.cwiseProduct(inv * inv.transpose());
  return out;
}

double distance_percentile(const DistanceMatrix& dist, double q) {
  if (!(q > 0.0) || q > 100.0) throw InvalidArgument("percentile must lie in (0, 100]");
  const Index n = dist.size();
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (dist.values(i, j) < kInfinity) v.push_back(dist.values(i, j));
  if (v.empty()) throw InvalidArgument("no finite pairwise distances");
  const auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(v.size())));
  const std::size_t idx = std::clamp<std::size_t>(rank, 1, v.size()) - 1;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
  return v[idx];
}

// --- Local equivalence ----------------------------------------------------------

EquivalenceReport local_equivalence_report(const PointCloud& cloud, double p, double epsilon, double kappa,
                                           const std::vector<std::pair<Index, Index>>& pairs,
                                           const EquivalenceOptions& options) {
  if (!(p >= 1.0)) throw InvalidArgument("p must be >= 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const Index n = cloud.size();
  const int d = cloud.intrinsic_dim();
  const auto& pts = cloud.points();

  DensityEstimate density;
  if (options.density) {
    density = *options.density;
    if (density.values.size() != n) throw InvalidArgument("density length does not match the cloud");
  } else {
    const Index k = options.density_k > 0
                        ? options.density_k
                        : std::max<Index>(1, static_cast<Index>(std::lround(std::sqrt(static_cast<double>(n)))));
    density = knn_density(cloud, std::min(k, n - 1));
  }

  EquivalenceReport report;
  report.p = p;
  report.epsilon = epsilon;
  report.kappa = kappa;

  std::vector<std::pair<Index, Index>> kept;
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw InvalidArgument("invalid pair index");
    const double s = std::sqrt(squared_distance(pts, i, j));
    if (s > epsilon || !(s > 0.0)) ++report.skipped_far_pairs;
    else kept.emplace_back(i, j);
  }
  if (kept.empty()) return report;

  std::optional<NeighborGraph> graph;
  std::optional<PathEngine> engine;
  if (p != 1.0) {
    Index k = options.graph_k;
    if (k <= 0) k = required_k({p, d, n, 1.0, 1.0});
    graph.emplace(k >= n - 1 ? complete_graph(cloud) : knn_graph(cloud, k));
    engine.emplace(*graph, p);
  }
  const double norm_power = std::pow(static_cast<double>(n), (p - 1.0) / static_cast<double>(d));
  const double bound_exp = (p - 1.0) / static_cast<double>(d);
  DijkstraWorkspace ws;
  for (const auto& [i, j] : kept) {
    PairEquivalence e;
    e.i = i;
    e.j = j;
    e.euclidean = std::sqrt(squared_distance(pts, i, j));
    if (p == 1.0) {
      // l_1 on the complete graph is the Euclidean distance.
      e.pwspd_power = e.euclidean;
    } else {
      StopRule stop;
      stop.target = j;
      engine->run(i, stop, ws);
      const double lp = ws.settled[j] ? engine->value_of(ws.cost[j]) : kInfinity;
      e.pwspd_power = norm_power * std::pow(lp, p);
    }
    e.stretched = e.euclidean / std::pow(density.values[i] * density.values[j], (p - 1.0) / (2.0 * d));
    e.ratio = e.pwspd_power / e.stretched;
    double fmin = kInfinity, fmax = 0.0;
    for (Index z = 0; z < n; ++z)
      if (squared_distance(pts, i, z) <= epsilon * epsilon) {
        fmin = std::min(fmin, density.values[z]);
        fmax = std::max(fmax, density.values[z]);
      }
    e.rho = fmax / fmin;
    e.lower = std::pow(e.rho, -bound_exp);
    e.upper = std::pow(e.rho, bound_exp) * (1.0 + kappa * epsilon * epsilon);
    report.pairs.push_back(e);
  }

  std::vector<double> ratios;
  for (const auto& e : report.pairs) ratios.push_back(e.ratio);
  const std::size_t mid = ratios.size() / 2;
  std::nth_element(ratios.begin(), ratios.begin() + static_cast<std::ptrdiff_t>(mid), ratios.end());
  double median = ratios[mid];
  if (ratios.size() % 2 == 0) {
    const double below = *std::max_element(ratios.begin(), ratios.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + below);
  }
  report.median_ratio = median;

  double sum = 0.0, sum_sq = 0.0;
  Index violations = 0;
  for (auto& e : report.pairs) {
    e.normalized_ratio = e.ratio / median;
    e.within_bounds = e.lower <= e.normalized_ratio && e.normalized_ratio <= e.upper;
    if (!e.within_bounds) ++violations;
    report.worst_log_ratio = std::max(report.worst_log_ratio, std::abs(std::log(e.normalized_ratio)));
    sum += e.normalized_ratio;
    sum_sq += e.normalized_ratio * e.normalized_ratio;
  }
  const double m = static_cast<double>(report.pairs.size());
  const double mean = sum / m;
  const double var = m > 1 ? std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0)) : 0.0;
  report.coefficient_of_variation = std::sqrt(var) / mean;
  report.violation_fraction = static_cast<double>(violations) / m;
  return report;
}

std::vector<std::pair<Index, Index>> sample_close_pairs(const PointCloud& cloud, double epsilon, Index count,
                                                        std::uint64_t seed, double margin) {
  const Index n = cloud.size();
  const auto& pts = cloud.points();
  const Eigen::RowVectorXd lo = pts.colwise().minCoeff().array() + margin;
  const Eigen::RowVectorXd hi = pts.colwise().maxCoeff().array() - margin;
  std::vector<Index> interior;
  for (Index i = 0; i < n; ++i)
    if ((pts.row(i).array() >= lo.array() + epsilon).all() && (pts.row(i).array() <= hi.array() - epsilon).all())
      interior.push_back(i);
  if (interior.empty()) throw InvalidArgument("no points far enough from the boundary");
  Rng rng(seed);
  std::vector<std::pair<Index, Index>> out;
  std::vector<Index> close;
  Index attempts = 0;
  while (static_cast<Index>(out.size()) < count) {
    if (++attempts > 100 * count) throw InvalidArgument("could not find enough close pairs");
    const Index i = interior[rng.uniform_index(interior.size())];
    close.clear();
    for (Index j = 0; j < n; ++j) {
      const double s2 = squared_distance(pts, i, j);
      if (j != i && s2 > 0.0 && s2 <= epsilon * epsilon) close.push_back(j);
    }
    if (close.empty()) continue;
    out.emplace_back(i, close[rng.uniform_index(close.size())]);
  }
  return out;
}

}  // namespace pwspd
