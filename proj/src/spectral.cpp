#include "pwspd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pwspd/core.hpp"
#include "pwspd/neighbors.hpp"
#include "pwspd/paths.hpp"
#include "pwspd/random.hpp"

namespace pwspd {

std::string to_string(LaplacianKind kind) {
  switch (kind) {
    case LaplacianKind::Unnormalized: return "unnormalized";
    case LaplacianKind::RandomWalk: return "random-walk";
    case LaplacianKind::Symmetric: return "symmetric";
  }
  return "unknown";
}

LaplacianKind parse_laplacian_kind(const std::string& name) {
  if (name == "unnormalized") return LaplacianKind::Unnormalized;
  if (name == "random-walk" || name == "rw") return LaplacianKind::RandomWalk;
  if (name == "symmetric" || name == "sym") return LaplacianKind::Symmetric;
  throw InvalidArgument("unknown Laplacian kind '" + name + "'");
}

namespace {

Eigen::VectorXd degrees(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw InvalidArgument("affinity matrix must be square");
  const Eigen::VectorXd deg = w.rowwise().sum();
  for (Index i = 0; i < deg.size(); ++i)
    if (!(deg[i] > 0.0)) throw InvalidArgument("zero degree at node " + std::to_string(i));
  return deg;
}

}  // namespace

Eigen::MatrixXd laplacian(const Eigen::MatrixXd& w, LaplacianKind kind) {
  const Eigen::VectorXd deg = degrees(w);
  Eigen::MatrixXd l = -w;
  l.diagonal() += deg;
  switch (kind) {
    case LaplacianKind::Unnormalized: return l;
    case LaplacianKind::RandomWalk: return deg.cwiseInverse().asDiagonal() * l;
    case LaplacianKind::Symmetric: {
      const Eigen::VectorXd s = deg.cwiseSqrt().cwiseInverse();
      Eigen::MatrixXd sym = s.asDiagonal() * l * s.asDiagonal();
      // Exact symmetry for the eigensolver.
      return 0.5 * (sym + sym.transpose());
    }
  }
  return l;
}

namespace {

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index arg = 0;
    for (Index r = 1; r < vectors.rows(); ++r)
      if (std::abs(vectors(r, c)) > std::abs(vectors(arg, c))) arg = r;
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

}  // namespace

SpectralEmbedding embed(const Eigen::MatrixXd& symmetric_laplacian, Index K, LaplacianKind kind) {
  const Index n = symmetric_laplacian.rows();
  if (symmetric_laplacian.cols() != n) throw InvalidArgument("Laplacian must be square");
  if (K < 1 || K > n) throw InvalidArgument("embedding size K must satisfy 1 <= K <= n");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric_laplacian);
  SpectralEmbedding out;
  out.kind = kind;
  if (solver.info() != Eigen::Success) {
    const double residual =
        (symmetric_laplacian * solver.eigenvectors() - solver.eigenvectors() * solver.eigenvalues().asDiagonal())
            .norm();
    throw std::runtime_error("symmetric eigensolver did not converge (residual norm " + std::to_string(residual) +
                             ")");
  }
  out.eigenvalues = solver.eigenvalues().head(K);
  out.vectors = solver.eigenvectors().leftCols(K);
  fix_signs(out.vectors);
  for (Index j = 0; j < K; ++j) {
    const double r = (symmetric_laplacian * out.vectors.col(j) - out.eigenvalues[j] * out.vectors.col(j)).norm();
    out.max_residual = std::max(out.max_residual, r);
  }
  return out;
}

SpectralEmbedding spectral_embedding(const Eigen::MatrixXd& w, Index K, LaplacianKind kind) {
  if (kind == LaplacianKind::Unnormalized) return embed(laplacian(w, kind), K, kind);
  SpectralEmbedding out = embed(laplacian(w, LaplacianKind::Symmetric), K, kind);
  if (kind == LaplacianKind::RandomWalk) {
    const Eigen::VectorXd s = degrees(w).cwiseSqrt().cwiseInverse();
    out.vectors = s.asDiagonal() * out.vectors;
    out.vectors.colwise().normalize();
    fix_signs(out.vectors);
  }
  return out;
}

// --- K-means ------------------------------------------------------------------

namespace {

struct LloydRun {
  std::vector<int> labels;
  double cost;
  Index iterations;
};

double assign(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centers, std::vector<int>& labels,
              Eigen::VectorXd& point_cost) {
  double total = 0.0;
  for (Index i = 0; i < data.rows(); ++i) {
    int best = 0;
    double best_d = kInfinity;
    for (Index c = 0; c < centers.rows(); ++c) {
      const double d = (data.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[i] = best;
    point_cost[i] = best_d;
    total += best_d;
  }
  return total;
}

LloydRun lloyd(const Eigen::MatrixXd& data, int clusters, Rng& rng, int max_iterations) {
  const Index n = data.rows();
  Eigen::MatrixXd centers(clusters, data.cols());

  // k-means++ seeding.
  Eigen::VectorXd nearest = Eigen::VectorXd::Constant(n, kInfinity);
  centers.row(0) = data.row(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n))));
  for (int c = 1; c < clusters; ++c) {
    for (Index i = 0; i < n; ++i)
      nearest[i] = std::min(nearest[i], (data.row(i) - centers.row(c - 1)).squaredNorm());
    const double total = nearest.sum();
    Index pick = 0;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += nearest[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = data.row(pick);
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<int> previous;
  Eigen::VectorXd point_cost(n);
  double cost = assign(data, centers, labels, point_cost);
  // Rounding in the centroid update is relative to the data's own scale.
  const double slack = 1e-12 * data.squaredNorm();
  Index it = 0;
  for (; it < max_iterations; ++it) {
    // Update step.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(clusters, data.cols());
    std::vector<Index> counts(static_cast<std::size_t>(clusters), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(labels[i]) += data.row(i);
      ++counts[labels[i]];
    }
    for (int c = 0; c < clusters; ++c) {
      if (counts[c] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
      } else {
        // Re-seed an empty cluster at the point farthest from its center.
        Index far = 0;
        point_cost.maxCoeff(&far);
        centers.row(c) = data.row(far);
        point_cost[far] = 0.0;
      }
    }
    previous = labels;
    const double next = assign(data, centers, labels, point_cost);
    if (next > cost + slack)
      throw std::logic_error("k-means objective increased between Lloyd iterations");
    cost = next;
    if (labels == previous) break;
  }
  return {labels, cost, it};
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& data, int clusters, std::uint64_t seed, int restarts,
                    int max_iterations) {
  if (clusters < 2) throw InvalidArgument("k-means needs at least 2 clusters");
  if (data.rows() < 1) throw InvalidArgument("k-means needs at least one point");
  if (restarts < 1) throw InvalidArgument("restarts must be >= 1");
  KMeansResult best;
  best.cost = kInfinity;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    LloydRun run = lloyd(data, std::min<int>(clusters, static_cast<int>(data.rows())), rng, max_iterations);
    if (run.cost < best.cost) {
      best.labels = std::move(run.labels);
      best.cost = run.cost;
      best.iterations = run.iterations;
    }
  }
  return best;
}

double accuracy(const std::vector<int>& labels, const std::vector<int>& truth) {
  if (labels.size() != truth.size()) throw InvalidArgument("label vectors differ in length");
  if (labels.empty()) return 1.0;
  auto compress = [](const std::vector<int>& v) {
    std::vector<int> values(v);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<int> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      out[i] = static_cast<int>(std::lower_bound(values.begin(), values.end(), v[i]) - values.begin());
    return std::pair{out, static_cast<int>(values.size())};
  };
  const auto [a, ka] = compress(labels);
  const auto [b, kb] = compress(truth);
  const int m = std::max(ka, kb);
  if (m > 8) throw InvalidArgument("accuracy alignment supports at most 8 clusters");
  Eigen::MatrixXi confusion = Eigen::MatrixXi::Zero(m, m);
  for (std::size_t i = 0; i < a.size(); ++i) ++confusion(a[i], b[i]);
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  int best = 0;
  do {
    int hits = 0;
    for (int c = 0; c < m; ++c) hits += confusion(c, perm[c]);
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(a.size());
}

// --- Pipelines -------------------------------------------------------------------

ClusteringResult cluster_affinity(const Eigen::MatrixXd& w, const std::vector<int>& truth,
                                  const SweepConfig& config, std::uint64_t seed) {
  if (config.clusters < 2) throw InvalidArgument("clustering needs at least 2 clusters");
  const SpectralEmbedding emb = spectral_embedding(w, config.clusters, config.laplacian);
  const Eigen::MatrixXd features = emb.vectors.rightCols(config.clusters - 1);
  const KMeansResult km = kmeans(features, config.clusters, seed, config.restarts);
  ClusteringResult out;
  out.labels = km.labels;
  out.accuracy = truth.empty() ? 0.0 : accuracy(km.labels, truth);
  return out;
}

namespace {

const std::vector<int>& truth_of(const PointCloud& cloud) {
  static const std::vector<int> empty;
  return cloud.has_labels() ? cloud.labels() : empty;
}

}  // namespace

ClusteringResult pwspd_spectral_clustering(const PointCloud& cloud, double p, const SweepConfig& config,
                                           std::uint64_t seed) {
  PwspdQueryConfig query;
  query.p = p;
  query.validate();
  // On the complete graph l_1 is the Euclidean distance (triangle inequality).
  const DistanceMatrix dist = p == 1.0 ? pairwise_euclidean(cloud) : pwspd_all_pairs(complete_graph(cloud), query);
  const double eps = distance_percentile(dist, config.epsilon_percentile);
  ClusteringResult out = cluster_affinity(gaussian_kernel(dist, eps).values, truth_of(cloud), config, seed);
  out.p = p;
  return out;
}

ClusteringResult euclidean_spectral_clustering(const PointCloud& cloud, const SweepConfig& config,
                                               std::uint64_t seed) {
  const DistanceMatrix dist = pairwise_euclidean(cloud);
  const double eps = distance_percentile(dist, config.epsilon_percentile);
  ClusteringResult out = cluster_affinity(gaussian_kernel(dist, eps).values, truth_of(cloud), config, seed);
  out.p = 1.0;
  return out;
}

ClusteringResult self_tuning_spectral_clustering(const PointCloud& cloud, Index k, const SweepConfig& config,
                                                 std::uint64_t seed) {
  return cluster_affinity(self_tuning_kernel(cloud, k).values, truth_of(cloud), config, seed);
}

ClusteringResult diffusion_spectral_clustering(const PointCloud& cloud, double alpha, const SweepConfig& config,
                                               std::uint64_t seed) {
  const double eps = distance_percentile(pairwise_euclidean(cloud), config.epsilon_percentile);
  return cluster_affinity(diffusion_kernel(cloud, eps, alpha).values, truth_of(cloud), config, seed);
}

std::vector<SweepPoint> accuracy_vs_p_sweep(const PointCloud& cloud, const std::vector<double>& p_grid,
                                            const SweepConfig& config, std::uint64_t seed) {
  if (!cloud.has_labels()) throw InvalidArgument("the p sweep needs ground-truth labels");
  std::vector<SweepPoint> out;
  out.reserve(p_grid.size());
  for (double p : p_grid) out.push_back({p, pwspd_spectral_clustering(cloud, p, config, seed).accuracy});
  return out;
}

}  // namespace pwspd
