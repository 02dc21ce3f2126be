#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pwspd/core.hpp"
#include "pwspd/experiments.hpp"
#include "pwspd/kernels.hpp"
#include "pwspd/random.hpp"
#include "pwspd/spanner.hpp"
#include "pwspd/spectral.hpp"

using namespace pwspd;

namespace {

Eigen::MatrixXd blob_affinity(Index per_blob, double gap, std::uint64_t seed, std::vector<int>* truth = nullptr) {
  Rng rng(seed);
  PointMatrix x(2 * per_blob, 2);
  for (Index i = 0; i < 2 * per_blob; ++i) {
    x(i, 0) = 0.3 * rng.normal() + (i < per_blob ? 0.0 : gap);
    x(i, 1) = 0.3 * rng.normal();
    if (truth) truth->push_back(i < per_blob ? 0 : 1);
  }
  return gaussian_kernel(pairwise_euclidean(PointCloud(x, 2)), 0.5).values;
}

}  // namespace

TEST_CASE("laplacian variants") {
  const Eigen::MatrixXd w = blob_affinity(20, 2.0, 1);
  const Eigen::VectorXd deg = w.rowwise().sum();
  const Eigen::MatrixXd l = laplacian(w, LaplacianKind::Unnormalized);
  CHECK((l * Eigen::VectorXd::Ones(40)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(l == l.transpose());
  const Eigen::MatrixXd rw = laplacian(w, LaplacianKind::RandomWalk);
  CHECK((rw - deg.cwiseInverse().asDiagonal() * l).cwiseAbs().maxCoeff() <= 1e-14);
  const Eigen::MatrixXd sym = laplacian(w, LaplacianKind::Symmetric);
  CHECK(sym == sym.transpose());
  CHECK((sym * deg.cwiseSqrt()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::MatrixXd isolated = w;
  isolated.row(3).setZero();
  isolated.col(3).setZero();
  CHECK_THROWS_AS(laplacian(isolated, LaplacianKind::Symmetric), InvalidArgument);
  CHECK_THROWS_AS(laplacian(Eigen::MatrixXd::Ones(2, 3), LaplacianKind::Symmetric), InvalidArgument);
}

TEST_CASE("embedding: ascending, orthonormal, small residual, fixed signs") {
  const Eigen::MatrixXd w = blob_affinity(30, 2.5, 2);
  for (auto kind : {LaplacianKind::Unnormalized, LaplacianKind::Symmetric}) {
    const SpectralEmbedding e = spectral_embedding(w, 4, kind);
    CHECK(e.eigenvalues.size() == 4);
    for (Index j = 1; j < 4; ++j) CHECK(e.eigenvalues[j] >= e.eigenvalues[j - 1]);
    CHECK(std::abs(e.eigenvalues[0]) <= 1e-10);
    CHECK(e.max_residual <= 1e-8);
    CHECK((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
    for (Index j = 0; j < 4; ++j) {
      Index arg = 0;
      e.vectors.col(j).cwiseAbs().maxCoeff(&arg);
      CHECK(e.vectors(arg, j) > 0.0);
    }
  }
}

TEST_CASE("random-walk embedding solves the generalized problem") {
  const Eigen::MatrixXd w = blob_affinity(25, 2.0, 3);
  const SpectralEmbedding e = spectral_embedding(w, 3, LaplacianKind::RandomWalk);
  const Eigen::MatrixXd lrw = laplacian(w, LaplacianKind::RandomWalk);
  for (Index j = 0; j < 3; ++j) {
    const Eigen::VectorXd v = e.vectors.col(j);
    CHECK(v.norm() == doctest::Approx(1.0));
    CHECK((lrw * v - e.eigenvalues[j] * v).norm() <= 1e-8);
  }
  // The first random-walk eigenvector is constant.
  CHECK((e.vectors.col(0).array() - e.vectors(0, 0)).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("disconnected blocks give a repeated zero eigenvalue") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(6, 6);
  w.topLeftCorner(3, 3).setOnes();
  w.bottomRightCorner(3, 3).setOnes();
  const SpectralEmbedding e = spectral_embedding(w, 3, LaplacianKind::Symmetric);
  CHECK(std::abs(e.eigenvalues[1]) <= 1e-12);
  CHECK(e.eigenvalues[2] > 0.5);
  CHECK_THROWS_AS(embed(laplacian(w, LaplacianKind::Symmetric), 7), InvalidArgument);
}

TEST_CASE("k-means on 1-D data reaches the exact optimum") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    std::vector<double> v;
    Eigen::MatrixXd data(40, 1);
    for (Index i = 0; i < 40; ++i) {
      data(i, 0) = rng.uniform() + (i % 3 == 0 ? 1.5 : 0.0);
      v.push_back(data(i, 0));
    }
    const KMeansResult r = kmeans(data, 2, seed);
    CHECK(r.cost == doctest::Approx(oracle::two_means_1d(v)).epsilon(1e-12));
  }
}

TEST_CASE("k-means is deterministic and validates input") {
  Rng rng(5);
  Eigen::MatrixXd data(100, 3);
  for (Index i = 0; i < 100; ++i)
    for (Index c = 0; c < 3; ++c) data(i, c) = rng.normal() + (i % 4) * 5.0;
  const KMeansResult a = kmeans(data, 4, 9);
  const KMeansResult b = kmeans(data, 4, 9);
  CHECK(a.labels == b.labels);
  CHECK(a.cost == b.cost);
  std::vector<int> truth;
  for (Index i = 0; i < 100; ++i) truth.push_back(static_cast<int>(i % 4));
  CHECK(accuracy(a.labels, truth) == 1.0);
  CHECK_THROWS_AS(kmeans(data, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(kmeans(data, 2, 0, 0), InvalidArgument);
}

TEST_CASE("k-means copes with more clusters than distinct points") {
  Eigen::MatrixXd data = Eigen::MatrixXd::Zero(6, 1);
  data(5, 0) = 1.0;
  const KMeansResult r = kmeans(data, 3, 1);
  CHECK(r.cost == doctest::Approx(0.0));
  CHECK(r.labels.size() == 6);
}

TEST_CASE("accuracy maximizes over relabelings") {
  CHECK(accuracy({1, 1, 0, 0}, {0, 0, 1, 1}) == 1.0);
  CHECK(accuracy({0, 1, 0, 0}, {0, 0, 1, 1}) == 0.75);
  CHECK(accuracy({2, 0, 1, 1}, {0, 1, 2, 2}) == 1.0);
  CHECK(accuracy({0, 0, 0, 0}, {0, 0, 1, 1}) == 0.5);
  CHECK_THROWS_AS(accuracy({0, 1}, {0}), InvalidArgument);
  CHECK_THROWS_AS(accuracy({0, 1, 2, 3, 4, 5, 6, 7, 8}, {0, 1, 2, 3, 4, 5, 6, 7, 8}), InvalidArgument);
}

TEST_CASE("spectral clustering separates two blobs") {
  std::vector<int> truth;
  const Eigen::MatrixXd w = blob_affinity(50, 4.0, 6, &truth);
  for (auto kind : {LaplacianKind::Unnormalized, LaplacianKind::RandomWalk, LaplacianKind::Symmetric}) {
    SweepConfig cfg;
    cfg.laplacian = kind;
    CHECK(cluster_affinity(w, truth, cfg, 1).accuracy == 1.0);
  }
}

TEST_CASE("p = 1 PWSPD clustering equals the Euclidean baseline") {
  DatasetSpec spec;
  spec.name = "two-rings";
  spec.ring_points = 120;
  const PointCloud c = gen_dataset(spec);
  const SweepConfig cfg;
  const ClusteringResult a = pwspd_spectral_clustering(c, 1.0, cfg, 4);
  const ClusteringResult b = euclidean_spectral_clustering(c, cfg, 4);
  CHECK(a.labels == b.labels);
  CHECK(a.accuracy == b.accuracy);
}

TEST_CASE("large p separates the rings that Euclidean clustering mixes") {
  DatasetSpec spec;
  spec.name = "two-rings";
  spec.ring_points = 150;
  const PointCloud c = gen_dataset(spec);
  const SweepConfig cfg;
  CHECK(pwspd_spectral_clustering(c, 4.0, cfg, 2).accuracy >= 0.95);
  CHECK(euclidean_spectral_clustering(c, cfg, 2).accuracy < 0.8);
  const auto sweep = accuracy_vs_p_sweep(c, {1.0, 4.0}, cfg, 2);
  REQUIRE(sweep.size() == 2);
  CHECK(sweep[0].p == 1.0);
  CHECK(sweep[1].accuracy >= 0.95);
}

TEST_CASE("baseline pipelines run and report accuracy") {
  DatasetSpec spec;
  spec.name = "short-bottleneck";
  spec.rect_points = 120;
  spec.bridge_points = 12;
  const PointCloud c = gen_dataset(spec);
  const SweepConfig cfg;
  for (double acc : {self_tuning_spectral_clustering(c, 10, cfg, 1).accuracy,
                     diffusion_spectral_clustering(c, 1.0, cfg, 1).accuracy,
                     diffusion_spectral_clustering(c, 0.0, cfg, 1).accuracy}) {
    CHECK(acc >= 0.5);
    CHECK(acc <= 1.0);
  }
  const PointCloud unlabeled(c.points(), 2);
  CHECK_THROWS_AS(accuracy_vs_p_sweep(unlabeled, {2.0}, cfg, 1), InvalidArgument);
}

TEST_CASE("laplacian kind names") {
  for (auto k : {LaplacianKind::Unnormalized, LaplacianKind::RandomWalk, LaplacianKind::Symmetric})
    CHECK(parse_laplacian_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_laplacian_kind("signless"), InvalidArgument);
}
