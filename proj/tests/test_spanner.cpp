#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pwspd/neighbors.hpp"
#include "pwspd/paths.hpp"
#include "pwspd/random.hpp"
#include "pwspd/spanner.hpp"

using namespace pwspd;

namespace {

SpannerParams params(double p, int d, Index n = 2) {
  SpannerParams s;
  s.p = p;
  s.d = d;
  s.n = n;
  return s;
}

PointCloud collinear3() {
  PointMatrix x(3, 1);
  x << 0, 1, 2;
  return PointCloud(x, 1);
}

// Boundary of {z : |x-z|^p + |z-y|^p = alpha |x-y|^p} in polar coordinates
// about the midpoint, by bisection on r at a fixed angle.
double boundary_radius(double s, double alpha, double p, double phi) {
  auto g = [&](double r) {
    const double a = r * r + s * r * std::cos(phi) + s * s / 4.0;
    const double b = r * r - s * r * std::cos(phi) + s * s / 4.0;
    return std::pow(a, p / 2.0) + std::pow(b, p / 2.0) - alpha * std::pow(s, p);
  };
  double lo = 0.0, hi = s;
  while (g(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("k-formula coefficients") {
  CHECK(theoretical_k_slope(params(2.0, 5)) == doctest::Approx(96.0).epsilon(1e-12));
  CHECK(theoretical_k_slope(params(1.5, 5)) == doctest::Approx(363.02).epsilon(0.005));
  CHECK(theoretical_k_slope(params(10.0, 5)) == doctest::Approx(9.89).epsilon(0.005));
  // log n = 1.
  SpannerParams e = params(2.0, 2);
  e.n = 3;
  CHECK(theoretical_k_intrinsic(e) == doctest::Approx(1.0 + 12.0 * std::log(3.0)));
  // p -> infinity limit at d = 4: 3 (4/3)^2.
  CHECK(theoretical_k_slope(params(1e9, 4)) == doctest::Approx(3.0 * 16.0 / 9.0).epsilon(1e-6));
  CHECK_THROWS_AS(theoretical_k_slope(params(1.0, 2)), InvalidArgument);
  CHECK_THROWS_AS(theoretical_k_euclidean(params(0.5, 2)), InvalidArgument);
}

TEST_CASE("k-formula monotonicity") {
  SpannerParams base = params(2.0, 3, 1000);
  const double k0 = theoretical_k_euclidean(base);
  SpannerParams more_p = base;
  more_p.p = 3.0;
  SpannerParams more_d = base;
  more_d.d = 4;
  SpannerParams more_kappa = base;
  more_kappa.kappa = 1.5;
  SpannerParams more_ratio = base;
  more_ratio.density_ratio = 2.0;
  CHECK(theoretical_k_euclidean(more_p) < k0);
  CHECK(theoretical_k_euclidean(more_d) > k0);
  CHECK(theoretical_k_euclidean(more_kappa) > k0);
  CHECK(theoretical_k_euclidean(more_ratio) > k0);
  CHECK(theoretical_k_euclidean(more_kappa) == doctest::Approx(1.0 + 2.25 * (k0 - 1.0)));
  CHECK(theoretical_k_intrinsic(more_kappa) == doctest::Approx(k0));
}

TEST_CASE("required k is the clamped ceiling") {
  SpannerParams s = params(2.0, 2, 1000);
  CHECK(required_k(s) == static_cast<Index>(std::ceil(1.0 + 12.0 * std::log(1000.0))));
  s.n = 20;
  CHECK(required_k(s) == 19);
}

TEST_CASE("elongated ball radius") {
  CHECK(elongated_ball_radius(1.0, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(elongated_ball_radius(1.0, 1.0, 1e6) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-5));
  CHECK(elongated_ball_radius(1.0, 1.0, 1.0) == 0.0);
  CHECK(elongated_ball_radius(1.0, 0.1, 2.0) == 0.0);
  // Root of the implicit boundary at angle pi/2.
  CHECK(std::abs(elongated_ball_radius(2.0, 1.0, 3.0) - boundary_radius(2.0, 1.0, 3.0, std::numbers::pi / 2.0)) <=
        1e-9);
  for (double p : {1.5, 2.5, 4.0, 9.0})
    for (double alpha : {0.8, 1.0})
      CHECK(std::abs(elongated_ball_radius(1.7, alpha, p) - boundary_radius(1.7, alpha, p, std::numbers::pi / 2.0)) <=
            1e-9);
  double prev = 0.0;
  for (double p : {1.1, 1.5, 2.0, 3.0, 8.0}) {
    const double r = elongated_ball_radius(1.0, 1.0, p);
    CHECK(r > prev);
    prev = r;
  }
  CHECK(elongated_ball_radius(1.0, 0.9, 3.0) < elongated_ball_radius(1.0, 1.0, 3.0));
}

TEST_CASE("the ball lies inside the elongated set for 1 < p <= 2") {
  // For p <= 2 the nearest boundary point is at pi/2. For p > 2 it is the
  // tip on the x-y axis at s/2, below the pi/2 distance the formula returns.
  for (double p : {1.2, 1.5, 2.0}) {
    const double r = elongated_ball_radius(1.0, 1.0, p);
    for (int a = 0; a <= 64; ++a) {
      const double phi = std::numbers::pi * a / 64.0;
      CHECK(boundary_radius(1.0, 1.0, p, phi) >= r * (1.0 - 1e-9));
    }
  }
  for (double p : {3.0, 6.0}) {
    CHECK(boundary_radius(1.0, 1.0, p, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(elongated_ball_radius(1.0, 1.0, p) > 0.5);
  }
}

TEST_CASE("critical edges on collinear points") {
  const PointCloud c = collinear3();
  CHECK_FALSE(is_critical_edge(c, 2.0, 0, 2));
  CHECK(is_critical_edge(c, 2.0, 0, 1));
  CHECK(is_critical_edge(c, 1.0, 0, 2));  // p = 1: the direct edge ties
  CHECK(critical_edges(c, 2.0) == std::vector<std::pair<Index, Index>>{{0, 1}, {1, 2}});
}

TEST_CASE("critical edges match exhaustive enumeration") {
  for (std::uint64_t seed = 0; seed < 15; ++seed)
    for (double p : {1.5, 2.0, 4.0}) {
      const PointCloud c = sample_distribution(SampleDistribution::UniformCube, 2, 9, seed);
      const Eigen::MatrixXd len = oracle::euclidean(c.points());
      const Eigen::MatrixXd best = oracle::enumerate_paths(len, p);
      std::vector<std::pair<Index, Index>> want;
      for (Index i = 0; i < 9; ++i)
        for (Index j = i + 1; j < 9; ++j)
          if (std::pow(len(i, j), p) <= std::pow(best(i, j), p) * (1.0 + 1e-12)) want.emplace_back(i, j);
      CHECK(critical_edges(c, p) == want);
    }
}

TEST_CASE("a subgraph holding every critical edge is a 1-spanner") {
  const PointCloud c = sample_distribution(SampleDistribution::UniformCube, 2, 40, 3);
  const double p = 2.0;
  std::vector<NeighborGraph::Edge> edges;
  for (auto [i, j] : critical_edges(c, p)) edges.push_back({i, j, (c.point(i) - c.point(j)).norm()});
  const NeighborGraph h(40, edges, 0);
  PwspdQueryConfig q;
  q.p = p;
  CHECK(oracle::max_rel_diff(pwspd_all_pairs(h, q).values, pwspd_all_pairs(complete_graph(c), q).values) <= 1e-12);
  // Dropping any one critical edge breaks it.
  for (std::size_t drop = 0; drop < edges.size(); drop += 7) {
    auto fewer = edges;
    fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(drop));
    const NeighborGraph h2(40, fewer, 0);
    CHECK(pwspd_pair(h2, q, edges[drop].i, edges[drop].j) > edges[drop].length * (1.0 + 1e-12));
  }
}

TEST_CASE("one-spanner verification: trivial cases") {
  const PointCloud c = collinear3();
  CHECK(verify_one_spanner(c, 2.0, 1));
  CHECK(verify_one_spanner_all_pairs(c, 2.0, 1));
  const PointCloud r = sample_distribution(SampleDistribution::UniformCube, 2, 30, 4);
  CHECK(verify_one_spanner(r, 1.5, 29));
  CHECK(verify_one_spanner_all_pairs(r, 1.5, 29));
}

TEST_CASE("fast and literal spanner checks agree on every k") {
  for (std::uint64_t seed = 0; seed < 6; ++seed)
    for (double p : {1.2, 2.0, 5.0}) {
      const PointCloud c = sample_distribution(SampleDistribution::UniformCube, 2 + static_cast<int>(seed % 2), 60, seed);
      const SpannerChecker checker(c, p, 59);
      bool seen = false;
      for (Index k = 1; k <= 59; k += (k < 20 ? 1 : 6)) {
        const bool fast = checker.is_spanner(k);
        const bool literal = verify_one_spanner_all_pairs(c, p, k);
        CHECK(fast == literal);
        CHECK(verify_one_spanner(c, p, k) == literal);
        // Monotone in k.
        if (seen) CHECK(fast);
        seen = seen || fast;
      }
    }
}

TEST_CASE("disconnected kNN graphs fail the spanner check") {
  PointMatrix x(8, 1);
  x << 0, 0.1, 0.2, 0.3, 10, 10.1, 10.2, 10.3;
  const PointCloud c(x, 1);
  CHECK_FALSE(verify_one_spanner(c, 2.0, 2));
  CHECK_FALSE(verify_one_spanner_all_pairs(c, 2.0, 2));
  CHECK_FALSE(SpannerChecker(c, 2.0, 7).is_spanner(2));
}

TEST_CASE("first spanner k from the grid") {
  const PointCloud c = sample_distribution(SampleDistribution::UniformCube, 2, 120, 9);
  const SpannerChecker checker(c, 2.0, 60);
  std::vector<Index> grid;
  for (Index k = 1; k <= 60; ++k) grid.push_back(k);
  const Index first = checker.first_spanner_k(grid);
  REQUIRE(first > 0);
  CHECK(checker.is_spanner(first));
  if (first > 1) CHECK_FALSE(checker.is_spanner(first - 1));
  CHECK(checker.first_spanner_k({1}) == (first == 1 ? 1 : -1));
}

TEST_CASE("theoretical k gives a 1-spanner on 300 uniform points") {
  Index successes = 0;
  const Index k = required_k(params(2.0, 2, 300));
  for (std::uint64_t t = 0; t < 20; ++t)
    successes += verify_one_spanner(sample_distribution(SampleDistribution::UniformCube, 2, 300, 1000 + t), 2.0, k)
                     ? 1
                     : 0;
  CHECK(successes >= 19);
}

TEST_CASE("sample distributions") {
  const PointCloud cube = sample_distribution(SampleDistribution::UniformCube, 3, 500, 1);
  CHECK(cube.intrinsic_dim() == 3);
  CHECK(cube.points().minCoeff() >= 0.0);
  CHECK(cube.points().maxCoeff() < 1.0);
  const PointCloud sphere = sample_distribution(SampleDistribution::Sphere, 3, 500, 1);
  CHECK(sphere.intrinsic_dim() == 2);
  for (Index i = 0; i < 500; ++i) CHECK(sphere.point(i).norm() == doctest::Approx(1.0).epsilon(1e-14));
  const PointCloud gauss = sample_distribution(SampleDistribution::Gaussian, 2, 20000, 1);
  CHECK(std::abs(gauss.points().col(0).mean()) < 0.03);
  CHECK(parse_distribution("sphere") == SampleDistribution::Sphere);
  CHECK(to_string(parse_distribution("uniform-cube")) == "uniform-cube");
  CHECK_THROWS_AS(parse_distribution("cauchy"), InvalidArgument);
  CHECK(sample_distribution(SampleDistribution::UniformCube, 2, 10, 5).points() ==
        sample_distribution(SampleDistribution::UniformCube, 2, 10, 5).points());
}

TEST_CASE("heatmap: degenerate grid and basic shape") {
  HeatmapConfig cfg;
  cfg.dim = 2;
  cfg.n_grid = {30};
  cfg.k_grid = {29};
  cfg.trials = 3;
  const HeatmapResult full = spanner_heatmap(cfg);
  CHECK(full.success_fraction[0][0] == 1.0);

  cfg.n_grid = {60, 120};
  cfg.k_grid.clear();
  for (Index k = 1; k <= 40; ++k) cfg.k_grid.push_back(k);
  const HeatmapResult r = spanner_heatmap(cfg);
  for (const auto& row : r.success_fraction) {
    CHECK(std::is_sorted(row.begin(), row.end()));
    for (double f : row) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }
  CHECK(r.trials_per_cell == 3);
  CHECK(r.first_all_success_k.size() == 2);
  CHECK(spanner_heatmap(cfg).success_fraction == r.success_fraction);

  cfg.k_grid = {3, 2};
  CHECK_THROWS_AS(spanner_heatmap(cfg), InvalidArgument);
  cfg.k_grid = {2};
  cfg.trials = 0;
  CHECK_THROWS_AS(spanner_heatmap(cfg), InvalidArgument);
}

TEST_CASE("line fit") {
  auto [m, c] = fit_line({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0});
  CHECK(m == doctest::Approx(2.0));
  CHECK(c == doctest::Approx(1.0));
  CHECK(std::isnan(fit_line({1.0}, {2.0}).first));
}
