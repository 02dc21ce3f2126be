#include "pwspd/spanner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pwspd/core.hpp"
#include "pwspd/parallel.hpp"
#include "pwspd/paths.hpp"
#include "pwspd/random.hpp"

namespace pwspd {

double theoretical_k_slope(const SpannerParams& params) {
  if (!(params.p > 1.0)) throw InvalidArgument("the kNN spanner bound needs p > 1");
  if (params.d < 1) throw InvalidArgument("dimension must be >= 1");
  if (params.kappa < 1.0 || params.density_ratio < 1.0)
    throw InvalidArgument("kappa and the density ratio must be >= 1");
  const double base = 4.0 / (std::pow(4.0, 1.0 - 1.0 / params.p) - 1.0);
  return params.kappa * params.kappa * 3.0 * params.density_ratio * std::pow(base, 0.5 * params.d);
}

double theoretical_k_euclidean(const SpannerParams& params) {
  if (params.n < 1) throw InvalidArgument("n must be >= 1");
  return 1.0 + theoretical_k_slope(params) * std::log(static_cast<double>(params.n));
}

double theoretical_k_intrinsic(const SpannerParams& params) {
  SpannerParams limit = params;
  limit.kappa = 1.0;
  return theoretical_k_euclidean(limit);
}

Index required_k(const SpannerParams& params) {
  const double k = std::ceil(theoretical_k_euclidean(params));
  return std::min<Index>(static_cast<Index>(k), params.n - 1);
}

double elongated_ball_radius(double s, double alpha, double p) {
  if (!(s > 0.0) || !(alpha > 0.0) || alpha > 1.0 || !(p >= 1.0))
    throw InvalidArgument("elongated_ball_radius needs s > 0, alpha in (0, 1], p >= 1");
  const double inner = std::pow(alpha, 2.0 / p) / std::pow(4.0, 1.0 / p) - 0.25;
  return inner > 0.0 ? s * std::sqrt(inner) : 0.0;
}

bool is_critical_edge(const PointCloud& cloud, double p, Index i, Index j) {
  if (i == j) throw InvalidArgument("an edge needs two distinct endpoints");
  const NeighborGraph graph = complete_graph(cloud);
  const PathEngine engine(graph, p);
  DijkstraWorkspace ws;
  StopRule stop;
  stop.target = j;
  engine.run(i, stop, ws);
  const double direct = engine.cost_of_length(std::sqrt(squared_distance(cloud.points(), i, j)));
  return ws.cost[j] >= direct * (1.0 - 1e-12);
}

std::vector<std::pair<Index, Index>> critical_edges(const PointCloud& cloud, double p) {
  const NeighborGraph graph = complete_graph(cloud);
  const PathEngine engine(graph, p);
  const Index n = cloud.size();
  std::vector<std::vector<Index>> per_source(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t us) {
    thread_local DijkstraWorkspace ws;
    const Index i = static_cast<Index>(us);
    engine.run(i, {}, ws);
    for (Index j = i + 1; j < n; ++j) {
      const double direct = engine.cost_of_length(std::sqrt(squared_distance(cloud.points(), i, j)));
      if (direct > 0.0 && ws.cost[j] >= direct * (1.0 - 1e-12)) per_source[i].push_back(j);
    }
  });
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < n; ++i)
    for (Index j : per_source[i]) out.emplace_back(i, j);
  return out;
}

// --- SpannerChecker -----------------------------------------------------------

namespace {

inline double powered(double squared, double p) {
  return p == 2.0 ? squared : std::pow(squared, 0.5 * p);
}

}  // namespace

SpannerChecker::SpannerChecker(const PointCloud& cloud, double p, Index k_max)
    : cloud_(cloud), p_(p), lists_(knn_lists(cloud, std::min<Index>(k_max, cloud.size() - 1))) {
  if (!(p >= 1.0)) throw InvalidArgument("spanner checks need p >= 1");
  const Index n = cloud.size();
  const Index k = lists_.k;
  const auto& pts = cloud.points();

  // Rank of j in i's list, via a sorted (neighbor, rank) copy per row.
  std::vector<std::pair<Index, Index>> sorted(static_cast<std::size_t>(n * k));
  std::vector<double> list_weight(static_cast<std::size_t>(n * k));
  for (Index i = 0; i < n; ++i) {
    for (Index r = 0; r < k; ++r) {
      sorted[i * k + r] = {lists_.neighbor(i, r), r};
      const double d = lists_.dist(i, r);
      list_weight[i * k + r] = powered(d * d, p);
    }
    std::sort(sorted.begin() + i * k, sorted.begin() + (i + 1) * k);
  }
  auto rank_of = [&](Index i, Index j) {
    auto b = sorted.begin() + i * k;
    auto e = b + k;
    auto it = std::lower_bound(b, e, std::pair<Index, Index>{j, -1});
    return (it != e && it->first == j) ? it->second : k;
  };

  // A pair is dropped when some listed neighbor z of i or j gives a two-hop
  // cost strictly below the direct cost.
  auto has_detour = [&](Index a, Index b, double direct) {
    for (Index r = 0; r < k; ++r) {
      const Index z = lists_.neighbor(a, r);
      if (z == b) continue;
      const double first = list_weight[a * k + r];
      if (first >= direct) break;
      if (first + powered(squared_distance(pts, z, b), p) < direct * (1.0 - 1e-12)) return true;
    }
    return false;
  };

  std::vector<std::vector<Candidate>> per_source(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t us) {
    const Index i = static_cast<Index>(us);
    for (Index j = i + 1; j < n; ++j) {
      const double sq = squared_distance(pts, i, j);
      if (!(sq > 0.0)) continue;
      const double direct = powered(sq, p);
      if (has_detour(i, j, direct) || has_detour(j, i, direct)) continue;
      per_source[i].push_back({i, j, std::sqrt(sq), std::min(rank_of(i, j), rank_of(j, i))});
    }
  });
  for (auto& v : per_source) candidates_.insert(candidates_.end(), v.begin(), v.end());
}

bool SpannerChecker::is_spanner(Index k, double tol) const {
  if (k < 1 || k > lists_.k) throw InvalidArgument("k outside the checker's neighbor range");
  // Pairs already joined by an edge of H need no path search.
  std::vector<const Candidate*> open;
  for (const auto& c : candidates_)
    if (c.rank >= k) open.push_back(&c);
  if (open.empty()) return true;
  const NeighborGraph graph = graph_from_lists(lists_, k);
  const PathEngine engine(graph, p_);
  DijkstraWorkspace ws;
  for (const Candidate* c : open) {
    StopRule stop;
    stop.target = c->j;
    stop.cost_cutoff = engine.cost_of_length(c->length + tol) * (1.0 + 1e-12);
    engine.run(c->i, stop, ws);
    if (!ws.settled[c->j]) return false;
    if (engine.value_of(ws.cost[c->j]) > c->length + tol) return false;
  }
  return true;
}

Index SpannerChecker::first_spanner_k(const std::vector<Index>& k_grid, double tol) const {
  // Binary search relies on monotonicity: H_k is a subgraph of H_{k'} for k < k'.
  Index lo = 0;
  Index hi = static_cast<Index>(k_grid.size());
  while (lo < hi) {
    const Index mid = (lo + hi) / 2;
    const Index k = std::min(k_grid[mid], lists_.k);
    if (is_spanner(k, tol)) hi = mid;
    else lo = mid + 1;
  }
  return lo < static_cast<Index>(k_grid.size()) ? k_grid[lo] : -1;
}

bool verify_one_spanner(const PointCloud& cloud, double p, Index k, double tol) {
  const Index n = cloud.size();
  if (k < 1 || k >= n) throw InvalidArgument("k must satisfy 1 <= k < n");
  if (k == n - 1) return true;
  const SpannerChecker checker(cloud, p, k);
  return checker.is_spanner(k, tol);
}

bool verify_one_spanner_all_pairs(const PointCloud& cloud, double p, Index k, double tol) {
  PwspdQueryConfig config;
  config.p = p;
  const DistanceMatrix full = pwspd_all_pairs(complete_graph(cloud), config);
  const DistanceMatrix sub = pwspd_all_pairs(knn_graph(cloud, k), config);
  if (sub.unreachable_pairs > 0) return false;
  return (full.values - sub.values).cwiseAbs().maxCoeff() <= tol;
}

// --- Heatmap ------------------------------------------------------------------

SampleDistribution parse_distribution(const std::string& name) {
  if (name == "uniform-cube" || name == "uniform") return SampleDistribution::UniformCube;
  if (name == "sphere") return SampleDistribution::Sphere;
  if (name == "gaussian") return SampleDistribution::Gaussian;
  throw InvalidArgument("unknown distribution '" + name + "' (uniform-cube|sphere|gaussian)");
}

std::string to_string(SampleDistribution dist) {
  switch (dist) {
    case SampleDistribution::UniformCube: return "uniform-cube";
    case SampleDistribution::Sphere: return "sphere";
    case SampleDistribution::Gaussian: return "gaussian";
  }
  return "unknown";
}

PointCloud sample_distribution(SampleDistribution dist, int dim, Index n, std::uint64_t seed) {
  if (dim < 1 || n < 1) throw InvalidArgument("sampling needs dim >= 1 and n >= 1");
  if (dist == SampleDistribution::Sphere && dim < 2) throw InvalidArgument("sphere sampling needs dim >= 2");
  Rng rng(seed);
  PointMatrix pts(n, dim);
  for (Index i = 0; i < n; ++i) {
    switch (dist) {
      case SampleDistribution::UniformCube:
        for (int c = 0; c < dim; ++c) pts(i, c) = rng.uniform();
        break;
      case SampleDistribution::Gaussian:
        for (int c = 0; c < dim; ++c) pts(i, c) = rng.normal();
        break;
      case SampleDistribution::Sphere: {
        double norm = 0.0;
        do {
          for (int c = 0; c < dim; ++c) pts(i, c) = rng.normal();
          norm = pts.row(i).norm();
        } while (norm == 0.0);
        pts.row(i) /= norm;
        break;
      }
    }
  }
  const int intrinsic = dist == SampleDistribution::Sphere ? dim - 1 : dim;
  return PointCloud(std::move(pts), intrinsic);
}

std::vector<Index> default_heatmap_n_grid() { return {250, 500, 1000, 2000, 4000}; }

std::vector<Index> default_heatmap_k_grid() {
  std::vector<Index> k;
  for (Index v = 1; v <= 200; ++v) k.push_back(v);
  return k;
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m < 2 || y.size() != m) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double mx = 0.0, my = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    mx += x[t];
    my += y[t];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    sxx += (x[t] - mx) * (x[t] - mx);
    sxy += (x[t] - mx) * (y[t] - my);
  }
  if (sxx == 0.0) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

HeatmapResult spanner_heatmap(const HeatmapConfig& config) {
  if (config.n_grid.empty() || config.k_grid.empty()) throw InvalidArgument("heatmap grids must be nonempty");
  if (config.trials < 1) throw InvalidArgument("trials must be >= 1");
  if (!(config.p >= 1.0)) throw InvalidArgument("p must be >= 1");
  for (std::size_t t = 1; t < config.n_grid.size(); ++t)
    if (config.n_grid[t] <= config.n_grid[t - 1]) throw InvalidArgument("n grid must be strictly ascending");
  for (std::size_t t = 1; t < config.k_grid.size(); ++t)
    if (config.k_grid[t] <= config.k_grid[t - 1]) throw InvalidArgument("k grid must be strictly ascending");
  if (config.k_grid.front() < 1) throw InvalidArgument("k grid values must be >= 1");
  if (config.n_grid.front() < 2) throw InvalidArgument("n grid values must be >= 2");

  HeatmapResult out;
  out.n_grid = config.n_grid;
  out.k_grid = config.k_grid;
  out.trials_per_cell = config.trials;
  const std::size_t nn = config.n_grid.size();
  const std::size_t nk = config.k_grid.size();
  const std::size_t trials = static_cast<std::size_t>(config.trials);

  // first_k[a * trials + t]: smallest grid k (as a grid position) that is a
  // 1-spanner for sample (a, t); nk when none is.
  std::vector<std::size_t> first_k(nn * trials, nk);
  for (std::size_t a = 0; a < nn; ++a) {
    const Index n = config.n_grid[a];
    // k values at or beyond n-1 give the complete graph.
    std::vector<Index> ks;
    for (Index k : config.k_grid) ks.push_back(std::min(k, n - 1));
    parallel_for(trials, [&](std::size_t t) {
      const PointCloud cloud =
          sample_distribution(config.distribution, config.dim, n, derive_seed(config.seed, {a, t}));
      const SpannerChecker checker(cloud, config.p, ks.back());
      const Index k_first = checker.first_spanner_k(ks, config.tol);
      if (k_first >= 0)
        first_k[a * trials + t] = static_cast<std::size_t>(std::find(ks.begin(), ks.end(), k_first) - ks.begin());
    });
    if (config.progress) config.progress("spanner-heatmap: n=" + std::to_string(n) + " done");
  }

  out.success_fraction.assign(nn, std::vector<double>(nk, 0.0));
  out.first_all_success_k.assign(nn, -1);
  std::vector<double> xs, ys;
  for (std::size_t a = 0; a < nn; ++a) {
    std::size_t worst = 0;
    for (std::size_t b = 0; b < nk; ++b) {
      std::size_t ok = 0;
      for (std::size_t t = 0; t < trials; ++t) ok += first_k[a * trials + t] <= b ? 1 : 0;
      out.success_fraction[a][b] = static_cast<double>(ok) / static_cast<double>(trials);
    }
    for (std::size_t t = 0; t < trials; ++t) worst = std::max(worst, first_k[a * trials + t]);
    if (worst < nk) {
      out.first_all_success_k[a] = config.k_grid[worst];
      xs.push_back(std::log(static_cast<double>(config.n_grid[a])));
      ys.push_back(static_cast<double>(config.k_grid[worst]));
    } else {
      ++out.skipped_columns;
    }
  }
  std::tie(out.transition_slope, out.transition_intercept) = fit_line(xs, ys);
  return out;
}

}  // namespace pwspd
