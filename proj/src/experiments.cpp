#include "pwspd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pwspd/neighbors.hpp"
#include "pwspd/parallel.hpp"
#include "pwspd/paths.hpp"
#include "pwspd/random.hpp"
#include "pwspd/spanner.hpp"

namespace pwspd {

// --- Datasets -------------------------------------------------------------------

std::vector<std::string> dataset_names() { return {"two-rings", "long-bottleneck", "short-bottleneck"}; }

void DatasetSpec::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw InvalidArgument(std::string(what) + " must be positive");
  };
  if (name == "two-rings") {
    if (ring_points < 2) throw InvalidArgument("each ring needs at least 2 points");
    positive(inner_radius, "inner radius");
    positive(outer_radius, "outer radius");
    positive(radial_noise, "radial noise");
  } else if (name == "long-bottleneck") {
    if (disc_points < 4) throw InvalidArgument("disc point count must be >= 4");
    if (strip_points < 0) throw InvalidArgument("strip point count must be >= 0");
    positive(disc_radius, "disc radius");
    positive(disc_separation, "disc separation");
    positive(strip_length, "strip length");
    positive(strip_width, "strip width");
  } else if (name == "short-bottleneck") {
    if (rect_points < 2) throw InvalidArgument("each rectangle needs at least 2 points");
    if (bridge_points < 0) throw InvalidArgument("bridge point count must be >= 0");
    positive(rect_length, "rectangle length");
    positive(rect_width, "rectangle width");
    positive(bridge_length, "bridge length");
    positive(bridge_width, "bridge width");
  } else {
    throw InvalidArgument("unknown dataset '" + name + "'");
  }
}

PointCloud gen_dataset(const DatasetSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<double> xs, ys;
  std::vector<int> labels;
  auto add = [&](double x, double y, int label) {
    xs.push_back(x);
    ys.push_back(y);
    labels.push_back(label);
  };

  if (spec.name == "two-rings") {
    const double radii[2] = {spec.inner_radius, spec.outer_radius};
    for (int ring = 0; ring < 2; ++ring)
      for (Index i = 0; i < spec.ring_points; ++i) {
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        const double r = radii[ring] + spec.radial_noise * rng.normal();
        add(r * std::cos(theta), r * std::sin(theta), ring);
      }
  } else if (spec.name == "long-bottleneck") {
    const double mid = 0.5 * spec.disc_separation;
    auto disc = [&](double cx, Index count, int label) {
      for (Index i = 0; i < count; ++i) {
        const double r = spec.disc_radius * std::sqrt(rng.uniform());
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        add(cx + r * std::cos(theta), r * std::sin(theta), label);
      }
    };
    disc(0.0, spec.disc_points, 0);
    disc(spec.disc_separation, spec.disc_points / 2, 1);
    for (Index i = 0; i < spec.strip_points; ++i) {
      const double x = mid + spec.strip_length * (rng.uniform() - 0.5);
      const double y = spec.strip_width * (rng.uniform() - 0.5);
      add(x, y, x < mid ? 0 : 1);
    }
  } else {
    // Two rectangles stacked along y, bridged at the middle of their long side.
    const double top = spec.rect_width + spec.bridge_length;
    for (int rect = 0; rect < 2; ++rect)
      for (Index i = 0; i < spec.rect_points; ++i)
        add(spec.rect_length * rng.uniform(), rect * top + spec.rect_width * rng.uniform(), rect);
    const double cx = 0.5 * spec.rect_length;
    const double cy = spec.rect_width + 0.5 * spec.bridge_length;
    for (Index i = 0; i < spec.bridge_points; ++i) {
      const double x = cx + spec.bridge_width * (rng.uniform() - 0.5);
      const double y = spec.rect_width + spec.bridge_length * rng.uniform();
      add(x, y, y < cy ? 0 : 1);
    }
  }

  PointMatrix pts(static_cast<Index>(xs.size()), 2);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pts(static_cast<Index>(i), 0) = xs[i];
    pts(static_cast<Index>(i), 1) = ys[i];
  }
  return PointCloud(std::move(pts), 2, std::move(labels));
}

// --- Poisson point process ----------------------------------------------------

double Box::volume() const {
  if (lo.size() != hi.size() || lo.size() < 1) throw InvalidArgument("box corners must share a dimension >= 1");
  double v = 1.0;
  for (Index c = 0; c < lo.size(); ++c) {
    if (!(hi[c] > lo[c])) throw InvalidArgument("box must have positive extent in every dimension");
    v *= hi[c] - lo[c];
  }
  return v;
}

PointMatrix sample_ppp(double intensity, const Box& region, std::uint64_t seed) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) throw InvalidArgument("intensity must be positive");
  const double mean = intensity * region.volume();
  if (!(mean < kPppMeanLimit)) throw InvalidArgument("expected point count exceeds the 1e8 guard");
  Rng rng(seed);
  const auto count = static_cast<Index>(rng.poisson(mean));
  const Index dim = region.lo.size();
  PointMatrix pts(count, dim);
  for (Index i = 0; i < count; ++i)
    for (Index c = 0; c < dim; ++c) pts(i, c) = rng.uniform(region.lo[c], region.hi[c]);
  return pts;
}

// --- Fluctuation exponent -------------------------------------------------------

std::vector<Index> default_chi_n_grid() { return {2048, 4096, 8192, 16384}; }

double chi_from_slope(double slope, int d) { return slope * static_cast<double>(d) / 2.0 + 1.0; }

double student_t_975(Index dof) {
  static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                     2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                     2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof < 1) return std::numeric_limits<double>::quiet_NaN();
  if (dof <= 30) return table[dof - 1];
  if (dof <= 60) return 2.000;
  if (dof <= 120) return 1.980;
  return 1.960;
}

double chi_trial_value(int d, double p, Index n, Index k, std::uint64_t seed) {
  Rng rng(seed);
  PointMatrix pts(n + 2, d);
  for (Index i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) pts(i, c) = rng.uniform();
  pts.row(n).setConstant(0.5);
  pts.row(n + 1).setConstant(0.5);
  pts(n, 0) = 0.25;
  pts(n + 1, 0) = 0.75;
  const PointCloud cloud(std::move(pts), d);
  const NeighborGraph graph = knn_graph(cloud, std::min(k, n + 1));
  const PathEngine engine(graph, p);
  DijkstraWorkspace ws;
  StopRule stop;
  stop.target = n + 1;
  engine.run(n, stop, ws);
  if (!ws.settled[n + 1]) return kInfinity;
  return std::pow(static_cast<double>(n), (p - 1.0) / (p * d)) * engine.value_of(ws.cost[n + 1]);
}

ChiEstimate estimate_chi(const ChiConfig& config) {
  if (config.d < 2) throw InvalidArgument("chi estimation needs d >= 2");
  if (!(config.p > 1.0)) throw InvalidArgument("chi estimation needs p > 1");
  if (config.trials < 2) throw InvalidArgument("chi estimation needs at least 2 trials per n");
  if (config.n_grid.size() < 2) throw InvalidArgument("chi estimation needs at least 2 sample sizes");
  for (std::size_t a = 1; a < config.n_grid.size(); ++a)
    if (config.n_grid[a] <= config.n_grid[a - 1]) throw InvalidArgument("n grid must be strictly ascending");
  if (config.n_grid.front() < 4) throw InvalidArgument("sample sizes must be >= 4");

  ChiEstimate out;
  out.d = config.d;
  out.p = config.p;
  out.n_grid = config.n_grid;
  out.trials_per_n = config.trials;
  const std::size_t nn = config.n_grid.size();
  const auto trials = static_cast<std::size_t>(config.trials);
  for (Index n : config.n_grid) out.k_per_n.push_back(required_k({config.p, config.d, n, 1.0, 1.0}));

  // values[a * trials + t]; status 0 ok, 1 resampled, 2 failed twice.
  std::vector<double> values(nn * trials, kInfinity);
  std::vector<int> status(nn * trials, 0);
  for (std::size_t a = 0; a < nn; ++a) {
    const Index n = config.n_grid[a];
    parallel_for(trials, [&](std::size_t t) {
      const std::size_t job = a * trials + t;
      double v = chi_trial_value(config.d, config.p, n, out.k_per_n[a], derive_seed(config.seed, {a, t}));
      if (!(v < kInfinity)) {
        status[job] = 1;
        v = chi_trial_value(config.d, config.p, n, out.k_per_n[a], derive_seed(config.seed, {a, t, 1}));
        if (!(v < kInfinity)) status[job] = 2;
      }
      values[job] = v;
    });
    if (config.progress) config.progress("chi: n=" + std::to_string(n) + " done");
  }

  std::vector<double> log_n, log_var;
  for (std::size_t a = 0; a < nn; ++a) {
    double sum = 0.0;
    Index count = 0, resampled = 0, failed = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t job = a * trials + t;
      resampled += status[job] >= 1 ? 1 : 0;
      failed += status[job] == 2 ? 1 : 0;
      if (values[job] < kInfinity) {
        sum += values[job];
        ++count;
      }
    }
    const double mean = count > 0 ? sum / static_cast<double>(count) : kInfinity;
    double ss = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double v = values[a * trials + t];
      if (v < kInfinity) ss += (v - mean) * (v - mean);
    }
    const double var = count > 1 ? ss / static_cast<double>(count - 1) : std::numeric_limits<double>::quiet_NaN();
    out.means.push_back(mean);
    out.variances.push_back(var);
    out.valid_trials.push_back(count);
    out.resampled.push_back(resampled);
    out.failures.push_back(failed);
    log_n.push_back(std::log(static_cast<double>(config.n_grid[a])));
    log_var.push_back(std::log(var));
  }

  std::tie(out.slope, out.intercept) = fit_line(log_n, log_var);
  const double m = static_cast<double>(nn);
  double mx = 0.0;
  for (double x : log_n) mx += x;
  mx /= m;
  double sxx = 0.0, ssr = 0.0;
  for (std::size_t a = 0; a < nn; ++a) {
    const double r = log_var[a] - (out.intercept + out.slope * log_n[a]);
    out.residuals.push_back(r);
    ssr += r * r;
    sxx += (log_n[a] - mx) * (log_n[a] - mx);
  }
  const Index dof = static_cast<Index>(nn) - 2;
  out.slope_se = dof > 0 ? std::sqrt(ssr / static_cast<double>(dof) / sxx) : std::numeric_limits<double>::quiet_NaN();
  const double half = student_t_975(dof) * out.slope_se;
  out.slope_ci_low = out.slope - half;
  out.slope_ci_high = out.slope + half;
  out.chi = chi_from_slope(out.slope, config.d);
  out.chi_ci_low = chi_from_slope(out.slope_ci_low, config.d);
  out.chi_ci_high = chi_from_slope(out.slope_ci_high, config.d);
  return out;
}

}  // namespace pwspd
