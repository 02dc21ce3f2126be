// pwspd: command-line front end for the PWSPD library.
//
// Exit codes: 0 success, 1 usage error (bad flags or parameter values),
// 2 runtime error (I/O, unparsable input).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pwspd/core.hpp"
#include "pwspd/experiments.hpp"
#include "pwspd/kernels.hpp"
#include "pwspd/neighbors.hpp"
#include "pwspd/parallel.hpp"
#include "pwspd/paths.hpp"
#include "pwspd/spanner.hpp"
#include "pwspd/spectral.hpp"
#include "pwspd/version.hpp"

namespace {

using json = nlohmann::ordered_json;
using pwspd::Index;
using pwspd::InvalidArgument;

// Resolved run configuration; echoed into every output.
struct RunConfig {
  std::string subcommand;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  json flags = json::object();

  json header() const {
    return {{"version", pwspd::kVersion}, {"subcommand", subcommand}, {"seed", seed}, {"flags", flags}};
  }
};

void progress(const std::string& line) { std::cerr << line << std::endl; }

// Writes the finished artifact to --out, or stdout when absent. Nothing is
// written until the computation has succeeded.
void emit(const RunConfig& rc, const std::string& body) {
  if (rc.out.empty()) {
    std::cout << body << std::flush;
    return;
  }
  std::ofstream f(rc.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + rc.out + " for writing");
  f << body;
  f.close();
  if (!f) throw std::runtime_error("write failed: " + rc.out);
}

std::string csv_preamble(const RunConfig& rc, const json& summary = nullptr) {
  std::string s = std::string("# pwspd ") + pwspd::kVersion + "\n# config: " + rc.header().dump() + "\n";
  if (!summary.is_null()) s += "# summary: " + summary.dump() + "\n";
  return s;
}

std::string json_document(const RunConfig& rc, json result) {
  json doc;
  doc["config"] = rc.header();
  doc["result"] = std::move(result);
  return doc.dump(2) + "\n";
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) throw InvalidArgument("not a number: '" + text + "'");
  return v;
}

// "a:step:b", "a:b" (unit step) or a comma list. Range values are a + i*step
// rounded to 12 decimals, so 1:0.2:8 yields 1.2 rather than 1.2000000000000002.
std::vector<double> parse_real_grid(const std::string& text) {
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) parts.push_back(item);
  std::vector<double> out;
  if (sep == ',') {
    for (const auto& item : parts) out.push_back(parse_number(item));
  } else {
    if (parts.size() < 2 || parts.size() > 3) throw InvalidArgument("range must be a:b or a:step:b, got '" + text + "'");
    const double a = parse_number(parts.front());
    const double b = parse_number(parts.back());
    const double step = parts.size() == 3 ? parse_number(parts[1]) : 1.0;
    if (!(step > 0.0) || b < a) throw InvalidArgument("empty or descending range '" + text + "'");
    for (Index i = 0;; ++i) {
      const double v = std::round((a + static_cast<double>(i) * step) * 1e12) / 1e12;
      if (v > b + 1e-9 * step) break;
      out.push_back(v);
    }
  }
  if (out.empty()) throw InvalidArgument("empty grid '" + text + "'");
  return out;
}

std::vector<Index> parse_index_grid(const std::string& text) {
  std::vector<Index> out;
  for (double v : parse_real_grid(text)) {
    if (v != std::floor(v) || v < 1.0) throw InvalidArgument("grid '" + text + "' must hold positive integers");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

// True when the file carries a gen-data summary header marking a label column.
bool header_says_labeled(const std::string& path) {
  std::ifstream in(path);
  const std::string tag = "# summary: ";
  for (std::string line; std::getline(in, line) && !line.empty() && line[0] == '#';) {
    if (line.rfind(tag, 0) != 0) continue;
    const json summary = json::parse(line.substr(tag.size()), nullptr, false);
    return summary.is_object() && summary.value("labeled", false);
  }
  return false;
}

// Loads a point CSV; intrinsic dimension 0 means the ambient dimension. The
// last column is a label when forced or when the file's header says so.
pwspd::PointCloud load_input(const std::string& path, int d, bool labels) {
  pwspd::PointCloud raw = pwspd::load_point_cloud(path, 1, {labels || header_says_labeled(path)});
  if (d == 0) d = static_cast<int>(raw.ambient_dim());
  return pwspd::PointCloud(raw.points(), d, raw.maybe_labels());
}

void add_common(CLI::App* sub, RunConfig& rc, unsigned& threads, bool with_format, const char* default_format = "csv") {
  sub->add_option("--seed", rc.seed, "Seed for all randomness")->capture_default_str();
  sub->add_option("--out", rc.out, "Output file (default: stdout)");
  sub->add_option("--threads", threads, "Worker threads, 0 = hardware (env PWSPD_THREADS)")
      ->envname("PWSPD_THREADS");
  if (with_format)
    sub->add_option("--format", rc.format, std::string("csv | json [") + default_format + "]")
        ->check(CLI::IsMember({"csv", "json"}));
}

// --- dist ---------------------------------------------------------------------

struct DistArgs {
  std::string input;
  bool labels = false;
  int d = 0;
  double p = 2.0;
  bool complete = false;
  Index k = 0;
  bool normalize = false;
  bool longest_leg = false;
  bool non_metric = false;
};

void run_dist(const DistArgs& a, RunConfig& rc) {
  const pwspd::PointCloud cloud = load_input(a.input, a.d, a.labels);
  const pwspd::NeighborGraph graph = a.k > 0 ? pwspd::knn_graph(cloud, a.k) : pwspd::complete_graph(cloud);
  pwspd::DistanceMatrix dist;
  if (a.longest_leg) {
    dist = pwspd::longest_leg_all_pairs(graph);
  } else {
    pwspd::PwspdQueryConfig q;
    q.p = a.p;
    q.normalize = a.normalize;
    q.d = cloud.intrinsic_dim();
    q.power.allow_non_metric = a.non_metric;
    dist = pwspd::pwspd_all_pairs(graph, q);
  }
  rc.flags = {{"input", a.input},
              {"labels", cloud.has_labels()},
              {"d", cloud.intrinsic_dim()},
              {"p", a.p},
              {"graph", a.k > 0 ? json(a.k) : json("complete")},
              {"normalize", a.normalize},
              {"longest_leg", a.longest_leg},
              {"non_metric", a.non_metric},
              {"format", rc.format}};
  json summary = {{"n", cloud.size()},
                  {"p", a.longest_leg ? json("inf") : json(a.p)},
                  {"normalized", dist.normalized},
                  {"checksum", pwspd::checksum(dist.values)},
                  {"unreachable_pairs", dist.unreachable_pairs}};
  if (rc.format == "json") {
    emit(rc, json_document(rc, summary));
  } else {
    std::ostringstream body;
    body << csv_preamble(rc, summary);
    pwspd::write_distance_csv(body, dist);
    emit(rc, body.str());
  }
}

// --- kernel -------------------------------------------------------------------

struct KernelArgs {
  std::string input;
  bool labels = false;
  int d = 0;
  std::string kind = "gaussian";
  double epsilon = 0.0;
  double epsilon_percentile = 15.0;
  Index k = 10;
  double alpha = 1.0;
  double p = 2.0;
  Index graph_k = 0;
};

void run_kernel(const KernelArgs& a, RunConfig& rc) {
  const pwspd::PointCloud cloud = load_input(a.input, a.d, a.labels);
  const pwspd::KernelKind kind = pwspd::parse_kernel_kind(a.kind);
  auto scale = [&](const pwspd::DistanceMatrix& dist) {
    return a.epsilon > 0.0 ? a.epsilon : pwspd::distance_percentile(dist, a.epsilon_percentile);
  };
  pwspd::KernelMatrix w;
  switch (kind) {
    case pwspd::KernelKind::Gaussian: {
      const pwspd::DistanceMatrix dist = pwspd::pairwise_euclidean(cloud);
      w = pwspd::gaussian_kernel(dist, scale(dist));
      break;
    }
    case pwspd::KernelKind::PwspdGaussian: {
      pwspd::PwspdQueryConfig q;
      q.p = a.p;
      q.d = cloud.intrinsic_dim();
      const auto graph = a.graph_k > 0 ? pwspd::knn_graph(cloud, a.graph_k) : pwspd::complete_graph(cloud);
      const pwspd::DistanceMatrix dist = pwspd::pwspd_all_pairs(graph, q);
      w = pwspd::gaussian_kernel(dist, scale(dist));
      break;
    }
    case pwspd::KernelKind::SelfTuning:
      w = pwspd::self_tuning_kernel(cloud, a.k);
      break;
    case pwspd::KernelKind::Diffusion:
      w = pwspd::diffusion_kernel(cloud, scale(pwspd::pairwise_euclidean(cloud)), a.alpha);
      break;
  }
  rc.flags = {{"input", a.input},
              {"labels", cloud.has_labels()},
              {"d", cloud.intrinsic_dim()},
              {"kind", a.kind},
              {"epsilon", a.epsilon},
              {"epsilon_percentile", a.epsilon_percentile},
              {"k", a.k},
              {"alpha", a.alpha},
              {"p", a.p},
              {"graph", a.graph_k > 0 ? json(a.graph_k) : json("complete")},
              {"format", rc.format}};
  json summary = {{"n", cloud.size()},
                  {"kind", pwspd::to_string(w.kind)},
                  {"epsilon", w.epsilon},
                  {"checksum", pwspd::checksum(w.values)}};
  if (rc.format == "json") {
    emit(rc, json_document(rc, summary));
  } else {
    pwspd::DistanceMatrix as_matrix;
    as_matrix.values = w.values;
    std::ostringstream body;
    body << csv_preamble(rc, summary);
    pwspd::write_distance_csv(body, as_matrix);
    emit(rc, body.str());
  }
}

// --- spanner-heatmap ----------------------------------------------------------

struct HeatmapArgs {
  int dim = 3;
  double p = 2.0;
  std::string distribution = "uniform-cube";
  std::string n_grid;
  std::string k_grid = "1:200";
  Index trials = 20;
  double tol = pwspd::kSpannerTolerance;
};

void run_heatmap(const HeatmapArgs& a, RunConfig& rc) {
  pwspd::HeatmapConfig cfg;
  cfg.dim = a.dim;
  cfg.p = a.p;
  cfg.distribution = pwspd::parse_distribution(a.distribution);
  cfg.n_grid = a.n_grid.empty() ? pwspd::default_heatmap_n_grid() : parse_index_grid(a.n_grid);
  cfg.k_grid = parse_index_grid(a.k_grid);
  cfg.trials = a.trials;
  cfg.seed = rc.seed;
  cfg.tol = a.tol;
  cfg.progress = progress;
  rc.flags = {{"dim", a.dim},           {"p", a.p},          {"distribution", a.distribution},
              {"n_grid", cfg.n_grid},   {"k_grid", cfg.k_grid}, {"trials", a.trials},
              {"tol", a.tol},           {"format", rc.format}};
  const pwspd::HeatmapResult r = pwspd::spanner_heatmap(cfg);
  json summary = {{"transition_slope", r.transition_slope},
                  {"transition_intercept", r.transition_intercept},
                  {"first_all_success_k", r.first_all_success_k},
                  {"skipped_columns", r.skipped_columns}};
  if (rc.format == "json") {
    summary["n_grid"] = r.n_grid;
    summary["k_grid"] = r.k_grid;
    summary["trials_per_cell"] = r.trials_per_cell;
    summary["success_fraction"] = r.success_fraction;
    emit(rc, json_document(rc, summary));
    return;
  }
  std::ostringstream body;
  body << csv_preamble(rc, summary) << "n,k,success_fraction\n";
  for (std::size_t i = 0; i < r.n_grid.size(); ++i)
    for (std::size_t j = 0; j < r.k_grid.size(); ++j)
      body << r.n_grid[i] << ',' << r.k_grid[j] << ',' << pwspd::format_double(r.success_fraction[i][j]) << '\n';
  emit(rc, body.str());
}

// --- chi ----------------------------------------------------------------------

struct ChiArgs {
  int d = 2;
  double p = 2.0;
  std::string n_grid;
  Index trials = 500;
};

void run_chi(const ChiArgs& a, RunConfig& rc) {
  pwspd::ChiConfig cfg;
  cfg.d = a.d;
  cfg.p = a.p;
  cfg.n_grid = a.n_grid.empty() ? pwspd::default_chi_n_grid() : parse_index_grid(a.n_grid);
  cfg.trials = a.trials;
  cfg.seed = rc.seed;
  cfg.progress = progress;
  rc.flags = {{"d", a.d}, {"p", a.p}, {"n_grid", cfg.n_grid}, {"trials", a.trials}, {"format", rc.format}};
  const pwspd::ChiEstimate r = pwspd::estimate_chi(cfg);
  json summary = {{"slope", r.slope},
                  {"slope_ci", {r.slope_ci_low, r.slope_ci_high}},
                  {"slope_se", r.slope_se},
                  {"intercept", r.intercept},
                  {"chi", r.chi},
                  {"chi_ci", {r.chi_ci_low, r.chi_ci_high}}};
  if (rc.format == "json") {
    summary["n_grid"] = r.n_grid;
    summary["k_per_n"] = r.k_per_n;
    summary["means"] = r.means;
    summary["variances"] = r.variances;
    summary["valid_trials"] = r.valid_trials;
    summary["resampled"] = r.resampled;
    summary["failures"] = r.failures;
    summary["residuals"] = r.residuals;
    emit(rc, json_document(rc, summary));
    return;
  }
  std::ostringstream body;
  body << csv_preamble(rc, summary) << "n,k,mean,variance,valid_trials,resampled,failures\n";
  for (std::size_t i = 0; i < r.n_grid.size(); ++i)
    body << r.n_grid[i] << ',' << r.k_per_n[i] << ',' << pwspd::format_double(r.means[i]) << ','
         << pwspd::format_double(r.variances[i]) << ',' << r.valid_trials[i] << ',' << r.resampled[i] << ','
         << r.failures[i] << '\n';
  emit(rc, body.str());
}

// --- cluster-sweep ------------------------------------------------------------

struct SweepArgs {
  std::string dataset;
  std::string input;
  int d = 0;
  std::string p_grid = "1:0.2:8";
  double epsilon_percentile = 15.0;
  std::string laplacian = "symmetric";
  int clusters = 2;
  int restarts = 10;
};

void run_sweep(const SweepArgs& a, RunConfig& rc) {
  pwspd::PointCloud cloud;
  if (!a.dataset.empty()) {
    pwspd::DatasetSpec spec;
    spec.name = a.dataset;
    spec.seed = rc.seed;
    cloud = pwspd::gen_dataset(spec);
  } else {
    cloud = load_input(a.input, a.d, true);
  }
  pwspd::SweepConfig cfg;
  cfg.epsilon_percentile = a.epsilon_percentile;
  cfg.laplacian = pwspd::parse_laplacian_kind(a.laplacian);
  cfg.clusters = a.clusters;
  cfg.restarts = a.restarts;
  const std::vector<double> grid = parse_real_grid(a.p_grid);
  rc.flags = {{"dataset", a.dataset.empty() ? json(nullptr) : json(a.dataset)},
              {"input", a.input.empty() ? json(nullptr) : json(a.input)},
              {"d", cloud.intrinsic_dim()},
              {"p_grid", grid},
              {"epsilon_percentile", a.epsilon_percentile},
              {"laplacian", pwspd::to_string(cfg.laplacian)},
              {"clusters", a.clusters},
              {"restarts", a.restarts},
              {"format", rc.format}};
  std::vector<pwspd::SweepPoint> points;
  for (double p : grid) {
    const double acc = pwspd::pwspd_spectral_clustering(cloud, p, cfg, rc.seed).accuracy;
    points.push_back({p, acc});
    progress("cluster-sweep: p=" + pwspd::format_double(p) + " accuracy=" + pwspd::format_double(acc));
  }
  const double baseline = pwspd::euclidean_spectral_clustering(cloud, cfg, rc.seed).accuracy;
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].accuracy > points[best].accuracy) best = i;
  json summary = {{"n", cloud.size()},
                  {"euclidean_accuracy", baseline},
                  {"best_p", points[best].p},
                  {"best_accuracy", points[best].accuracy}};
  if (rc.format == "json") {
    json curve = json::array();
    for (const auto& pt : points) curve.push_back({{"p", pt.p}, {"accuracy", pt.accuracy}});
    summary["sweep"] = curve;
    emit(rc, json_document(rc, summary));
    return;
  }
  std::ostringstream body;
  body << csv_preamble(rc, summary) << "p,accuracy\n";
  for (const auto& pt : points) body << pwspd::format_double(pt.p) << ',' << pwspd::format_double(pt.accuracy) << '\n';
  emit(rc, body.str());
}

// --- gen-data -----------------------------------------------------------------

struct GenArgs {
  std::string name;
  std::string distribution;
  Index n = 1000;
  int dim = 2;
};

void run_gen(const GenArgs& a, RunConfig& rc) {
  pwspd::PointCloud cloud;
  if (!a.name.empty()) {
    pwspd::DatasetSpec spec;
    spec.name = a.name;
    spec.seed = rc.seed;
    cloud = pwspd::gen_dataset(spec);
    rc.flags = {{"name", a.name}};
  } else {
    cloud = pwspd::sample_distribution(pwspd::parse_distribution(a.distribution), a.dim, a.n, rc.seed);
    rc.flags = {{"distribution", a.distribution}, {"n", a.n}, {"dim", a.dim}};
  }
  json summary = {{"n", cloud.size()},
                  {"ambient_dim", cloud.ambient_dim()},
                  {"intrinsic_dim", cloud.intrinsic_dim()},
                  {"labeled", cloud.has_labels()}};
  std::ostringstream body;
  body << csv_preamble(rc, summary);
  pwspd::write_point_cloud(body, cloud);
  emit(rc, body.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-weighted shortest path distances: distances, kernels, spanner and clustering experiments"};
  app.set_version_flag("--version", pwspd::kVersion);
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  RunConfig rc;
  unsigned threads = 0;

  DistArgs dist;
  CLI::App* dist_cmd = app.add_subcommand("dist", "All-pairs PWSPD matrix of a point CSV");
  dist_cmd->add_option("--input", dist.input, "Point CSV")->required();
  dist_cmd->add_flag("--labels", dist.labels, "Last input column is a label (auto-detected for gen-data files)");
  dist_cmd->add_option("--d", dist.d, "Intrinsic dimension (default: ambient)");
  dist_cmd->add_option("--p", dist.p, "Path power")->capture_default_str();
  auto* complete_flag = dist_cmd->add_flag("--complete", dist.complete, "Complete graph (the default)");
  dist_cmd->add_option("--k", dist.k, "Symmetric kNN graph with k neighbors")->excludes(complete_flag);
  dist_cmd->add_flag("--normalize", dist.normalize, "Multiply by n^((p-1)/(pd))");
  dist_cmd->add_flag("--longest-leg", dist.longest_leg, "Minimax leg length instead of l_p");
  dist_cmd->add_flag("--non-metric", dist.non_metric, "Allow p < 1");
  add_common(dist_cmd, rc, threads, true);

  KernelArgs kernel;
  CLI::App* kernel_cmd = app.add_subcommand("kernel", "Affinity matrix of a point CSV");
  kernel_cmd->add_option("--input", kernel.input, "Point CSV")->required();
  kernel_cmd->add_flag("--labels", kernel.labels, "Last input column is a label (auto-detected for gen-data files)");
  kernel_cmd->add_option("--d", kernel.d, "Intrinsic dimension (default: ambient)");
  kernel_cmd->add_option("--kind", kernel.kind, "Kernel")
      ->check(CLI::IsMember({"gaussian", "self-tuning", "diffusion", "pwspd-gaussian"}))
      ->capture_default_str();
  auto* eps_opt = kernel_cmd->add_option("--epsilon", kernel.epsilon, "Explicit kernel scale");
  kernel_cmd->add_option("--epsilon-percentile", kernel.epsilon_percentile, "Scale as a distance percentile")
      ->excludes(eps_opt)
      ->capture_default_str();
  kernel_cmd->add_option("--k", kernel.k, "Neighbor for self-tuning scales")->capture_default_str();
  kernel_cmd->add_option("--alpha", kernel.alpha, "Diffusion normalization power")->capture_default_str();
  kernel_cmd->add_option("--p", kernel.p, "Path power for pwspd-gaussian")->capture_default_str();
  kernel_cmd->add_option("--graph-k", kernel.graph_k, "kNN graph for pwspd-gaussian (default: complete)");
  add_common(kernel_cmd, rc, threads, true);

  HeatmapArgs heat;
  CLI::App* heat_cmd = app.add_subcommand("spanner-heatmap", "1-spanner success fraction over (n, k)");
  heat_cmd->add_option("--dim", heat.dim, "Ambient dimension")->capture_default_str();
  heat_cmd->add_option("--p", heat.p, "Path power")->capture_default_str();
  heat_cmd->add_option("--distribution", heat.distribution, "uniform-cube | sphere | gaussian")
      ->capture_default_str();
  heat_cmd->add_option("--n-grid", heat.n_grid, "Sample sizes (list or a:step:b)");
  heat_cmd->add_option("--k-grid", heat.k_grid, "Neighbor counts (list or a:step:b)")->capture_default_str();
  heat_cmd->add_option("--trials", heat.trials, "Trials per cell")->capture_default_str();
  heat_cmd->add_option("--tol", heat.tol, "Spanner tolerance")->capture_default_str();
  add_common(heat_cmd, rc, threads, true);

  ChiArgs chi;
  CLI::App* chi_cmd = app.add_subcommand("chi", "Fluctuation exponent from variance scaling");
  chi_cmd->add_option("--d", chi.d, "Dimension")->capture_default_str();
  chi_cmd->add_option("--p", chi.p, "Path power")->capture_default_str();
  chi_cmd->add_option("--n-grid", chi.n_grid, "Sample sizes (list or a:step:b)");
  chi_cmd->add_option("--trials", chi.trials, "Trials per n")->capture_default_str();
  add_common(chi_cmd, rc, threads, true, "json");

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("cluster-sweep", "Spectral clustering accuracy against p");
  auto* ds_opt = sweep_cmd->add_option("--dataset", sweep.dataset, "Synthetic dataset name");
  auto* in_opt = sweep_cmd->add_option("--input", sweep.input, "Labeled point CSV (label in last column)");
  ds_opt->excludes(in_opt);
  sweep_cmd->add_option("--d", sweep.d, "Intrinsic dimension of --input (default: ambient)");
  sweep_cmd->add_option("--p-grid", sweep.p_grid, "p values (list or a:step:b)")->capture_default_str();
  sweep_cmd->add_option("--epsilon-percentile", sweep.epsilon_percentile, "Kernel scale percentile")
      ->capture_default_str();
  sweep_cmd->add_option("--laplacian", sweep.laplacian, "unnormalized | random-walk | symmetric")
      ->capture_default_str();
  sweep_cmd->add_option("--clusters", sweep.clusters, "Number of clusters")->capture_default_str();
  sweep_cmd->add_option("--restarts", sweep.restarts, "k-means restarts")->capture_default_str();
  add_common(sweep_cmd, rc, threads, true);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic point CSV");
  auto* name_opt = gen_cmd->add_option("--name", gen.name, "two-rings | long-bottleneck | short-bottleneck");
  auto* dist_opt = gen_cmd->add_option("--distribution", gen.distribution, "uniform-cube | sphere | gaussian");
  name_opt->excludes(dist_opt);
  gen_cmd->add_option("--n", gen.n, "Points (with --distribution)")->capture_default_str();
  gen_cmd->add_option("--dim", gen.dim, "Ambient dimension (with --distribution)")->capture_default_str();
  add_common(gen_cmd, rc, threads, false);

  try {
    app.parse(argc, argv);
    if (*sweep_cmd && sweep.dataset.empty() && sweep.input.empty())
      throw CLI::RequiredError("--dataset or --input");
    if (*gen_cmd && gen.name.empty() && gen.distribution.empty())
      throw CLI::RequiredError("--name or --distribution");
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (*chi_cmd && chi_cmd->count("--format") == 0) rc.format = "json";

  pwspd::set_thread_count(threads);
  try {
    if (*dist_cmd) {
      rc.subcommand = "dist";
      run_dist(dist, rc);
    } else if (*kernel_cmd) {
      rc.subcommand = "kernel";
      run_kernel(kernel, rc);
    } else if (*heat_cmd) {
      rc.subcommand = "spanner-heatmap";
      run_heatmap(heat, rc);
    } else if (*chi_cmd) {
      rc.subcommand = "chi";
      run_chi(chi, rc);
    } else if (*sweep_cmd) {
      rc.subcommand = "cluster-sweep";
      run_sweep(sweep, rc);
    } else if (*gen_cmd) {
      rc.subcommand = "gen-data";
      run_gen(gen, rc);
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "pwspd: invalid argument: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "pwspd: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
