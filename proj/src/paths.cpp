#include "pwspd/paths.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>

#include "pwspd/parallel.hpp"

namespace pwspd {

void PwspdQueryConfig::validate() const {
  validate_power(p, power);
  if (normalize && d < 1) throw InvalidArgument("normalization requires intrinsic dimension d >= 1");
}

double PwspdQueryConfig::normalization_factor(Index graph_nodes) const {
  if (!normalize) return 1.0;
  const double count = static_cast<double>(n > 0 ? n : graph_nodes);
  return std::pow(count, (p - 1.0) / (p * static_cast<double>(d)));
}

void DijkstraWorkspace::reset(Index n) {
  if (static_cast<Index>(cost.size()) != n) {
    cost.assign(static_cast<std::size_t>(n), kInfinity);
    pred.assign(static_cast<std::size_t>(n), -1);
    settled.assign(static_cast<std::size_t>(n), 0);
    touched.clear();
  } else {
    for (Index v : touched) {
      cost[v] = kInfinity;
      pred[v] = -1;
      settled[v] = 0;
    }
    touched.clear();
  }
  order.clear();
}

PathEngine::PathEngine(const NeighborGraph& graph, double p, PowerOptions options) : graph_(graph), p_(p) {
  validate_power(p, options);
  const auto& lengths = graph.lengths();
  double longest = 0.0;
  for (double l : lengths) longest = std::max(longest, l);
  if (p != 1.0 && longest > 0.0) {
    int exponent = 0;
    std::frexp(longest, &exponent);  // longest = m * 2^exponent, m in [0.5, 1)
    scale_ = std::ldexp(1.0, -exponent);
  }
  weights_.resize(lengths.size());
  for (std::size_t s = 0; s < lengths.size(); ++s)
    weights_[s] = p == 1.0 ? lengths[s] : std::pow(lengths[s] * scale_, p);
  const double n = static_cast<double>(graph.size());
  dense_ = static_cast<double>(lengths.size()) > 0.25 * n * n;
}

double PathEngine::value_of(double cost) const {
  if (!(cost < kInfinity)) return kInfinity;
  return (p_ == 1.0 ? cost : std::pow(cost, 1.0 / p_)) / scale_;
}

double PathEngine::cost_of_length(double length) const {
  return p_ == 1.0 ? length : std::pow(length * scale_, p_);
}

void PathEngine::run(Index source, const StopRule& stop, DijkstraWorkspace& ws) const {
  const Index n = graph_.size();
  if (source < 0 || source >= n) throw InvalidArgument("source node out of range");
  ws.reset(n);
  ws.cost[source] = 0.0;
  ws.touched.push_back(source);
  if (dense_) run_dense(source, stop, ws);
  else run_heap(source, stop, ws);
}

void PathEngine::run_heap(Index source, const StopRule& stop, DijkstraWorkspace& ws) const {
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  queue.emplace(0.0, source);
  Index settled_count = 0;
  while (!queue.empty()) {
    const auto [c, u] = queue.top();
    queue.pop();
    if (ws.settled[u] || c != ws.cost[u]) continue;
    if (c > stop.cost_cutoff) break;
    ws.settled[u] = 1;
    ws.order.push_back(u);
    if (u != source) ++settled_count;
    if (u == stop.target) break;
    if (stop.settle_limit >= 0 && settled_count >= stop.settle_limit) break;
    for (Index s = graph_.offset(u), e = graph_.offset(u + 1); s < e; ++s) {
      const Index v = graph_.target(s);
      if (ws.settled[v]) continue;
      const double nc = c + weights_[s];
      if (nc < ws.cost[v]) {
        if (ws.cost[v] == kInfinity) ws.touched.push_back(v);
        ws.cost[v] = nc;
        ws.pred[v] = u;
        queue.emplace(nc, v);
      } else if (nc == ws.cost[v] && u < ws.pred[v]) {
        ws.pred[v] = u;
      }
    }
  }
}

void PathEngine::run_dense(Index source, const StopRule& stop, DijkstraWorkspace& ws) const {
  const Index n = graph_.size();
  // Dense runs touch every node; mark all so the next reset clears them.
  ws.touched.resize(static_cast<std::size_t>(n));
  for (Index v = 0; v < n; ++v) ws.touched[v] = v;
  Index settled_count = 0;
  while (true) {
    Index u = -1;
    double best = kInfinity;
    for (Index v = 0; v < n; ++v)
      if (!ws.settled[v] && ws.cost[v] < best) {
        best = ws.cost[v];
        u = v;
      }
    if (u < 0 || best > stop.cost_cutoff) break;
    ws.settled[u] = 1;
    ws.order.push_back(u);
    if (u != source) ++settled_count;
    if (u == stop.target) break;
    if (stop.settle_limit >= 0 && settled_count >= stop.settle_limit) break;
    for (Index s = graph_.offset(u), e = graph_.offset(u + 1); s < e; ++s) {
      const Index v = graph_.target(s);
      if (ws.settled[v]) continue;
      const double nc = best + weights_[s];
      if (nc < ws.cost[v]) {
        ws.cost[v] = nc;
        ws.pred[v] = u;
      } else if (nc == ws.cost[v] && u < ws.pred[v]) {
        ws.pred[v] = u;
      }
    }
  }
}

std::vector<Index> PathEngine::path_to(const DijkstraWorkspace& ws, Index target) const {
  std::vector<Index> nodes;
  if (!ws.settled[target]) return nodes;
  for (Index v = target; v >= 0; v = ws.pred[v]) nodes.push_back(v);
  std::reverse(nodes.begin(), nodes.end());
  return nodes;
}

namespace {

void check_node(const NeighborGraph& graph, Index v) {
  if (v < 0 || v >= graph.size()) throw InvalidArgument("node index " + std::to_string(v) + " out of range");
}

}  // namespace

std::vector<PathResult> pwspd_single_source(const NeighborGraph& graph, const PwspdQueryConfig& config,
                                            Index source) {
  config.validate();
  check_node(graph, source);
  const PathEngine engine(graph, config.p, config.power);
  DijkstraWorkspace ws;
  engine.run(source, {}, ws);
  const double factor = config.normalization_factor(graph.size());
  std::vector<PathResult> out(static_cast<std::size_t>(graph.size()));
  for (Index v = 0; v < graph.size(); ++v) {
    if (!ws.settled[v]) continue;
    out[v].value = engine.value_of(ws.cost[v]) * factor;
    out[v].nodes = engine.path_to(ws, v);
  }
  return out;
}

double pwspd_pair(const NeighborGraph& graph, const PwspdQueryConfig& config, Index source, Index target) {
  config.validate();
  check_node(graph, source);
  check_node(graph, target);
  const PathEngine engine(graph, config.p, config.power);
  DijkstraWorkspace ws;
  StopRule stop;
  stop.target = target;
  engine.run(source, stop, ws);
  if (!ws.settled[target]) return kInfinity;
  return engine.value_of(ws.cost[target]) * config.normalization_factor(graph.size());
}

DistanceMatrix pwspd_all_pairs(const NeighborGraph& graph, const PwspdQueryConfig& config) {
  config.validate();
  const Index n = graph.size();
  const PathEngine engine(graph, config.p, config.power);
  const double factor = config.normalization_factor(n);
  DistanceMatrix out;
  out.values = Eigen::MatrixXd::Zero(n, n);
  out.p = config.p;
  out.normalized = config.normalize;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t us) {
    thread_local DijkstraWorkspace ws;
    const Index s = static_cast<Index>(us);
    engine.run(s, {}, ws);
    // Row s is written only for j > s; the lower triangle mirrors it.
    for (Index j = s + 1; j < n; ++j)
      out.values(s, j) = ws.settled[j] ? engine.value_of(ws.cost[j]) * factor : kInfinity;
  });
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      out.values(j, i) = out.values(i, j);
      if (!(out.values(i, j) < kInfinity)) ++out.unreachable_pairs;
    }
  return out;
}

DistanceMatrix longest_leg_all_pairs(const NeighborGraph& graph) {
  const Index n = graph.size();
  DistanceMatrix out;
  out.values = Eigen::MatrixXd::Zero(n, n);
  out.p = kInfinity;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t us) {
    const Index s = static_cast<Index>(us);
    // Minimax Dijkstra: path cost is the largest leg seen so far.
    using Item = std::pair<double, Index>;
    std::vector<double> cost(static_cast<std::size_t>(n), kInfinity);
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    cost[s] = 0.0;
    queue.emplace(0.0, s);
    while (!queue.empty()) {
      const auto [c, u] = queue.top();
      queue.pop();
      if (done[u] || c != cost[u]) continue;
      done[u] = 1;
      for (Index e = graph.offset(u), end = graph.offset(u + 1); e < end; ++e) {
        const Index v = graph.target(e);
        const double nc = std::max(c, graph.length(e));
        if (!done[v] && nc < cost[v]) {
          cost[v] = nc;
          queue.emplace(nc, v);
        }
      }
    }
    for (Index j = s + 1; j < n; ++j) out.values(s, j) = cost[j];
  });
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      out.values(j, i) = out.values(i, j);
      if (!(out.values(i, j) < kInfinity)) ++out.unreachable_pairs;
    }
  return out;
}

KnnQueryResult pwspd_knn_query(const NeighborGraph& graph, const PwspdQueryConfig& config, Index source,
                               Index k_target) {
  config.validate();
  check_node(graph, source);
  if (k_target < 1 || k_target >= graph.size())
    throw InvalidArgument("k_target must satisfy 1 <= k_target < n");
  const PathEngine engine(graph, config.p, config.power);
  DijkstraWorkspace ws;
  StopRule stop;
  stop.settle_limit = k_target;
  engine.run(source, stop, ws);
  const double factor = config.normalization_factor(graph.size());
  KnnQueryResult out;
  for (Index v : ws.order) {
    if (v == source) continue;
    out.nodes.push_back(v);
    out.paths.push_back({engine.value_of(ws.cost[v]) * factor, engine.path_to(ws, v)});
  }
  out.truncated = static_cast<Index>(out.nodes.size()) < k_target;
  return out;
}

double path_value(const PointCloud& cloud, std::span<const Index> nodes, double p) {
  if (nodes.empty()) return kInfinity;
  double total = 0.0;
  for (std::size_t t = 1; t < nodes.size(); ++t)
    total += std::pow(std::sqrt(squared_distance(cloud.points(), nodes[t - 1], nodes[t])), p);
  return std::pow(total, 1.0 / p);
}

}  // namespace pwspd
