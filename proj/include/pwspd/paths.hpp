#pragma once

#include <span>
#include <vector>

#include "pwspd/core.hpp"
#include "pwspd/types.hpp"

namespace pwspd {

/// One shortest path: value is (sum of leg^p)^{1/p}, nodes run source..target.
/// Unreachable targets carry value +inf and an empty node list.
struct PathResult {
  double value = kInfinity;
  std::vector<Index> nodes;

  bool reachable() const noexcept { return value < kInfinity; }
};

struct PwspdQueryConfig {
  double p = 2.0;
  /// Multiply by n^{(p-1)/(pd)}.
  bool normalize = false;
  /// Intrinsic dimension used by the normalization.
  int d = 1;
  /// Sample size used by the normalization; 0 means the graph's node count.
  Index n = 0;
  PowerOptions power{};

  void validate() const;
  double normalization_factor(Index graph_nodes) const;
};

/// Reusable per-thread state for repeated single-source runs.
struct DijkstraWorkspace {
  std::vector<double> cost;
  std::vector<Index> pred;
  std::vector<char> settled;
  std::vector<Index> touched;
  std::vector<Index> order;  ///< settled nodes in settle order

  void reset(Index n);
};

/// Termination rule for a single-source run.
struct StopRule {
  Index target = -1;          ///< stop once this node is settled
  Index settle_limit = -1;    ///< stop once this many non-source nodes are settled
  double cost_cutoff = kInfinity;  ///< never settle nodes with powered cost above this
};

/// Dijkstra over edge weights length^p, accumulating powered sums and
/// taking the 1/p root only on output.
///
/// Lengths are first multiplied by an exact power of two bringing the
/// longest edge into (1/2, 1], so leg^p cannot overflow at large p. Equal
/// costs are broken toward the smaller predecessor index, and nodes with
/// equal cost settle in index order.
class PathEngine {
 public:
  PathEngine(const NeighborGraph& graph, double p, PowerOptions options = {});

  const NeighborGraph& graph() const noexcept { return graph_; }
  double p() const noexcept { return p_; }

  void run(Index source, const StopRule& stop, DijkstraWorkspace& ws) const;

  /// Converts a raw powered cost back to the l_p scale.
  double value_of(double cost) const;
  /// Powered cost (in engine units) of a raw length threshold, for cutoffs.
  double cost_of_length(double length) const;
  /// Node sequence from the last run's source to target (empty if unreached).
  std::vector<Index> path_to(const DijkstraWorkspace& ws, Index target) const;

 private:
  void run_dense(Index source, const StopRule& stop, DijkstraWorkspace& ws) const;
  void run_heap(Index source, const StopRule& stop, DijkstraWorkspace& ws) const;

  const NeighborGraph& graph_;
  double p_;
  double scale_ = 1.0;
  std::vector<double> weights_;
  bool dense_ = false;
};

std::vector<PathResult> pwspd_single_source(const NeighborGraph& graph, const PwspdQueryConfig& config,
                                            Index source);

/// l_p (or l_p^H for a subgraph H) between one pair, stopping at the target.
double pwspd_pair(const NeighborGraph& graph, const PwspdQueryConfig& config, Index source, Index target);

DistanceMatrix pwspd_all_pairs(const NeighborGraph& graph, const PwspdQueryConfig& config);

/// Minimax leg length over connecting paths (the p -> infinity limit).
DistanceMatrix longest_leg_all_pairs(const NeighborGraph& graph);

struct KnnQueryResult {
  std::vector<Index> nodes;  ///< in ascending l_p order
  std::vector<PathResult> paths;
  /// True when fewer than the requested number of nodes were reachable.
  bool truncated = false;
};

/// The k_target nearest nodes to source in l_p; Dijkstra stops after
/// k_target settlements.
KnnQueryResult pwspd_knn_query(const NeighborGraph& graph, const PwspdQueryConfig& config, Index source,
                               Index k_target);

/// (sum over consecutive legs of length^p)^{1/p} along a node sequence.
double path_value(const PointCloud& cloud, std::span<const Index> nodes, double p);

}  // namespace pwspd
