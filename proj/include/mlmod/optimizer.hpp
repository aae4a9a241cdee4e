#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mlmod/network.hpp"
#include "mlmod/quality.hpp"

namespace mlmod {

enum class MovePolicy { BestMove, WeightedRandomMove };

struct OptimizerConfig {
  MovePolicy move_policy = MovePolicy::BestMove;
  std::uint64_t rng_seed = 0;
  int max_passes = 100;
  double min_gain = 1e-10;
  bool postprocess_persistence = false;

  void validate() const;
};

struct OptimizeResult {
  Partition partition;  // canonical labels, first appearance order
  double Q = 0.0;
  int passes = 0;
};

OptimizeResult maximize(const MultilayerNetwork& net, const InterlayerTopology& topo,
                        const ModularityParams& params, const OptimizerConfig& cfg,
                        const std::optional<Partition>& init = std::nullopt);

// Relabels each layer to overlap its predecessor as much as possible; the
// permutation is carried into all later layers, so only the (t-1, t) coupling
// term changes, and it is applied only when it grows.
Partition postprocess_persistence(const MultilayerNetwork& net, const InterlayerTopology& topo,
                                  const Partition& p, const ModularityParams& params);

// Weighted symmetric graph whose modularity-style objective
//   sum_u self_u + sum_{u<v} w_uv delta(c_u,c_v) - sum_l coef_l sum_C kout_C^l kin_C^l
// equals multilayer modularity for the unit -> node-layer correspondence. Units
// carry sparse per-layer (out, in) strengths. Used by the optimizer and by
// consensus re-clustering.
class ModularityGraph {
 public:
  struct Strength {
    std::uint32_t layer;
    double out;
    double in;
  };
  struct PairWeight {
    std::uint32_t u, v;
    double w;
  };

  ModularityGraph() = default;
  // pairs may repeat and appear in either orientation; weights add up.
  ModularityGraph(std::size_t n, const std::vector<PairWeight>& pairs, std::vector<double> self,
                  const std::vector<std::vector<Strength>>& strengths, std::vector<double> coef);

  static ModularityGraph from_network(const MultilayerNetwork& net, const InterlayerTopology& topo,
                                      const ModularityParams& params);

  std::size_t size() const { return self_.size(); }
  std::size_t num_null_layers() const { return coef_.size(); }

  double quality(const std::vector<std::uint32_t>& comm) const;
  // comm must use ids 0..K-1.
  ModularityGraph aggregate(const std::vector<std::uint32_t>& comm, std::size_t K) const;

  // raw access for the local-moving loop
  const std::vector<std::size_t>& adj_offsets() const { return adj_off_; }
  const std::vector<std::uint32_t>& adj_targets() const { return adj_to_; }
  const std::vector<double>& adj_weights() const { return adj_w_; }
  const std::vector<std::size_t>& strength_offsets() const { return str_off_; }
  const std::vector<Strength>& strengths() const { return str_; }
  const std::vector<double>& coef() const { return coef_; }
  const std::vector<double>& self() const { return self_; }

 private:
  std::vector<std::size_t> adj_off_{0};
  std::vector<std::uint32_t> adj_to_;
  std::vector<double> adj_w_;
  std::vector<double> self_;
  std::vector<std::size_t> str_off_{0};
  std::vector<Strength> str_;
  std::vector<double> coef_;
};

struct LouvainOutcome {
  std::vector<std::uint32_t> comm;  // per unit of the input graph, ids 0..K-1
  double quality = 0.0;
  int passes = 0;
};

// Multilevel local moving + aggregation on a prepared graph.
LouvainOutcome louvain(const ModularityGraph& g, const OptimizerConfig& cfg,
                       const std::vector<std::uint32_t>* init = nullptr);

}  // namespace mlmod
