#pragma once

#include <cstdint>
#include <vector>

#include "mlmod/network.hpp"

namespace mlmod {

struct EdgeModel {
  enum class Kind { Probabilities, MeanDegree };
  Kind kind = Kind::Probabilities;
  double p_in = 0.0, p_out = 0.0;  // Probabilities
  double c = 0.0, eps = 0.0;       // MeanDegree: expected degree and p_out/p_in

  static EdgeModel probabilities(double p_in, double p_out) {
    return {Kind::Probabilities, p_in, p_out, 0.0, 0.0};
  }
  static EdgeModel mean_degree(double c, double eps) {
    return {Kind::MeanDegree, 0.0, 0.0, c, eps};
  }
};

struct GeneratorConfig {
  std::size_t N = 0;
  std::size_t T = 1;
  std::size_t K = 2;
  // one value for all layers, or T values (entry 0 unused)
  std::vector<double> eta{0.0};
  EdgeModel edges;
  TopologyKind kind = TopologyKind::TemporalChain;
  std::uint64_t seed = 0;
  bool directed = false;

  double eta_at(std::size_t t) const { return eta.size() == 1 ? eta[0] : eta.at(t); }
  void validate() const;
};

struct EdgeProbabilities {
  double p_in;
  double p_out;
};

// (c, eps) -> (p_in, p_out) via c = p_in (N/K - 1) + p_out N (K-1)/K.
EdgeProbabilities edge_probabilities(const EdgeModel& m, std::size_t N, std::size_t K);

// Labels are 0..K-1.
Partition sample_temporal_partition(const GeneratorConfig& cfg);
Partition sample_multiplex_partition(const GeneratorConfig& cfg);
// cfg.N is the top layer size; lower layers take their sizes from the parent maps.
Partition sample_multilevel_partition(const GeneratorConfig& cfg, const InterlayerTopology& topo);
Partition sample_partition(const GeneratorConfig& cfg, const InterlayerTopology& topo);

// Independent edges per layer: p_in inside a community, p_out across. No self-loops.
MultilayerNetwork place_ppm_edges(const Partition& planted, const GeneratorConfig& cfg);

// Parent maps for a balanced tree over the given layer sizes: child i of layer
// t goes to parent floor(i * N^{t-1} / N^t).
std::vector<std::vector<NodeId>> balanced_tree_parents(const std::vector<std::size_t>& sizes);

struct Benchmark {
  MultilayerNetwork network;
  Partition planted;
  InterlayerTopology topology;
};

// Two layers, N=1000; layer 1 has 20 groups of 50, layer 2 merges groups
// (2r, 2r+1) and keeps label 2r. p_in=0.32, p_out=0.1.
Benchmark toy_merge_network(std::uint64_t seed);

// Sample planted labels for cfg's topology and place PPM edges on them.
Benchmark generate_benchmark(const GeneratorConfig& cfg,
                             const InterlayerTopology& topo = InterlayerTopology::temporal());

// Temporal benchmark whose copying probability is zero at the given (0-based)
// layers and `eta` elsewhere.
Benchmark change_point_network(std::size_t N, std::size_t T, std::size_t K, double eta,
                               const std::vector<std::size_t>& change_layers, EdgeModel edges,
                               std::uint64_t seed);

struct QSigmaStats {
  double p = 0.0;
  std::size_t K = 0, T = 0, trials = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n-1)
  std::vector<double> deviations;
};

// Per trial: one node's label sequence from the permutation-copying process,
// then sum of q^sigma over permutations where layer 0 immediately precedes
// layer 1, minus 1/T.
QSigmaStats qsigma_table(double p, std::size_t K, std::size_t T, std::size_t n_trials,
                         std::uint64_t seed);

// Derives independent stream seeds from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mlmod
