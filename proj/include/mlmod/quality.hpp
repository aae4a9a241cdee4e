#pragma once

#include <vector>

#include "mlmod/network.hpp"

namespace mlmod {

struct ModularityParams {
  std::vector<double> gamma;  // per layer
  std::vector<double> beta;   // per layer, default 1
  Coupling coupling;
  bool directed = false;

  static ModularityParams uniform(std::size_t T, double gamma, double omega,
                                  bool directed = false);
  // Throws ValidationError on length mismatch, gamma <= 0, non-finite beta,
  // negative omega, or a directed network evaluated with the undirected model.
  void validate(const MultilayerNetwork& net, const InterlayerTopology& topo) const;
};

// Dense B^t. The entry formula is the only thing tests rely on; large layers
// should go through modularity_entry instead.
class ModularityMatrix {
 public:
  ModularityMatrix(const MultilayerNetwork& net, std::size_t t, double gamma);
  std::size_t size() const { return n_; }
  double operator()(NodeId i, NodeId j) const;
  // true when m_t = 0 and the null term was dropped
  bool empty_layer() const { return coef_ == 0.0 && total_ == 0.0; }

 private:
  const MultilayerNetwork* net_;
  std::size_t t_;
  std::size_t n_;
  double coef_;
  double total_;
};

ModularityMatrix modularity_matrix(const MultilayerNetwork& net, std::size_t t, double gamma);

struct ModularityParts {
  double intra = 0.0;  // sum_t beta_t sum_ij B^t_ij delta
  double inter = 0.0;
  double total() const { return intra + inter; }
};

ModularityParts modularity_parts(const MultilayerNetwork& net, const InterlayerTopology& topo,
                                 const Partition& p, const ModularityParams& params);
double multilayer_modularity(const MultilayerNetwork& net, const InterlayerTopology& topo,
                             const Partition& p, const ModularityParams& params);
// sum_ij B^t_ij delta(g_i, g_j) for one layer, no beta.
double layer_modularity(const MultilayerNetwork& net, std::size_t t, std::span<const Label> labels,
                        double gamma);

// Persistence counts for chain topologies; throws UnsupportedError for multiplex.
std::size_t persistence(const Partition& p, const InterlayerTopology& topo);
// Entry t (t >= 1) counts agreements between layer t and its predecessor; [0] = 0.
std::vector<std::size_t> layer_persistence(const Partition& p, const InterlayerTopology& topo);
// sum over ordered pairs s != t and nodes of delta(g_i^s, g_i^t).
std::size_t pairwise_agreement_count(const Partition& p);

// Planted-partition parameters. Scalars apply to every layer unless the
// per-layer vectors are filled (length T; p_layer[0] unused).
struct SBMParams {
  double theta_in = 1.0;
  double theta_out = 1.0;
  double p = 0.0;
  std::size_t K = 1;
  std::vector<double> theta_in_layer, theta_out_layer;
  std::vector<double> p_layer;
  std::vector<std::size_t> K_layer;
  // multiplex, T x T row-major; empty = use p everywhere
  std::vector<double> p_pair;

  bool per_layer() const { return !theta_in_layer.empty(); }
};

// Log-posterior up to a partition-independent constant.
// Uniform: (log th_in - log th_out) * Q_intra(gamma*) + log(1 + pK/(1-p)) * Pers.
// Per-layer (theta_in_layer set): <L> * [sum_t beta_t Q_t(gamma_t) + sum_t omega_t Pers_t]
// with the layer-dependent closed forms. Multiplex uses the uniform-permutation
// bound: the interlayer term is log(1 + pK/(1-p)) * agreement / T.
double log_posterior(const MultilayerNetwork& net, const InterlayerTopology& topo,
                     const Partition& p, const SBMParams& sbm);

}  // namespace mlmod
