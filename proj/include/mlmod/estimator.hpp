#pragma once

#include <vector>

#include "mlmod/network.hpp"
#include "mlmod/quality.hpp"

namespace mlmod {

constexpr double kThetaFloor = 1e-6;      // theta_out >= kThetaFloor * theta_in
constexpr double kDefaultOmegaMax = 1000.0;
constexpr double kPClamp = 1.0 - 1e-9;

struct LayerStats {
  double m_in = 0.0;   // intra-community edges (sum_ij A_ij delta / 2 when undirected)
  double m_out = 0.0;
  double m = 0.0;      // m_t or m'_t
  double intra_mass = 0.0;   // sum_ij A_ij delta(g_i, g_j)
  double total_mass = 0.0;   // sum_ij A_ij
  double kappa_sq = 0.0;     // sum_r kout_r kin_r (= sum_r kappa_r^2 undirected)
  std::vector<double> kappa; // per community label (compact ids), out-strength
};

struct PartitionStats {
  std::vector<LayerStats> layers;
  std::size_t persistence = 0;          // chain topologies
  std::vector<std::size_t> layer_persistence;
  double pairwise_agreement = 0.0;      // multiplex rate a
};

PartitionStats partition_stats(const MultilayerNetwork& net, const Partition& p,
                               const InterlayerTopology& topo);

struct ThetaEstimate {
  double theta_in = 1.0;
  double theta_out = 1.0;
  bool clamped = false;  // theta_out raised to the floor
  bool valid = true;     // false for an empty layer (per-layer only)
};

ThetaEstimate estimate_theta(const MultilayerNetwork& net, const Partition& p);
// Empty layers get valid=false and copy the pooled estimate.
std::vector<ThetaEstimate> estimate_theta_per_layer(const MultilayerNetwork& net,
                                                    const Partition& p);

std::size_t estimate_K(const Partition& p);
std::vector<std::size_t> estimate_K_per_layer(const Partition& p);

// Throws NumericalError when K < 2.
double estimate_p_temporal(const Partition& p, std::size_t K);
// Entry t (t >= 1) uses layer t's persistence against layer t-1 and K_layer[t]
// (or the single K when K_layer has length 1). [0] = 0.
std::vector<double> estimate_p_temporal_per_layer(const Partition& p,
                                                  const std::vector<std::size_t>& K_layer);
double estimate_p_multilevel(const Partition& p, const InterlayerTopology& topo, std::size_t K);
std::vector<double> estimate_p_multilevel_per_layer(const Partition& p,
                                                    const InterlayerTopology& topo,
                                                    const std::vector<std::size_t>& K_layer);

// Agreement between two distinct layers under permutation copying.
double multiplex_agreement(double p, std::size_t K, std::size_t T);
double empirical_pairwise_agreement(const Partition& p);
double estimate_p_multiplex(const Partition& p, std::size_t K, std::size_t T);
double invert_multiplex_agreement(double a, std::size_t K, std::size_t T);

double gamma_from_theta(double theta_in, double theta_out);
double omega_temporal(double theta_in, double theta_out, double p, std::size_t K,
                      double omega_max = kDefaultOmegaMax);
double omega_multiplex_uniform(double theta_in, double theta_out, double p, std::size_t K,
                               std::size_t T, double omega_max = kDefaultOmegaMax);

// Layer-dependent forms share the denominator <log th_in^t - log th_out^t>_t.
double mean_log_ratio(const std::vector<double>& theta_in, const std::vector<double>& theta_out);
std::vector<double> gamma_per_layer(const std::vector<double>& theta_in,
                                    const std::vector<double>& theta_out);
// p_layer/K_layer have length T, entry 0 ignored; result[0] = 0.
std::vector<double> omega_per_layer(const std::vector<double>& theta_in,
                                    const std::vector<double>& theta_out,
                                    const std::vector<double>& p_layer,
                                    const std::vector<std::size_t>& K_layer,
                                    double omega_max = kDefaultOmegaMax);
// Heterogeneous-theta uniform multiplex omega.
double omega_multiplex_uniform(const std::vector<double>& theta_in,
                               const std::vector<double>& theta_out, double p, std::size_t K,
                               double omega_max = kDefaultOmegaMax);
// weights[t] = L_t / <L>. Mean is exactly 1 up to rounding.
std::vector<double> beta_weights(const std::vector<double>& theta_in,
                                 const std::vector<double>& theta_out);

// Sum over permutations with s immediately before t of q^sigma, for one node's
// label sequence. Returns the T x T matrix (row s, column t). Needs T <= 10.
std::vector<double> permutation_pair_weights(const std::vector<Label>& labels,
                                             const std::vector<double>& p_pair,
                                             std::size_t K);
// Uniform-p convenience.
std::vector<double> permutation_pair_weights(const std::vector<Label>& labels, double p,
                                             std::size_t K);

// omega_st = log(1 + p_st K_t/(1 - p_st)) * Q_st / <L>. q_weights is T x T; pass
// an empty vector for the uniform 1/T approximation. Needs T <= 8.
std::vector<double> omega_multiplex_pairwise(const std::vector<double>& theta_in,
                                             const std::vector<double>& theta_out,
                                             const std::vector<double>& p_pair,
                                             const std::vector<std::size_t>& K_layer,
                                             const std::vector<double>& q_weights,
                                             double omega_max = kDefaultOmegaMax);

}  // namespace mlmod
