#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlmod/estimator.hpp"
#include "mlmod/evaluation.hpp"
#include "mlmod/optimizer.hpp"

namespace mlmod {

struct IterConfig {
  double gamma0 = 1.0;
  double omega0 = 1.0;
  // Layer-dependent starts; empty = use the scalars. omega0_layers has length
  // T with entry 0 unused.
  std::vector<double> gamma0_layers;
  std::vector<double> omega0_layers;
  int max_iters = 30;
  double tol = 1e-3;
  std::optional<std::size_t> k_max;
  double gamma_shrink = 0.8;
  bool fix_gamma = false;
  double omega_max = kDefaultOmegaMax;
  int trials_per_iter = 1;
  // Adds one optimizer run per iteration started from the previous partition;
  // the highest-Q candidate still wins.
  bool warm_start = false;
  OptimizerConfig optimizer;

  void validate() const;
};

enum class IterStatus { Converged, MaxIterations, Degenerate };
const char* to_string(IterStatus s);

struct IterStep {
  int iteration = 0;
  // parameters the optimizer ran with
  std::vector<double> gamma, omega, beta;
  double Q = 0.0;
  std::size_t K = 0;
  std::vector<std::size_t> K_layers;
  double p = 0.0;
  std::vector<double> p_layers;
  double theta_in = 0.0, theta_out = 0.0;
  std::vector<double> theta_in_layers, theta_out_layers;
  bool theta_clamped = false;
  // updated parameters (empty when the step ended the run as degenerate)
  std::vector<double> gamma_next, omega_next, beta_next;
  bool k_max_triggered = false;
};

struct IterResult {
  IterStatus status = IterStatus::MaxIterations;
  bool converged = false;
  bool layer_dependent = false;
  TopologyKind kind = TopologyKind::TemporalChain;
  std::string diagnostic;
  int iterations = 0;

  // final parameters; scalars hold layer means in the layer-dependent case
  double gamma = 0.0, omega = 0.0;
  // coupling that gives the same objective when each coupled pair carries the
  // weight on both off-diagonal blocks (omega/2 for chains, omega for multiplex)
  double omega_symmetric = 0.0;
  std::vector<double> gamma_layers, omega_layers, beta_layers;

  Partition best_partition;  // highest Q under its own iteration's parameters
  double best_Q = 0.0;
  int best_iteration = 0;
  Partition final_partition;  // partition of the last optimization round
  double final_Q = 0.0;
  std::vector<IterStep> trajectory;

  const Partition& output_partition() const { return converged ? final_partition : best_partition; }
};

// One estimation step on a detected partition: theta, K, p and the closed-form
// (gamma, omega) for the topology. Throws NumericalError when K < 2 or the
// partition is not assortative.
struct ParameterUpdate {
  double gamma = 0.0, omega = 0.0;
  std::size_t K = 0;
  double p = 0.0;
  ThetaEstimate theta;
};
ParameterUpdate update_parameters(const MultilayerNetwork& net, const InterlayerTopology& topo,
                                  const Partition& p, double omega_max = kDefaultOmegaMax);

IterResult iterate(const MultilayerNetwork& net, const InterlayerTopology& topo,
                   const IterConfig& cfg);
IterResult iterate_layer_dependent(const MultilayerNetwork& net, const InterlayerTopology& topo,
                                   const IterConfig& cfg);

struct MultiRunConfig {
  std::size_t n_runs = 1;
  std::uint64_t seed = 0;
  double gamma_lo = 0.0, gamma_hi = 5.0;
  double omega_lo = 0.0, omega_hi = 1.0;
  bool layer_dependent = false;
  unsigned threads = 1;
  NmiNorm norm = NmiNorm::MeanEntropy;
  IterConfig base;
};

struct RunRecord {
  std::size_t run = 0;
  double gamma0 = 0.0, omega0 = 0.0;
  double gamma = 0.0, omega = 0.0;
  IterStatus status = IterStatus::MaxIterations;
  bool converged = false;
  int iterations = 0;
  double best_Q = 0.0;
  double final_Q = 0.0;
  std::size_t K = 0;
  double p = 0.0;
  std::string diagnostic;
};

struct MultiRunResult {
  std::vector<RunRecord> runs;
  std::vector<Partition> partitions;  // output_partition() of each run
  std::vector<double> nmi_matrix;     // n_runs x n_runs
};

MultiRunResult multi_run(const MultilayerNetwork& net, const InterlayerTopology& topo,
                         const MultiRunConfig& cfg);

// Threads from MLMOD_THREADS, falling back to 1.
unsigned default_thread_count();

}  // namespace mlmod
