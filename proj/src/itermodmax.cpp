#include "mlmod/itermodmax.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "mlmod/synth.hpp"

namespace mlmod {

const char* to_string(IterStatus s) {
  switch (s) {
    case IterStatus::Converged: return "converged";
    case IterStatus::MaxIterations: return "max_iterations";
    case IterStatus::Degenerate: return "degenerate";
  }
  return "?";
}

void IterConfig::validate() const {
  if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  if (!(gamma_shrink > 0.0 && gamma_shrink < 1.0)) throw ValidationError("gamma_shrink must lie in (0,1)");
  if (!(gamma0 > 0.0)) throw ValidationError("gamma0 must be positive");
  if (!(omega0 >= 0.0)) throw ValidationError("omega0 must be >= 0");
  if (!(omega_max > 0.0)) throw ValidationError("omega_max must be positive");
  if (trials_per_iter < 1) throw ValidationError("trials_per_iter must be >= 1");
  if (k_max && *k_max < 1) throw ValidationError("K_max must be >= 1");
  for (double g : gamma0_layers)
    if (!(g > 0.0)) throw ValidationError("gamma0 per layer must be positive");
  optimizer.validate();
}

unsigned default_thread_count() {
  if (const char* s = std::getenv("MLMOD_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

namespace {

struct Round {
  Partition partition;
  double Q = -std::numeric_limits<double>::infinity();
};

Round optimize_round(const MultilayerNetwork& net, const InterlayerTopology& topo,
                     const ModularityParams& params, const IterConfig& cfg, int iteration,
                     const Partition* previous) {
  Round best;
  auto keep = [&](OptimizeResult&& r) {
    if (r.Q > best.Q) {
      best.partition = std::move(r.partition);
      best.Q = r.Q;
    }
  };
  for (int k = 0; k < cfg.trials_per_iter; ++k) {
    OptimizerConfig oc = cfg.optimizer;
    oc.rng_seed = derive_seed(cfg.optimizer.rng_seed,
                              static_cast<std::uint64_t>(iteration) * 1000 + static_cast<std::uint64_t>(k));
    keep(maximize(net, topo, params, oc));
  }
  // one extra run refined from the previous round's partition
  if (cfg.warm_start && previous && previous->size() > 0) {
    OptimizerConfig oc = cfg.optimizer;
    oc.rng_seed = derive_seed(cfg.optimizer.rng_seed, static_cast<std::uint64_t>(iteration) * 1000 + 999);
    keep(maximize(net, topo, params, oc, *previous));
  }
  return best;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

double mean_of(const std::vector<double>& v, std::size_t from = 0) {
  if (v.size() <= from) return 0.0;
  return std::accumulate(v.begin() + static_cast<long>(from), v.end(), 0.0) /
         static_cast<double>(v.size() - from);
}

void track_best(IterResult& res, const Round& r, int it) {
  if (res.best_iteration == 0 || r.Q > res.best_Q) {
    res.best_partition = r.partition;
    res.best_Q = r.Q;
    res.best_iteration = it;
  }
  res.final_partition = r.partition;
  res.final_Q = r.Q;
}

}  // namespace

ParameterUpdate update_parameters(const MultilayerNetwork& net, const InterlayerTopology& topo,
                                  const Partition& part, double omega_max) {
  const std::size_t T = net.num_layers();
  ParameterUpdate up;
  up.K = estimate_K(part);
  if (up.K < 2) throw NumericalError("a single community spans the network; omega cannot be updated");
  up.theta = estimate_theta(net, part);
  if (!(up.theta.theta_in > up.theta.theta_out))
    throw NumericalError("theta_in <= theta_out, the partition is not assortative");
  if (T > 1) {
    switch (topo.kind) {
      case TopologyKind::TemporalChain: up.p = estimate_p_temporal(part, up.K); break;
      case TopologyKind::MultilevelTree: up.p = estimate_p_multilevel(part, topo, up.K); break;
      case TopologyKind::MultiplexAllPairs: up.p = estimate_p_multiplex(part, up.K, T); break;
    }
  }
  up.gamma = gamma_from_theta(up.theta.theta_in, up.theta.theta_out);
  if (T > 1)
    up.omega = topo.kind == TopologyKind::MultiplexAllPairs
                   ? omega_multiplex_uniform(up.theta.theta_in, up.theta.theta_out, up.p, up.K, T, omega_max)
                   : omega_temporal(up.theta.theta_in, up.theta.theta_out, up.p, up.K, omega_max);
  return up;
}

IterResult iterate(const MultilayerNetwork& net, const InterlayerTopology& topo,
                   const IterConfig& cfg) {
  cfg.validate();
  topo.validate(net);
  const std::size_t T = net.num_layers();
  IterResult res;
  res.kind = topo.kind;

  double gamma = cfg.gamma0, omega = cfg.omega0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    auto params = ModularityParams::uniform(T, gamma, omega, net.directed());
    Round r = optimize_round(net, topo, params, cfg, it, it > 1 ? &res.final_partition : nullptr);
    track_best(res, r, it);
    res.iterations = it;

    IterStep st;
    st.iteration = it;
    st.gamma = {gamma};
    st.omega = {omega};
    st.beta = {1.0};
    st.Q = r.Q;
    st.K = estimate_K(r.partition);
    st.K_layers = estimate_K_per_layer(r.partition);

    ParameterUpdate up;
    try {
      up = update_parameters(net, topo, r.partition, cfg.omega_max);
    } catch (const NumericalError& e) {
      res.status = IterStatus::Degenerate;
      res.diagnostic = "iteration " + std::to_string(it) + ": " + e.what();
      res.trajectory.push_back(std::move(st));
      break;
    }
    st.theta_in = up.theta.theta_in;
    st.theta_out = up.theta.theta_out;
    st.theta_clamped = up.theta.clamped;
    st.p = up.p;
    double gamma_next = up.gamma;
    double omega_next = up.omega;
    if (cfg.k_max && st.K > *cfg.k_max) {
      gamma_next = cfg.gamma_shrink * gamma;
      omega_next = omega;
      st.k_max_triggered = true;
    }
    st.gamma_next = {gamma_next};
    st.omega_next = {omega_next};
    st.beta_next = {1.0};
    res.trajectory.push_back(std::move(st));

    bool done = std::abs(gamma_next - gamma) <= cfg.tol && std::abs(omega_next - omega) <= cfg.tol;
    gamma = gamma_next;
    omega = omega_next;
    if (done) {
      res.status = IterStatus::Converged;
      res.converged = true;
      break;
    }
  }
  if (res.status == IterStatus::MaxIterations)
    res.diagnostic = "no fixed point within " + std::to_string(cfg.max_iters) +
                     " iterations; returning the best partition seen";
  res.gamma = gamma;
  res.omega = omega;
  res.omega_symmetric = topo.kind == TopologyKind::MultiplexAllPairs ? omega : omega / 2.0;
  res.gamma_layers.assign(T, gamma);
  res.omega_layers.assign(T, omega);
  if (T > 0) res.omega_layers[0] = 0.0;
  res.beta_layers.assign(T, 1.0);
  return res;
}

IterResult iterate_layer_dependent(const MultilayerNetwork& net, const InterlayerTopology& topo,
                                   const IterConfig& cfg) {
  cfg.validate();
  topo.validate(net);
  if (topo.kind == TopologyKind::MultiplexAllPairs)
    throw UnsupportedError("layer-dependent iteration is not available for multiplex networks");
  const std::size_t T = net.num_layers();
  if (T < 2) throw ValidationError("layer-dependent iteration needs T >= 2");
  if (!cfg.gamma0_layers.empty() && cfg.gamma0_layers.size() != T)
    throw ValidationError("gamma0 per layer must have length T");
  if (!cfg.omega0_layers.empty() && cfg.omega0_layers.size() != T)
    throw ValidationError("omega0 per layer must have length T");

  IterResult res;
  res.kind = topo.kind;
  res.layer_dependent = true;
  std::vector<double> gamma0 = cfg.gamma0_layers.empty() ? std::vector<double>(T, cfg.gamma0)
                                                         : cfg.gamma0_layers;
  std::vector<double> gamma = gamma0;
  std::vector<double> omega = cfg.omega0_layers.empty() ? std::vector<double>(T, cfg.omega0)
                                                        : cfg.omega0_layers;
  omega[0] = 0.0;
  std::vector<double> beta(T, 1.0);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    ModularityParams params;
    params.gamma = gamma;
    params.beta = beta;
    params.coupling = Coupling::per_layer(std::vector<double>(omega.begin() + 1, omega.end()));
    params.directed = net.directed();
    Round r = optimize_round(net, topo, params, cfg, it, it > 1 ? &res.final_partition : nullptr);
    track_best(res, r, it);
    res.iterations = it;

    IterStep st;
    st.iteration = it;
    st.gamma = gamma;
    st.omega = omega;
    st.beta = beta;
    st.Q = r.Q;
    st.K = estimate_K(r.partition);
    st.K_layers = estimate_K_per_layer(r.partition);
    auto fail = [&](const std::string& why) {
      res.status = IterStatus::Degenerate;
      res.diagnostic = "iteration " + std::to_string(it) + ": " + why;
      res.trajectory.push_back(st);
    };
    if (st.K < 2) {
      fail("a single community spans the network; omega cannot be updated");
      break;
    }
    std::vector<ThetaEstimate> th;
    try {
      th = estimate_theta_per_layer(net, r.partition);
    } catch (const NumericalError& e) {
      fail(e.what());
      break;
    }
    for (const auto& e : th) {
      st.theta_in_layers.push_back(e.theta_in);
      st.theta_out_layers.push_back(e.theta_out);
      st.theta_clamped = st.theta_clamped || e.clamped;
    }
    // a layer with one community has no defined p_t; it borrows the global K
    std::vector<std::size_t> K_for_p = st.K_layers;
    for (auto& k : K_for_p)
      if (k < 2) k = st.K;
    st.p_layers = estimate_p_multilevel_per_layer(r.partition, topo, K_for_p);

    std::vector<double> gamma_next = gamma, beta_next = beta, omega_next;
    try {
      if (!cfg.fix_gamma) {
        gamma_next = gamma_per_layer(st.theta_in_layers, st.theta_out_layers);
        beta_next = beta_weights(st.theta_in_layers, st.theta_out_layers);
      }
      omega_next = omega_per_layer(st.theta_in_layers, st.theta_out_layers, st.p_layers, K_for_p,
                                   cfg.omega_max);
    } catch (const NumericalError& e) {
      fail(e.what());
      break;
    }
    if (cfg.k_max && st.K > *cfg.k_max && !cfg.fix_gamma) {
      for (std::size_t t = 0; t < T; ++t) gamma_next[t] = cfg.gamma_shrink * gamma[t];
      omega_next = omega;
      beta_next = beta;
      st.k_max_triggered = true;
    }
    st.gamma_next = gamma_next;
    st.omega_next = omega_next;
    st.beta_next = beta_next;
    res.trajectory.push_back(st);

    bool done = max_abs_diff(gamma_next, gamma) <= cfg.tol && max_abs_diff(omega_next, omega) <= cfg.tol;
    gamma = gamma_next;
    omega = omega_next;
    beta = beta_next;
    if (done) {
      res.status = IterStatus::Converged;
      res.converged = true;
      break;
    }
  }
  if (res.status == IterStatus::MaxIterations)
    res.diagnostic = "no fixed point within " + std::to_string(cfg.max_iters) +
                     " iterations; returning the best partition seen";
  res.gamma_layers = gamma;
  res.omega_layers = omega;
  res.beta_layers = beta;
  res.gamma = mean_of(gamma);
  res.omega = mean_of(omega, 1);
  res.omega_symmetric = res.omega / 2.0;
  return res;
}

MultiRunResult multi_run(const MultilayerNetwork& net, const InterlayerTopology& topo,
                         const MultiRunConfig& cfg) {
  if (cfg.n_runs < 1) throw ValidationError("n_runs must be >= 1");
  if (!(cfg.gamma_lo >= 0.0 && cfg.gamma_hi >= cfg.gamma_lo))
    throw ValidationError("gamma range must satisfy 0 <= lo <= hi");
  if (!(cfg.omega_lo >= 0.0 && cfg.omega_hi >= cfg.omega_lo))
    throw ValidationError("omega range must satisfy 0 <= lo <= hi");
  if (cfg.layer_dependent && topo.kind == TopologyKind::MultiplexAllPairs)
    throw UnsupportedError("layer-dependent iteration is not available for multiplex networks");

  MultiRunResult out;
  out.runs.resize(cfg.n_runs);
  out.partitions.resize(cfg.n_runs);
  std::vector<std::exception_ptr> errors(cfg.n_runs);

  auto one = [&](std::size_t k) {
    std::mt19937_64 rng(derive_seed(cfg.seed, k));
    std::uniform_real_distribution<double> ug(cfg.gamma_lo, cfg.gamma_hi), uo(cfg.omega_lo, cfg.omega_hi);
    IterConfig ic = cfg.base;
    ic.gamma0 = std::max(cfg.gamma_hi > cfg.gamma_lo ? ug(rng) : cfg.gamma_lo, 1e-9);
    ic.omega0 = cfg.omega_hi > cfg.omega_lo ? uo(rng) : cfg.omega_lo;
    ic.optimizer.rng_seed = derive_seed(cfg.seed, 1'000'000 + k);
    RunRecord& rec = out.runs[k];
    rec.run = k;
    rec.gamma0 = ic.gamma0;
    rec.omega0 = ic.omega0;
    try {
      IterResult r = cfg.layer_dependent ? iterate_layer_dependent(net, topo, ic) : iterate(net, topo, ic);
      rec.gamma = r.gamma;
      rec.omega = r.omega;
      rec.status = r.status;
      rec.converged = r.converged;
      rec.iterations = r.iterations;
      rec.best_Q = r.best_Q;
      rec.final_Q = r.final_Q;
      rec.diagnostic = r.diagnostic;
      if (!r.trajectory.empty()) {
        rec.K = r.trajectory.back().K;
        rec.p = r.trajectory.back().p;
      }
      out.partitions[k] = r.output_partition();
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.n_runs)));
  if (threads == 1) {
    for (std::size_t k = 0; k < cfg.n_runs; ++k) one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < cfg.n_runs;) one(k);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  out.nmi_matrix = pairwise_nmi_matrix(out.partitions, cfg.norm, threads);
  return out;
}

}  // namespace mlmod
