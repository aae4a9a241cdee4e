#include "mlmod/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mlmod/estimator.hpp"

namespace mlmod {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void GeneratorConfig::validate() const {
  if (T < 1) throw ValidationError("T must be >= 1");
  if (K < 1) throw ValidationError("K must be >= 1");
  if (eta.size() != 1 && eta.size() != T) throw ValidationError("eta must have length 1 or T");
  for (double e : eta)
    if (!(e >= 0.0 && e <= 1.0)) throw ValidationError("eta must lie in [0,1]");
  if (edges.kind == EdgeModel::Kind::Probabilities) {
    if (!(edges.p_out >= 0.0 && edges.p_out <= edges.p_in && edges.p_in <= 1.0))
      throw ValidationError("edge probabilities need 0 <= p_out <= p_in <= 1");
  } else {
    if (!(edges.eps >= 0.0 && edges.eps <= 1.0)) throw ValidationError("eps must lie in [0,1]");
    if (!(edges.c >= 0.0)) throw ValidationError("mean degree must be non-negative");
  }
}

EdgeProbabilities edge_probabilities(const EdgeModel& m, std::size_t N, std::size_t K) {
  if (m.kind == EdgeModel::Kind::Probabilities) return {m.p_in, m.p_out};
  const double Nd = static_cast<double>(N), Kd = static_cast<double>(K);
  double denom = (Nd / Kd - 1.0) + m.eps * Nd * (Kd - 1.0) / Kd;
  if (!(denom > 0.0)) throw ValidationError("mean-degree model needs N/K > 1 or eps > 0");
  double p_in = m.c / denom;
  if (p_in > 1.0)
    throw ValidationError("mean degree " + std::to_string(m.c) + " needs p_in = " +
                          std::to_string(p_in) + " > 1");
  return {p_in, m.eps * p_in};
}

namespace {

Label draw_label(std::mt19937_64& rng, std::size_t K) {
  return static_cast<Label>(std::uniform_int_distribution<std::size_t>(0, K - 1)(rng));
}

}  // namespace

Partition sample_temporal_partition(const GeneratorConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(derive_seed(cfg.seed, 1));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Partition p(cfg.T, cfg.N);
  for (NodeId i = 0; i < cfg.N; ++i) p(0, i) = draw_label(rng, cfg.K);
  for (std::size_t t = 1; t < cfg.T; ++t) {
    const double eta = cfg.eta_at(t);
    for (NodeId i = 0; i < cfg.N; ++i) {
      // draw both so the stream position doesn't depend on eta
      double r = u(rng);
      Label fresh = draw_label(rng, cfg.K);
      p(t, i) = r < eta ? p(t - 1, i) : fresh;
    }
  }
  return p;
}

Partition sample_multiplex_partition(const GeneratorConfig& cfg) {
  cfg.validate();
  if (cfg.eta.size() != 1)
    throw ValidationError("multiplex sampling uses a single copying probability");
  std::mt19937_64 rng(derive_seed(cfg.seed, 2));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double eta = cfg.eta[0];
  Partition p(cfg.T, cfg.N);
  std::vector<std::size_t> sigma(cfg.T);
  for (NodeId i = 0; i < cfg.N; ++i) {
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    std::shuffle(sigma.begin(), sigma.end(), rng);
    p(sigma[0], i) = draw_label(rng, cfg.K);
    for (std::size_t k = 1; k < cfg.T; ++k) {
      double r = u(rng);
      Label fresh = draw_label(rng, cfg.K);
      p(sigma[k], i) = r < eta ? p(sigma[k - 1], i) : fresh;
    }
  }
  return p;
}

Partition sample_multilevel_partition(const GeneratorConfig& cfg, const InterlayerTopology& topo) {
  cfg.validate();
  if (topo.kind != TopologyKind::MultilevelTree || topo.parents.size() != cfg.T)
    throw ValidationError("multilevel sampling needs parent maps for every layer");
  std::vector<std::size_t> sizes{cfg.N};
  for (std::size_t t = 1; t < cfg.T; ++t) sizes.push_back(topo.parents[t].size());
  topo.validate(sizes);
  std::mt19937_64 rng(derive_seed(cfg.seed, 3));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Partition p(sizes);
  for (NodeId i = 0; i < sizes[0]; ++i) p(0, i) = draw_label(rng, cfg.K);
  for (std::size_t t = 1; t < cfg.T; ++t) {
    const double eta = cfg.eta_at(t);
    for (NodeId i = 0; i < sizes[t]; ++i) {
      double r = u(rng);
      Label fresh = draw_label(rng, cfg.K);
      p(t, i) = r < eta ? p(t - 1, topo.parents[t][i]) : fresh;
    }
  }
  return p;
}

Partition sample_partition(const GeneratorConfig& cfg, const InterlayerTopology& topo) {
  switch (topo.kind) {
    case TopologyKind::TemporalChain: return sample_temporal_partition(cfg);
    case TopologyKind::MultiplexAllPairs: return sample_multiplex_partition(cfg);
    case TopologyKind::MultilevelTree: return sample_multilevel_partition(cfg, topo);
  }
  return {};
}

MultilayerNetwork place_ppm_edges(const Partition& planted, const GeneratorConfig& cfg) {
  cfg.validate();
  const std::size_t T = planted.num_layers();
  std::vector<std::vector<Edge>> edges(T);
  std::mt19937_64 rng(derive_seed(cfg.seed, 4));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t n = planted.layer_size(t);
    auto pr = edge_probabilities(cfg.edges, n, cfg.K);
    if (!(pr.p_out >= 0.0 && pr.p_out <= pr.p_in && pr.p_in <= 1.0))
      throw ValidationError("edge probabilities need 0 <= p_out <= p_in <= 1");
    auto g = planted.layer(t);
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = cfg.directed ? 0 : i + 1; j < n; ++j) {
        if (i == j) continue;
        if (u(rng) < (g[i] == g[j] ? pr.p_in : pr.p_out)) edges[t].push_back({i, j});
      }
  }
  return MultilayerNetwork(planted.layer_sizes(), edges, cfg.directed);
}

std::vector<std::vector<NodeId>> balanced_tree_parents(const std::vector<std::size_t>& sizes) {
  std::vector<std::vector<NodeId>> parents(sizes.size());
  for (std::size_t t = 1; t < sizes.size(); ++t) {
    if (sizes[t - 1] == 0 && sizes[t] > 0) throw ValidationError("parent layer is empty");
    for (std::size_t i = 0; i < sizes[t]; ++i)
      parents[t].push_back(static_cast<NodeId>(i * sizes[t - 1] / sizes[t]));
  }
  return parents;
}

Benchmark toy_merge_network(std::uint64_t seed) {
  constexpr std::size_t N = 1000, groups = 20, size = N / groups;
  Partition planted(2, N);
  for (NodeId i = 0; i < N; ++i) {
    Label g = static_cast<Label>(i / size);
    planted(0, i) = g;
    planted(1, i) = g - g % 2;
  }
  GeneratorConfig cfg;
  cfg.N = N;
  cfg.T = 2;
  cfg.K = groups;
  cfg.edges = EdgeModel::probabilities(0.32, 0.1);
  cfg.seed = seed;
  return {place_ppm_edges(planted, cfg), planted, InterlayerTopology::temporal()};
}

Benchmark generate_benchmark(const GeneratorConfig& cfg, const InterlayerTopology& topo) {
  Partition planted = sample_partition(cfg, topo);
  return {place_ppm_edges(planted, cfg), planted, topo};
}

Benchmark change_point_network(std::size_t N, std::size_t T, std::size_t K, double eta,
                               const std::vector<std::size_t>& change_layers, EdgeModel edges,
                               std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.N = N;
  cfg.T = T;
  cfg.K = K;
  cfg.eta.assign(T, eta);
  for (auto t : change_layers) {
    if (t >= T) throw ValidationError("change layer out of range");
    cfg.eta[t] = 0.0;
  }
  cfg.edges = edges;
  cfg.seed = seed;
  return generate_benchmark(cfg, InterlayerTopology::temporal());
}

QSigmaStats qsigma_table(double p, std::size_t K, std::size_t T, std::size_t n_trials,
                         std::uint64_t seed) {
  if (T < 3 || T > 10) throw UnsupportedError("qsigma supports 3 <= T <= 10");
  if (n_trials < 1) throw ValidationError("need at least one trial");
  if (K < 1) throw ValidationError("K must be >= 1");
  GeneratorConfig cfg;
  cfg.N = 1;
  cfg.T = T;
  cfg.K = K;
  cfg.eta = {p};
  QSigmaStats st;
  st.p = p;
  st.K = K;
  st.T = T;
  st.trials = n_trials;
  for (std::size_t k = 0; k < n_trials; ++k) {
    cfg.seed = derive_seed(seed, 100 + k);
    Partition one = sample_multiplex_partition(cfg);
    std::vector<Label> labels(one.flat().begin(), one.flat().end());
    auto M = permutation_pair_weights(labels, p, K);
    st.deviations.push_back(M[0 * T + 1] - 1.0 / static_cast<double>(T));
  }
  double n = static_cast<double>(n_trials);
  st.mean = std::accumulate(st.deviations.begin(), st.deviations.end(), 0.0) / n;
  double ss = 0.0;
  for (double d : st.deviations) ss += (d - st.mean) * (d - st.mean);
  st.std = n_trials > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return st;
}

}  // namespace mlmod
