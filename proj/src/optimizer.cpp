#include "mlmod/optimizer.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace mlmod {

void OptimizerConfig::validate() const {
  if (max_passes < 1) throw ValidationError("max_passes must be >= 1");
  if (!(min_gain >= 0.0)) throw ValidationError("min_gain must be >= 0");
}

namespace {

constexpr int kMaxSweeps = 1000;
constexpr double kTieTol = 1e-12;

// Reassigns units one at a time until a full sweep makes no move.
// comm ids must be < g.size(). Returns the number of moves made.
std::size_t local_moving(const ModularityGraph& g, std::vector<std::uint32_t>& comm,
                         std::mt19937_64& rng, MovePolicy policy, double threshold) {
  const std::size_t n = g.size();
  const std::size_t L = g.num_null_layers();
  const auto& off = g.adj_offsets();
  const auto& to = g.adj_targets();
  const auto& wt = g.adj_weights();
  const auto& soff = g.strength_offsets();
  const auto& str = g.strengths();
  const auto& coef = g.coef();

  std::vector<double> kout(n * L, 0.0), kin(n * L, 0.0);
  std::vector<std::uint32_t> csize(n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    ++csize[comm[u]];
    for (std::size_t k = soff[u]; k < soff[u + 1]; ++k) {
      kout[comm[u] * L + str[k].layer] += str[k].out;
      kin[comm[u] * L + str[k].layer] += str[k].in;
    }
  }
  std::vector<std::uint32_t> free_ids;
  for (std::size_t c = n; c-- > 0;)
    if (csize[c] == 0) free_ids.push_back(static_cast<std::uint32_t>(c));

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> nw(n, 0.0);
  std::vector<char> mark(n, 0);
  std::vector<std::uint32_t> cand;
  std::vector<std::pair<std::uint32_t, double>> positive;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto null_cost = [&](std::size_t u, std::uint32_t c) {
    double s = 0.0;
    for (std::size_t k = soff[u]; k < soff[u + 1]; ++k) {
      const auto& x = str[k];
      const double cf = coef[x.layer];
      if (cf != 0.0) s += cf * (x.out * kin[c * L + x.layer] + x.in * kout[c * L + x.layer]);
    }
    return s;
  };
  // self-pairing of the unit's own strengths is constant across targets and
  // therefore left out of every gain.

  std::size_t total_moves = 0;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    std::size_t moves = 0;
    for (std::uint32_t u : order) {
      const std::uint32_t a = comm[u];
      for (std::size_t k = off[u]; k < off[u + 1]; ++k) {
        std::uint32_t c = comm[to[k]];
        if (!mark[c]) {
          mark[c] = 1;
          cand.push_back(c);
        }
        nw[c] += wt[k];
      }
      // take u out of a
      for (std::size_t k = soff[u]; k < soff[u + 1]; ++k) {
        kout[a * L + str[k].layer] -= str[k].out;
        kin[a * L + str[k].layer] -= str[k].in;
      }
      --csize[a];

      const double stay = nw[a] - null_cost(u, a);
      std::uint32_t best = a;
      double best_imp = 0.0;
      positive.clear();
      std::sort(cand.begin(), cand.end());
      for (std::uint32_t c : cand) {
        if (c == a) continue;
        double imp = nw[c] - null_cost(u, c) - stay;
        if (imp <= threshold) continue;
        if (policy == MovePolicy::WeightedRandomMove) {
          positive.push_back({c, imp});
        } else if (imp > best_imp + kTieTol) {  // candidates ascend, so ties keep the lower id
          best = c;
          best_imp = imp;
        }
      }
      // an empty community scores 0
      if (csize[a] > 0 && -stay > threshold && !free_ids.empty()) {
        std::uint32_t e = free_ids.back();
        if (policy == MovePolicy::WeightedRandomMove)
          positive.push_back({e, -stay});
        else if (-stay > best_imp + kTieTol) {
          best = e;
          best_imp = -stay;
        }
      }
      if (policy == MovePolicy::WeightedRandomMove && !positive.empty()) {
        double total = 0.0;
        for (auto& pc : positive) total += pc.second;
        double r = unif(rng) * total;
        best = positive.back().first;
        for (auto& pc : positive) {
          if (r < pc.second) {
            best = pc.first;
            break;
          }
          r -= pc.second;
        }
      }

      if (best != a) {
        ++moves;
        if (csize[best] == 0) free_ids.pop_back();
        if (csize[a] == 0) free_ids.push_back(a);
      }
      comm[u] = best;
      ++csize[best];
      for (std::size_t k = soff[u]; k < soff[u + 1]; ++k) {
        kout[best * L + str[k].layer] += str[k].out;
        kin[best * L + str[k].layer] += str[k].in;
      }
      for (std::uint32_t c : cand) {
        nw[c] = 0.0;
        mark[c] = 0;
      }
      cand.clear();
    }
    total_moves += moves;
    if (moves == 0) break;
  }
  return total_moves;
}

std::size_t renumber(std::vector<std::uint32_t>& comm) {
  std::vector<std::uint32_t> map(comm.size() + 1, UINT32_MAX);
  std::uint32_t next = 0;
  for (auto& c : comm) {
    if (c >= map.size()) map.resize(c + 1, UINT32_MAX);
    if (map[c] == UINT32_MAX) map[c] = next++;
    c = map[c];
  }
  return next;
}

}  // namespace

LouvainOutcome louvain(const ModularityGraph& g, const OptimizerConfig& cfg,
                       const std::vector<std::uint32_t>* init) {
  cfg.validate();
  const std::size_t n = g.size();
  std::mt19937_64 rng(cfg.rng_seed);
  const double threshold = std::max(cfg.min_gain, 1e-13);

  LouvainOutcome out;
  out.comm.resize(n);
  if (init) {
    if (init->size() != n) throw ValidationError("initial partition has the wrong size");
    out.comm = *init;
    renumber(out.comm);
  } else {
    std::iota(out.comm.begin(), out.comm.end(), 0u);
  }
  if (n == 0) return out;

  // `assign` maps base units to units of the current level
  std::vector<std::uint32_t> assign(n);
  std::iota(assign.begin(), assign.end(), 0u);
  ModularityGraph level;
  const ModularityGraph* cur = &g;
  std::vector<std::uint32_t> comm = out.comm;
  double q_prev = g.quality(comm);

  for (int pass = 1; pass <= cfg.max_passes; ++pass) {
    local_moving(*cur, comm, rng, cfg.move_policy, threshold);
    std::size_t K = renumber(comm);
    for (auto& a : assign) a = comm[a];
    double q = cur->quality(comm);
    out.passes = pass;
    bool merged = K < cur->size();
    if (!merged || (pass > 1 && q - q_prev <= cfg.min_gain)) break;
    q_prev = q;
    level = cur->aggregate(comm, K);
    cur = &level;
    comm.resize(K);
    std::iota(comm.begin(), comm.end(), 0u);
  }
  out.comm = assign;
  renumber(out.comm);
  out.quality = g.quality(out.comm);
  return out;
}

OptimizeResult maximize(const MultilayerNetwork& net, const InterlayerTopology& topo,
                        const ModularityParams& params, const OptimizerConfig& cfg,
                        const std::optional<Partition>& init) {
  cfg.validate();
  auto g = ModularityGraph::from_network(net, topo, params);
  std::vector<std::uint32_t> start;
  if (init) {
    if (!init->conforms_to(net)) throw ValidationError("initial partition does not match network");
    start = init->flat();
  }
  auto lo = louvain(g, cfg, init ? &start : nullptr);

  OptimizeResult r;
  r.partition = Partition(net.layer_sizes());
  std::copy(lo.comm.begin(), lo.comm.end(), r.partition.flat().begin());
  if (cfg.postprocess_persistence && topo.chain_like())
    r.partition = postprocess_persistence(net, topo, r.partition, params);
  r.partition = r.partition.canonical();
  r.Q = multilayer_modularity(net, topo, r.partition, params);
  r.passes = lo.passes;
  return r;
}

Partition postprocess_persistence(const MultilayerNetwork& net, const InterlayerTopology& topo,
                                  const Partition& p, const ModularityParams& params) {
  if (!topo.chain_like())
    throw UnsupportedError("persistence post-processing needs a temporal or multilevel topology");
  if (!p.conforms_to(net)) throw ValidationError("partition does not match network shape");
  params.validate(net, topo);
  Partition out = p.canonical();
  const std::size_t K = out.num_labels();
  const std::size_t T = out.num_layers();

  for (std::size_t t = 1; t < T; ++t) {
    if (params.coupling.chain(t) == 0.0) continue;
    // counts of (child label x, parent label y)
    std::vector<std::pair<std::uint64_t, std::size_t>> counts;
    {
      std::vector<std::uint64_t> keys;
      keys.reserve(out.layer_size(t));
      for (NodeId i = 0; i < out.layer_size(t); ++i)
        keys.push_back((static_cast<std::uint64_t>(out(t, i)) << 32) |
                       out(t - 1, topo.predecessor(t, i)));
      std::sort(keys.begin(), keys.end());
      for (std::size_t k = 0; k < keys.size();) {
        std::size_t e = k;
        while (e < keys.size() && keys[e] == keys[k]) ++e;
        counts.push_back({keys[k], e - k});
        k = e;
      }
    }
    std::size_t before = 0;
    for (auto& [key, c] : counts)
      if ((key >> 32) == (key & 0xFFFFFFFFu)) before += c;

    std::stable_sort(counts.begin(), counts.end(),
                     [](auto& a, auto& b) { return a.second > b.second; });
    std::vector<std::uint32_t> phi(K, UINT32_MAX);
    std::vector<char> target_used(K, 0);
    std::size_t matched = 0;
    for (auto& [key, c] : counts) {
      auto x = static_cast<std::uint32_t>(key >> 32), y = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
      if (phi[x] != UINT32_MAX || target_used[y]) continue;
      phi[x] = y;
      target_used[y] = 1;
      matched += c;
    }
    if (matched <= before) continue;
    // complete phi to a permutation of 0..K-1, fixing what it can
    std::vector<std::uint32_t> spare_src, spare_dst;
    for (std::uint32_t l = 0; l < K; ++l) {
      if (phi[l] == UINT32_MAX && !target_used[l]) {
        phi[l] = l;
        target_used[l] = 1;
      }
    }
    for (std::uint32_t l = 0; l < K; ++l) {
      if (phi[l] == UINT32_MAX) spare_src.push_back(l);
      if (!target_used[l]) spare_dst.push_back(l);
    }
    for (std::size_t k = 0; k < spare_src.size(); ++k) phi[spare_src[k]] = spare_dst[k];

    Partition trial = out;
    for (std::size_t s = t; s < T; ++s)
      for (auto& g : trial.layer(s)) g = phi[g];
    std::size_t after = 0;
    for (NodeId i = 0; i < trial.layer_size(t); ++i)
      after += (trial(t, i) == trial(t - 1, topo.predecessor(t, i)));
    if (after > before) out = std::move(trial);
  }
  return out;
}

}  // namespace mlmod
