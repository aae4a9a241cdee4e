#include <algorithm>
#include <unordered_map>

#include "mlmod/evaluation.hpp"

namespace mlmod {

namespace {

void add_group_pairs(const std::vector<std::uint32_t>& units,
                     std::unordered_map<std::uint64_t, std::uint32_t>& counts) {
  for (std::size_t a = 0; a < units.size(); ++a)
    for (std::size_t b = a + 1; b < units.size(); ++b) {
      std::uint32_t u = units[a], v = units[b];
      if (u > v) std::swap(u, v);
      ++counts[(static_cast<std::uint64_t>(u) << 32) | v];
    }
}

// Pairs co-labelled in at least one input, weighted by frequency, plus the
// cross-layer same-node agreement for coupled layer pairs.
ModularityGraph association_graph(const std::vector<Partition>& parts, const ConsensusOptions& opt,
                                  double gamma) {
  const Partition& ref = parts.front();
  const std::size_t T = ref.num_layers();
  const double R = static_cast<double>(parts.size());
  std::vector<ModularityGraph::PairWeight> pairs;
  std::vector<double> deg(ref.size(), 0.0);

  for (std::size_t t = 0; t < T; ++t) {
    std::unordered_map<std::uint64_t, std::uint32_t> counts;
    for (const auto& p : parts) {
      std::unordered_map<Label, std::vector<std::uint32_t>> groups;
      for (NodeId i = 0; i < p.layer_size(t); ++i)
        groups[p(t, i)].push_back(static_cast<std::uint32_t>(p.offset(t) + i));
      for (auto& [g, members] : groups) add_group_pairs(members, counts);
    }
    std::vector<std::pair<std::uint64_t, std::uint32_t>> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end());
    for (auto& [key, c] : sorted) {
      double f = c / R;
      if (f < opt.threshold) continue;
      auto u = static_cast<std::uint32_t>(key >> 32), v = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
      pairs.push_back({u, v, 2.0 * f});
      deg[u] += f;
      deg[v] += f;
    }
  }

  auto couple = [&](std::size_t s, NodeId i, std::size_t t, NodeId j) {
    std::size_t c = 0;
    for (const auto& p : parts) c += (p(s, i) == p(t, j));
    double f = c / R;
    if (f >= opt.threshold && f > 0.0)
      pairs.push_back({static_cast<std::uint32_t>(ref.offset(s) + i),
                       static_cast<std::uint32_t>(ref.offset(t) + j), 2.0 * f});
  };
  switch (opt.coupling) {
    case TopologyKind::TemporalChain:
      for (std::size_t t = 1; t < T; ++t)
        for (NodeId i = 0; i < ref.layer_size(t); ++i) couple(t - 1, i, t, i);
      break;
    case TopologyKind::MultiplexAllPairs:
      for (std::size_t s = 0; s < T; ++s)
        for (std::size_t t = s + 1; t < T; ++t)
          for (NodeId i = 0; i < ref.layer_size(s); ++i) couple(s, i, t, i);
      break;
    case TopologyKind::MultilevelTree:
      if (opt.parents.size() != T) throw ValidationError("consensus needs parent maps");
      for (std::size_t t = 1; t < T; ++t)
        for (NodeId i = 0; i < ref.layer_size(t); ++i) couple(t - 1, opt.parents[t][i], t, i);
      break;
  }

  std::vector<std::vector<ModularityGraph::Strength>> str(ref.size());
  std::vector<double> coef(T, 0.0);
  if (gamma > 0.0) {
    for (std::size_t t = 0; t < T; ++t) {
      double tot = 0.0;
      for (NodeId i = 0; i < ref.layer_size(t); ++i) {
        double d = deg[ref.offset(t) + i];
        tot += d;
        str[ref.offset(t) + i].push_back({static_cast<std::uint32_t>(t), d, d});
      }
      coef[t] = tot > 0.0 ? gamma / tot : 0.0;
    }
  }
  return ModularityGraph(ref.size(), pairs, std::vector<double>(ref.size(), 0.0), str, coef);
}

}  // namespace

ConsensusResult consensus_partition(const std::vector<Partition>& parts,
                                    const ConsensusOptions& opt, const OptimizerConfig& cfg) {
  if (parts.size() < 2) throw ValidationError("consensus needs at least two partitions");
  for (const auto& p : parts)
    if (p.layer_sizes() != parts.front().layer_sizes())
      throw ValidationError("partitions do not cover the same node-layer set");
  if (!(opt.threshold >= 0.0 && opt.threshold <= 1.0))
    throw ValidationError("threshold must lie in [0,1]");
  if (opt.reclusterings < 1 || opt.max_rounds < 1)
    throw ValidationError("consensus needs at least one round and one re-clustering");

  std::vector<Partition> current;
  for (const auto& p : parts) current.push_back(p.canonical());
  ConsensusResult res;
  // identical inputs are already a consensus
  if (std::all_of(current.begin(), current.end(), [&](auto& p) { return p == current.front(); })) {
    res.partition = current.front();
    res.stable = true;
    return res;
  }
  for (std::size_t round = 1; round <= opt.max_rounds; ++round) {
    auto g = association_graph(current, opt, opt.gamma);
    std::vector<Partition> next;
    for (std::size_t k = 0; k < opt.reclusterings; ++k) {
      OptimizerConfig c = cfg;
      c.rng_seed = cfg.rng_seed + 7919 * round + k;
      c.postprocess_persistence = false;
      auto lo = louvain(g, c);
      Partition p(current.front().layer_sizes());
      std::copy(lo.comm.begin(), lo.comm.end(), p.flat().begin());
      next.push_back(p.canonical());
    }
    res.rounds = round;
    res.partition = next.front();
    if (std::all_of(next.begin(), next.end(), [&](auto& p) { return p == next.front(); })) {
      res.stable = true;
      return res;
    }
    current = std::move(next);
  }
  return res;
}

}  // namespace mlmod
