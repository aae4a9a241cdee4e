#include <algorithm>

#include "mlmod/optimizer.hpp"

namespace mlmod {

ModularityGraph::ModularityGraph(std::size_t n, const std::vector<PairWeight>& pairs,
                                 std::vector<double> self,
                                 const std::vector<std::vector<Strength>>& strengths,
                                 std::vector<double> coef)
    : self_(std::move(self)), coef_(std::move(coef)) {
  if (self_.size() != n || strengths.size() != n)
    throw ValidationError("modularity graph: per-unit arrays must have length n");

  std::vector<std::size_t> cnt(n + 1, 0);
  for (const auto& p : pairs) {
    if (p.u >= n || p.v >= n) throw ValidationError("modularity graph: unit out of range");
    if (p.u == p.v) continue;
    ++cnt[p.u + 1];
    ++cnt[p.v + 1];
  }
  for (std::size_t u = 0; u < n; ++u) cnt[u + 1] += cnt[u];
  std::vector<std::pair<std::uint32_t, double>> raw(cnt[n]);
  std::vector<std::size_t> cur(cnt.begin(), cnt.end() - 1);
  for (const auto& p : pairs) {
    if (p.u == p.v) {
      self_[p.u] += p.w;
      continue;
    }
    raw[cur[p.u]++] = {p.v, p.w};
    raw[cur[p.v]++] = {p.u, p.w};
  }
  adj_off_.assign(n + 1, 0);
  adj_to_.reserve(raw.size());
  adj_w_.reserve(raw.size());
  for (std::size_t u = 0; u < n; ++u) {
    auto b = raw.begin() + cnt[u], e = raw.begin() + cnt[u + 1];
    std::sort(b, e, [](auto& x, auto& y) { return x.first < y.first; });
    for (auto it = b; it != e; ++it) {
      if (adj_to_.size() > adj_off_[u] && adj_to_.back() == it->first)
        adj_w_.back() += it->second;
      else {
        adj_to_.push_back(it->first);
        adj_w_.push_back(it->second);
      }
    }
    adj_off_[u + 1] = adj_to_.size();
  }

  str_off_.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& s : strengths[u]) {
      if (s.layer >= coef_.size()) throw ValidationError("modularity graph: bad strength layer");
      if (s.out != 0.0 || s.in != 0.0) str_.push_back(s);
    }
    str_off_[u + 1] = str_.size();
  }
}

ModularityGraph ModularityGraph::from_network(const MultilayerNetwork& net,
                                              const InterlayerTopology& topo,
                                              const ModularityParams& params) {
  params.validate(net, topo);
  const std::size_t T = net.num_layers();
  const std::size_t n = net.total_node_layers();
  std::vector<PairWeight> pairs;
  std::vector<double> self(n, 0.0);
  std::vector<std::vector<Strength>> str(n);
  std::vector<double> coef(T, 0.0);

  for (std::size_t t = 0; t < T; ++t) {
    const double b = params.beta[t];
    const double tot = net.adjacency_total(t);
    coef[t] = tot > 0.0 ? b * params.gamma[t] / tot : 0.0;
    for (NodeId i = 0; i < net.layer_size(t); ++i) {
      auto u = static_cast<std::uint32_t>(net.global_index(t, i));
      str[u].push_back({static_cast<std::uint32_t>(t), net.out_degree(t, i), net.in_degree(t, i)});
      if (b == 0.0) continue;
      for (const auto& nb : net.out_neighbors(t, i)) {
        auto v = static_cast<std::uint32_t>(net.global_index(t, nb.node));
        if (u == v)
          self[u] += b * nb.weight;
        else
          pairs.push_back({u, v, b * nb.weight});  // A_ij; A_ji arrives from v's row
      }
    }
  }

  const auto& c = params.coupling;
  switch (topo.kind) {
    case TopologyKind::TemporalChain:
    case TopologyKind::MultilevelTree:
      for (std::size_t t = 1; t < T; ++t) {
        double w = c.chain(t);
        if (w == 0.0) continue;
        for (NodeId i = 0; i < net.layer_size(t); ++i)
          pairs.push_back({static_cast<std::uint32_t>(net.global_index(t - 1, topo.predecessor(t, i))),
                           static_cast<std::uint32_t>(net.global_index(t, i)), w});
      }
      break;
    case TopologyKind::MultiplexAllPairs:
      for (std::size_t s = 0; s < T; ++s)
        for (std::size_t t = s + 1; t < T; ++t) {
          double w = c.pair(s, t) + c.pair(t, s);
          if (w == 0.0) continue;
          for (NodeId i = 0; i < net.layer_size(s); ++i)
            pairs.push_back({static_cast<std::uint32_t>(net.global_index(s, i)),
                             static_cast<std::uint32_t>(net.global_index(t, i)), w});
        }
      break;
  }
  return ModularityGraph(n, pairs, std::move(self), str, std::move(coef));
}

double ModularityGraph::quality(const std::vector<std::uint32_t>& comm) const {
  const std::size_t n = size();
  const std::size_t L = coef_.size();
  double q = 0.0;
  std::uint32_t K = 0;
  for (std::size_t u = 0; u < n; ++u) {
    q += self_[u];
    K = std::max(K, comm[u] + 1);
    double pair = 0.0;
    for (std::size_t k = adj_off_[u]; k < adj_off_[u + 1]; ++k)
      if (comm[adj_to_[k]] == comm[u]) pair += adj_w_[k];
    q += 0.5 * pair;
  }
  std::vector<double> kout(static_cast<std::size_t>(K) * L, 0.0), kin(kout.size(), 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t k = str_off_[u]; k < str_off_[u + 1]; ++k) {
      const auto& s = str_[k];
      kout[comm[u] * L + s.layer] += s.out;
      kin[comm[u] * L + s.layer] += s.in;
    }
  for (std::size_t c = 0; c < K; ++c)
    for (std::size_t l = 0; l < L; ++l)
      if (coef_[l] != 0.0) q -= coef_[l] * kout[c * L + l] * kin[c * L + l];
  return q;
}

ModularityGraph ModularityGraph::aggregate(const std::vector<std::uint32_t>& comm,
                                           std::size_t K) const {
  const std::size_t n = size();
  const std::size_t L = coef_.size();
  ModularityGraph out;
  out.coef_ = coef_;
  out.self_.assign(K, 0.0);

  // members by community
  std::vector<std::size_t> moff(K + 1, 0);
  for (std::size_t u = 0; u < n; ++u) ++moff[comm[u] + 1];
  for (std::size_t c = 0; c < K; ++c) moff[c + 1] += moff[c];
  std::vector<std::uint32_t> members(n);
  {
    std::vector<std::size_t> cur(moff.begin(), moff.end() - 1);
    for (std::size_t u = 0; u < n; ++u) members[cur[comm[u]]++] = static_cast<std::uint32_t>(u);
  }

  std::vector<double> acc(K, 0.0);
  std::vector<char> mark(K, 0);
  std::vector<std::uint32_t> touched;
  std::vector<double> sout(L, 0.0), sin(L, 0.0);
  std::vector<char> lmark(L, 0);
  std::vector<std::uint32_t> ltouched;

  out.adj_off_.assign(K + 1, 0);
  out.str_off_.assign(K + 1, 0);
  for (std::size_t c = 0; c < K; ++c) {
    for (std::size_t m = moff[c]; m < moff[c + 1]; ++m) {
      std::uint32_t u = members[m];
      out.self_[c] += self_[u];
      for (std::size_t k = adj_off_[u]; k < adj_off_[u + 1]; ++k) {
        std::uint32_t d = comm[adj_to_[k]];
        if (d == c) {
          out.self_[c] += 0.5 * adj_w_[k];
          continue;
        }
        if (!mark[d]) {
          mark[d] = 1;
          touched.push_back(d);
        }
        acc[d] += adj_w_[k];
      }
      for (std::size_t k = str_off_[u]; k < str_off_[u + 1]; ++k) {
        const auto& s = str_[k];
        if (!lmark[s.layer]) {
          lmark[s.layer] = 1;
          ltouched.push_back(s.layer);
        }
        sout[s.layer] += s.out;
        sin[s.layer] += s.in;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto d : touched) {
      out.adj_to_.push_back(d);
      out.adj_w_.push_back(acc[d]);
      acc[d] = 0.0;
      mark[d] = 0;
    }
    touched.clear();
    out.adj_off_[c + 1] = out.adj_to_.size();
    std::sort(ltouched.begin(), ltouched.end());
    for (auto l : ltouched) {
      out.str_.push_back({l, sout[l], sin[l]});
      sout[l] = sin[l] = 0.0;
      lmark[l] = 0;
    }
    ltouched.clear();
    out.str_off_[c + 1] = out.str_.size();
  }
  return out;
}

}  // namespace mlmod
