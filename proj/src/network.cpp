#include "mlmod/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace mlmod {

namespace {

std::vector<std::size_t> prefix_offsets(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> off(sizes.size() + 1, 0);
  for (std::size_t t = 0; t < sizes.size(); ++t) off[t + 1] = off[t] + sizes[t];
  return off;
}

// counting-sort style CSR fill
void fill_csr(std::size_t n, const std::vector<std::pair<NodeId, Neighbor>>& entries,
              std::vector<std::size_t>& off, std::vector<Neighbor>& adj) {
  off.assign(n + 1, 0);
  for (auto& e : entries) ++off[e.first + 1];
  for (std::size_t i = 0; i < n; ++i) off[i + 1] += off[i];
  adj.resize(entries.size());
  std::vector<std::size_t> cursor(off.begin(), off.end() - 1);
  for (auto& e : entries) adj[cursor[e.first]++] = e.second;
  for (std::size_t i = 0; i < n; ++i)
    std::sort(adj.begin() + off[i], adj.begin() + off[i + 1],
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
}

}  // namespace

MultilayerNetwork::Layer MultilayerNetwork::build_layer(std::size_t n,
                                                        const std::vector<Edge>& edges,
                                                        bool directed, std::size_t t) {
  Layer L;
  L.n = n;
  L.edge_list.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.src >= n || e.dst >= n)
      throw ValidationError("layer " + std::to_string(t + 1) + ": node id out of range (" +
                            std::to_string(std::max(e.src, e.dst)) + " >= " +
                            std::to_string(n) + ")");
    Edge c = e;
    if (!directed && c.src > c.dst) std::swap(c.src, c.dst);
    L.edge_list.push_back(c);
  }
  {
    auto sorted = L.edge_list;
    std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
      return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    for (std::size_t k = 1; k < sorted.size(); ++k)
      if (sorted[k].src == sorted[k - 1].src && sorted[k].dst == sorted[k - 1].dst)
        throw ValidationError("layer " + std::to_string(t + 1) + ": multi-edge " +
                              std::to_string(sorted[k].src) + " " +
                              std::to_string(sorted[k].dst));
  }

  std::vector<std::pair<NodeId, Neighbor>> out, in;
  out.reserve(directed ? edges.size() : 2 * edges.size());
  for (const auto& e : L.edge_list) {
    if (directed) {
      out.push_back({e.src, {e.dst, 1.0}});
      in.push_back({e.dst, {e.src, 1.0}});
    } else if (e.src == e.dst) {
      out.push_back({e.src, {e.src, 2.0}});
    } else {
      out.push_back({e.src, {e.dst, 1.0}});
      out.push_back({e.dst, {e.src, 1.0}});
    }
  }
  fill_csr(n, out, L.out_off, L.out_adj);
  if (directed) fill_csr(n, in, L.in_off, L.in_adj);

  L.kout.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = L.out_off[i]; k < L.out_off[i + 1]; ++k) L.kout[i] += L.out_adj[k].weight;
  if (directed) {
    L.kin.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = L.in_off[i]; k < L.in_off[i + 1]; ++k) L.kin[i] += L.in_adj[k].weight;
  } else {
    L.kin = L.kout;
  }
  L.edges = static_cast<double>(L.edge_list.size());
  L.total = std::accumulate(L.kout.begin(), L.kout.end(), 0.0);
  return L;
}

MultilayerNetwork::MultilayerNetwork(std::vector<std::size_t> layer_sizes,
                                     const std::vector<std::vector<Edge>>& layer_edges,
                                     bool directed)
    : directed_(directed) {
  if (layer_sizes.empty()) throw ValidationError("network needs at least one layer");
  if (layer_edges.size() != layer_sizes.size())
    throw ValidationError("edge lists do not match layer count");
  layers_.reserve(layer_sizes.size());
  for (std::size_t t = 0; t < layer_sizes.size(); ++t)
    layers_.push_back(build_layer(layer_sizes[t], layer_edges[t], directed, t));
  offsets_ = prefix_offsets(layer_sizes);
  max_nodes_ = *std::max_element(layer_sizes.begin(), layer_sizes.end());
  uniform_ = std::all_of(layer_sizes.begin(), layer_sizes.end(),
                         [&](std::size_t n) { return n == layer_sizes.front(); });
}

MultilayerNetwork::MultilayerNetwork(std::size_t num_layers, std::size_t num_nodes,
                                     const std::vector<std::vector<Edge>>& layer_edges,
                                     bool directed)
    : MultilayerNetwork(std::vector<std::size_t>(num_layers, num_nodes), layer_edges, directed) {}

std::vector<std::size_t> MultilayerNetwork::layer_sizes() const {
  std::vector<std::size_t> s;
  for (const auto& L : layers_) s.push_back(L.n);
  return s;
}

std::span<const Neighbor> MultilayerNetwork::out_neighbors(std::size_t t, NodeId i) const {
  const Layer& L = layers_[t];
  return {L.out_adj.data() + L.out_off[i], L.out_off[i + 1] - L.out_off[i]};
}

std::span<const Neighbor> MultilayerNetwork::in_neighbors(std::size_t t, NodeId i) const {
  if (!directed_) return out_neighbors(t, i);
  const Layer& L = layers_[t];
  return {L.in_adj.data() + L.in_off[i], L.in_off[i + 1] - L.in_off[i]};
}

double MultilayerNetwork::adjacency(std::size_t t, NodeId i, NodeId j) const {
  auto row = out_neighbors(t, i);
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const Neighbor& a, NodeId v) { return a.node < v; });
  return (it != row.end() && it->node == j) ? it->weight : 0.0;
}

const char* to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::TemporalChain: return "temporal";
    case TopologyKind::MultiplexAllPairs: return "multiplex";
    case TopologyKind::MultilevelTree: return "multilevel";
  }
  return "?";
}

// ---- Coupling ----

Coupling Coupling::uniform(double omega) {
  Coupling c;
  c.form = Form::Uniform;
  c.omega = omega;
  return c;
}

Coupling Coupling::per_layer(const std::vector<double>& omega_2_to_T) {
  Coupling c;
  c.form = Form::PerLayer;
  c.layers = omega_2_to_T.size() + 1;
  c.values.assign(1, 0.0);
  c.values.insert(c.values.end(), omega_2_to_T.begin(), omega_2_to_T.end());
  return c;
}

Coupling Coupling::per_pair(std::vector<double> matrix, std::size_t T) {
  if (matrix.size() != T * T) throw ValidationError("pair coupling must be T x T");
  Coupling c;
  c.form = Form::PerPair;
  c.layers = T;
  c.values = std::move(matrix);
  for (std::size_t t = 0; t < T; ++t) c.values[t * T + t] = 0.0;
  return c;
}

double Coupling::chain(std::size_t t) const {
  switch (form) {
    case Form::Uniform: return omega;
    case Form::PerLayer: return values[t];
    case Form::PerPair: return values[(t - 1) * layers + t];
  }
  return 0.0;
}

double Coupling::pair(std::size_t s, std::size_t t) const {
  if (s == t) return 0.0;
  switch (form) {
    case Form::Uniform: return omega;
    case Form::PerPair: return values[s * layers + t];
    case Form::PerLayer: break;
  }
  throw ValidationError("per-layer coupling is not defined for multiplex layer pairs");
}

void Coupling::validate(TopologyKind kind, std::size_t T) const {
  auto check = [](double w) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("coupling weights must be finite and >= 0");
  };
  switch (form) {
    case Form::Uniform: check(omega); break;
    case Form::PerLayer:
      if (kind == TopologyKind::MultiplexAllPairs)
        throw ValidationError("per-layer coupling requires a temporal or multilevel topology");
      if (layers != T) throw ValidationError("per-layer coupling length must be T-1");
      for (std::size_t t = 1; t < T; ++t) check(values[t]);
      break;
    case Form::PerPair:
      if (kind != TopologyKind::MultiplexAllPairs)
        throw ValidationError("pair coupling requires a multiplex topology");
      if (layers != T) throw ValidationError("pair coupling must be T x T");
      for (double w : values) check(w);
      break;
  }
}

// ---- InterlayerTopology ----

void InterlayerTopology::validate(const MultilayerNetwork& net) const {
  if (kind != TopologyKind::MultilevelTree && !net.uniform_layers())
    throw ValidationError(std::string(to_string(kind)) +
                          " topology requires the same node count in every layer");
  validate(net.layer_sizes());
}

void InterlayerTopology::validate(const std::vector<std::size_t>& sizes) const {
  if (kind != TopologyKind::MultilevelTree) return;
  if (parents.size() != sizes.size())
    throw ValidationError("parent maps cover " + std::to_string(parents.size()) +
                          " layers, network has " + std::to_string(sizes.size()));
  for (std::size_t t = 1; t < sizes.size(); ++t) {
    if (parents[t].size() != sizes[t])
      throw ValidationError("parent map of layer " + std::to_string(t + 1) + " has " +
                            std::to_string(parents[t].size()) + " entries, layer has " +
                            std::to_string(sizes[t]) + " nodes");
    for (NodeId p : parents[t])
      if (p >= sizes[t - 1])
        throw ValidationError("parent " + std::to_string(p) + " not in layer " +
                              std::to_string(t));
  }
}

// ---- Partition ----

Partition::Partition(std::vector<std::size_t> layer_sizes, Label fill)
    : sizes_(std::move(layer_sizes)), offsets_(prefix_offsets(sizes_)),
      labels_(offsets_.back(), fill) {}

Partition::Partition(std::size_t num_layers, std::size_t num_nodes, Label fill)
    : Partition(std::vector<std::size_t>(num_layers, num_nodes), fill) {}

Partition Partition::from_layers(const std::vector<std::vector<Label>>& layers) {
  std::vector<std::size_t> sizes;
  for (auto& l : layers) sizes.push_back(l.size());
  Partition p(sizes);
  for (std::size_t t = 0; t < layers.size(); ++t)
    std::copy(layers[t].begin(), layers[t].end(), p.layer(t).begin());
  return p;
}

bool Partition::conforms_to(const MultilayerNetwork& net) const {
  if (num_layers() != net.num_layers()) return false;
  for (std::size_t t = 0; t < num_layers(); ++t)
    if (sizes_[t] != net.layer_size(t)) return false;
  return true;
}

Partition Partition::canonical() const {
  Partition out = *this;
  std::unordered_map<Label, Label> remap;
  for (auto& g : out.labels_) {
    auto [it, fresh] = remap.try_emplace(g, static_cast<Label>(remap.size()));
    g = it->second;
  }
  return out;
}

std::size_t Partition::num_labels() const {
  std::vector<Label> l = labels_;
  std::sort(l.begin(), l.end());
  return static_cast<std::size_t>(std::unique(l.begin(), l.end()) - l.begin());
}

// ---- supra-adjacency ----

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  auto b = cols.begin() + row_offsets[r], e = cols.begin() + row_offsets[r + 1];
  auto it = std::lower_bound(b, e, c);
  return (it != e && *it == c) ? vals[it - cols.begin()] : 0.0;
}

SparseMatrix supra_adjacency(const MultilayerNetwork& net, const InterlayerTopology& topo,
                             const Coupling& coupling) {
  topo.validate(net);
  const std::size_t T = net.num_layers();
  coupling.validate(topo.kind, T);
  const std::size_t dim = net.total_node_layers();

  std::vector<std::vector<std::pair<std::size_t, double>>> rows(dim);
  for (std::size_t t = 0; t < T; ++t)
    for (NodeId i = 0; i < net.layer_size(t); ++i)
      for (const auto& nb : net.out_neighbors(t, i))
        rows[net.global_index(t, i)].push_back({net.global_index(t, nb.node), nb.weight});

  auto put = [&](std::size_t r, std::size_t c, double w) {
    if (w != 0.0) rows[r].push_back({c, w});
  };
  switch (topo.kind) {
    case TopologyKind::TemporalChain:
    case TopologyKind::MultilevelTree:
      for (std::size_t t = 1; t < T; ++t)
        for (NodeId i = 0; i < net.layer_size(t); ++i)
          put(net.global_index(t - 1, topo.predecessor(t, i)), net.global_index(t, i),
              coupling.chain(t));
      break;
    case TopologyKind::MultiplexAllPairs:
      for (std::size_t s = 0; s < T; ++s)
        for (std::size_t t = 0; t < T; ++t)
          if (s != t)
            for (NodeId i = 0; i < net.layer_size(s); ++i)
              put(net.global_index(s, i), net.global_index(t, i), coupling.pair(s, t));
      break;
  }

  SparseMatrix m;
  m.dim = dim;
  m.row_offsets.assign(dim + 1, 0);
  for (std::size_t r = 0; r < dim; ++r) {
    auto& row = rows[r];
    std::sort(row.begin(), row.end());
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0 && row[k].first == row[k - 1].first) {
        m.vals.back() += row[k].second;
        continue;
      }
      m.cols.push_back(row[k].first);
      m.vals.push_back(row[k].second);
    }
    m.row_offsets[r + 1] = m.vals.size();
  }
  return m;
}

}  // namespace mlmod
