#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlmod/errors.hpp"

namespace mlmod {

using NodeId = std::uint32_t;
using Label = std::uint32_t;

struct Edge {
  NodeId src;
  NodeId dst;
};

struct Neighbor {
  NodeId node;
  double weight;
};

// Intralayer adjacency for all layers, CSR per layer. Immutable once built.
//
// Undirected self-loops are stored as A_ii = 2: one edge toward m_t, two
// toward d_i, so sum(d) == 2m holds exactly. Directed self-loops are A_ii = 1.
class MultilayerNetwork {
 public:
  MultilayerNetwork() = default;
  // layer_edges[t] lists edges of layer t (0-based here). Undirected edges may
  // be given in either orientation, once each. Duplicates are rejected.
  MultilayerNetwork(std::vector<std::size_t> layer_sizes,
                    const std::vector<std::vector<Edge>>& layer_edges, bool directed);
  // Uniform node count N in every layer.
  MultilayerNetwork(std::size_t num_layers, std::size_t num_nodes,
                    const std::vector<std::vector<Edge>>& layer_edges, bool directed);

  std::size_t num_layers() const { return layers_.size(); }
  std::size_t layer_size(std::size_t t) const { return layers_[t].n; }
  // Largest layer size; equals N when all layers agree.
  std::size_t num_nodes() const { return max_nodes_; }
  bool uniform_layers() const { return uniform_; }
  std::size_t total_node_layers() const { return offsets_.back(); }
  std::size_t offset(std::size_t t) const { return offsets_[t]; }
  std::size_t global_index(std::size_t t, NodeId i) const { return offsets_[t] + i; }
  const std::vector<std::size_t>& layer_offsets() const { return offsets_; }
  std::vector<std::size_t> layer_sizes() const;
  bool directed() const { return directed_; }

  std::span<const Neighbor> out_neighbors(std::size_t t, NodeId i) const;
  // Same as out_neighbors for undirected layers.
  std::span<const Neighbor> in_neighbors(std::size_t t, NodeId i) const;

  double out_degree(std::size_t t, NodeId i) const { return layers_[t].kout[i]; }
  double in_degree(std::size_t t, NodeId i) const { return layers_[t].kin[i]; }
  // Undirected degree d_i; for directed layers this is the out-degree.
  double degree(std::size_t t, NodeId i) const { return layers_[t].kout[i]; }
  const std::vector<double>& out_degrees(std::size_t t) const { return layers_[t].kout; }
  const std::vector<double>& in_degrees(std::size_t t) const { return layers_[t].kin; }

  // m_t for undirected layers, m'_t for directed ones.
  double edge_count(std::size_t t) const { return layers_[t].edges; }
  // sum_ij A_ij: 2 m_t (undirected) or m'_t (directed). The null term of either
  // kind is kout_i kin_j / adjacency_total.
  double adjacency_total(std::size_t t) const { return layers_[t].total; }

  double adjacency(std::size_t t, NodeId i, NodeId j) const;
  // Edges as loaded (undirected: one orientation, src <= dst).
  const std::vector<Edge>& edges(std::size_t t) const { return layers_[t].edge_list; }

 private:
  struct Layer {
    std::size_t n = 0;
    std::vector<std::size_t> out_off, in_off;
    std::vector<Neighbor> out_adj, in_adj;
    std::vector<double> kout, kin;
    std::vector<Edge> edge_list;
    double edges = 0.0;
    double total = 0.0;
  };
  static Layer build_layer(std::size_t n, const std::vector<Edge>& edges, bool directed,
                           std::size_t t);

  std::vector<Layer> layers_;
  std::vector<std::size_t> offsets_{0};
  std::size_t max_nodes_ = 0;
  bool uniform_ = true;
  bool directed_ = false;
};

enum class TopologyKind { TemporalChain, MultiplexAllPairs, MultilevelTree };

const char* to_string(TopologyKind k);

// Interlayer coupling weights. Chain topologies read chain(t), the weight on
// the link from layer t-1 to layer t (0-based t >= 1). Multiplex reads pair(s,t).
struct Coupling {
  enum class Form { Uniform, PerLayer, PerPair };
  Form form = Form::Uniform;
  double omega = 0.0;
  std::vector<double> values;  // PerLayer: length T, [0] unused. PerPair: T*T row-major.
  std::size_t layers = 0;      // T for PerLayer / PerPair

  static Coupling uniform(double omega);
  // omegas for layers 2..T (length T-1).
  static Coupling per_layer(const std::vector<double>& omega_2_to_T);
  static Coupling per_pair(std::vector<double> matrix, std::size_t T);

  double chain(std::size_t t) const;
  double pair(std::size_t s, std::size_t t) const;
  void validate(TopologyKind kind, std::size_t T) const;
};

// Interlayer structure only; the weights travel in Coupling / ModularityParams.
struct InterlayerTopology {
  TopologyKind kind = TopologyKind::TemporalChain;
  // parents[t][i] = pi^t(i), node of layer t-1. parents[0] is empty.
  std::vector<std::vector<NodeId>> parents;

  static InterlayerTopology temporal() { return {TopologyKind::TemporalChain, {}}; }
  static InterlayerTopology multiplex() { return {TopologyKind::MultiplexAllPairs, {}}; }
  static InterlayerTopology multilevel(std::vector<std::vector<NodeId>> parents) {
    return {TopologyKind::MultilevelTree, std::move(parents)};
  }
  bool chain_like() const { return kind != TopologyKind::MultiplexAllPairs; }
  // Node of layer t-1 that (t, i) is coupled to.
  NodeId predecessor(std::size_t t, NodeId i) const {
    return kind == TopologyKind::MultilevelTree ? parents[t][i] : i;
  }
  void validate(const MultilayerNetwork& net) const;
  void validate(const std::vector<std::size_t>& layer_sizes) const;
};

// Flat label vector with per-layer offsets.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<std::size_t> layer_sizes, Label fill = 0);
  Partition(std::size_t num_layers, std::size_t num_nodes, Label fill = 0);
  static Partition from_layers(const std::vector<std::vector<Label>>& layers);

  std::size_t num_layers() const { return sizes_.size(); }
  std::size_t layer_size(std::size_t t) const { return sizes_[t]; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t offset(std::size_t t) const { return offsets_[t]; }

  Label operator()(std::size_t t, NodeId i) const { return labels_[offsets_[t] + i]; }
  Label& operator()(std::size_t t, NodeId i) { return labels_[offsets_[t] + i]; }
  std::span<const Label> layer(std::size_t t) const {
    return {labels_.data() + offsets_[t], sizes_[t]};
  }
  std::span<Label> layer(std::size_t t) { return {labels_.data() + offsets_[t], sizes_[t]}; }
  const std::vector<Label>& flat() const { return labels_; }
  std::vector<Label>& flat() { return labels_; }

  bool conforms_to(const MultilayerNetwork& net) const;
  // Labels renumbered 0..K-1 in order of first appearance (layer-major).
  Partition canonical() const;
  std::size_t num_labels() const;

  bool operator==(const Partition& o) const = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Label> labels_;
};

// Sparse square matrix in CSR form, rows sorted by column.
struct SparseMatrix {
  std::size_t dim = 0;
  std::vector<std::size_t> row_offsets{0};
  std::vector<std::size_t> cols;
  std::vector<double> vals;

  double at(std::size_t r, std::size_t c) const;
  std::size_t nonzeros() const { return vals.size(); }
};

// Block matrix of the whole multilayer network: A^t on the diagonal blocks,
// diagonal coupling blocks off it (temporal t-1 -> t only; multiplex both ways;
// multilevel parent -> child).
SparseMatrix supra_adjacency(const MultilayerNetwork& net, const InterlayerTopology& topo,
                             const Coupling& coupling);

// ---- file I/O ----

MultilayerNetwork load_network(const std::string& path, bool directed);
MultilayerNetwork parse_network(const std::string& text, bool directed);
void save_network(const MultilayerNetwork& net, const std::string& path);
std::string format_network(const MultilayerNetwork& net);

struct ParentMaps {
  // sizes[t] = N^t. sizes[0] is 0 when the file gave no "#sizes" header.
  std::vector<std::size_t> sizes;
  std::vector<std::vector<NodeId>> parents;
};
ParentMaps load_parent_maps(const std::string& path);
ParentMaps parse_parent_maps(const std::string& text);
void save_parent_maps(const std::vector<std::vector<NodeId>>& parents,
                      const std::vector<std::size_t>& sizes, const std::string& path);

void save_partition(const Partition& p, const std::string& path);
std::string format_partition(const Partition& p);
// Layer sizes inferred from the largest node id seen per layer.
Partition load_partition(const std::string& path);
Partition parse_partition(const std::string& text);
// Layer sizes fixed by the caller; every (t,i) must appear exactly once.
Partition load_partition(const std::string& path, const std::vector<std::size_t>& layer_sizes);
Partition parse_partition(const std::string& text, const std::vector<std::size_t>& layer_sizes);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mlmod
