#pragma once

#include <span>
#include <string>
#include <vector>

#include "mlmod/network.hpp"
#include "mlmod/optimizer.hpp"

namespace mlmod {

enum class NmiNorm { MeanEntropy, JointEntropy };
const char* to_string(NmiNorm n);

double entropy(std::span<const Label> a);
double mutual_information(std::span<const Label> a, std::span<const Label> b);
// 1 when both vectors are constant.
double nmi(std::span<const Label> a, std::span<const Label> b, NmiNorm norm = NmiNorm::MeanEntropy);

std::vector<double> layer_nmis(const Partition& a, const Partition& b,
                               NmiNorm norm = NmiNorm::MeanEntropy);
double layer_avg_nmi(const Partition& a, const Partition& b, NmiNorm norm = NmiNorm::MeanEntropy);
// Row-major n x n, unit diagonal. Rows are filled on `threads` workers.
std::vector<double> pairwise_nmi_matrix(const std::vector<Partition>& parts,
                                        NmiNorm norm = NmiNorm::MeanEntropy,
                                        unsigned threads = 1);

struct ConsensusOptions {
  double threshold = 0.5;
  std::size_t reclusterings = 10;  // optimizer runs per round
  std::size_t max_rounds = 20;
  // 0: no null model, communities follow the thresholded association graph.
  // > 0: weighted-degree null model with this resolution.
  double gamma = 0.0;
  TopologyKind coupling = TopologyKind::TemporalChain;  // which cross-layer pairs carry weight
  std::vector<std::vector<NodeId>> parents;             // multilevel only
};

struct ConsensusResult {
  Partition partition;
  std::size_t rounds = 0;
  bool stable = false;  // every re-clustering of the last round agreed
};

// Co-classification consensus over node-layer pairs.
ConsensusResult consensus_partition(const std::vector<Partition>& parts,
                                    const ConsensusOptions& opt, const OptimizerConfig& cfg);

// ---- metadata ----

struct MetadataColumn {
  std::string name;
  std::vector<Label> codes;             // one per physical node
  std::vector<std::string> categories;  // code -> category text
};

struct MetadataTable {
  std::vector<MetadataColumn> columns;
  std::size_t num_nodes() const { return columns.empty() ? 0 : columns.front().codes.size(); }
};

// CSV with a header. An optional column named "node" (or "id") gives the node
// index; otherwise rows are nodes 0..n-1 in order. Columns listed in
// `binned` must be numeric and are grouped into [k*width, (k+1)*width) bins.
MetadataTable parse_metadata(const std::string& csv, const std::vector<std::string>& binned = {},
                             double bin_width = 5.0);
MetadataTable load_metadata(const std::string& path, const std::vector<std::string>& binned = {},
                            double bin_width = 5.0);

enum class LayerMode { PerLayer, Flatten };

struct MetadataNmi {
  double value = 0.0;              // mean over layers (PerLayer) or the flat NMI
  std::vector<double> per_layer;   // PerLayer only
};

MetadataNmi metadata_nmi(const Partition& p, std::span<const Label> metadata, LayerMode mode,
                         NmiNorm norm = NmiNorm::MeanEntropy);

}  // namespace mlmod
