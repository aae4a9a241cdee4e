#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "mlmod/network.hpp"

namespace mlmod {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t' || line[k] == '\r')) ++k;
    std::size_t b = k;
    while (k < line.size() && line[k] != ' ' && line[k] != '\t' && line[k] != '\r') ++k;
    if (k > b) out.push_back(line.substr(b, k - b));
  }
  return out;
}

long long to_int(std::string_view tok, std::size_t line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("expected an integer, got '" + std::string(tok) + "'", line);
  return v;
}

double to_real(std::string_view tok, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("expected a number, got '" + std::string(tok) + "'", line);
  return v;
}

NodeId to_node(std::string_view tok, std::size_t line) {
  long long v = to_int(tok, line);
  if (v < 0) throw ValidationError("line " + std::to_string(line) + ": negative node id");
  if (v > 0xFFFFFFFEll) throw ValidationError("line " + std::to_string(line) + ": node id too large");
  return static_cast<NodeId>(v);
}

std::size_t to_layer(std::string_view tok, std::size_t line) {
  long long v = to_int(tok, line);
  if (v < 1)
    throw ValidationError("line " + std::to_string(line) + ": layer index " + std::to_string(v) +
                          " out of range (layers are 1-based)");
  return static_cast<std::size_t>(v);
}

template <class F>
void for_each_line(const std::string& text, F&& f) {
  std::size_t lineno = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    ++lineno;
    f(std::string_view(text).substr(pos, nl - pos), lineno);
    pos = nl + 1;
  }
}

// "#layers T #nodes N #sizes a b c" style headers; anything else after '#' is a comment.
struct Header {
  std::size_t layers = 0;
  std::size_t nodes = 0;
  std::vector<std::size_t> sizes;
};

void read_header(const std::vector<std::string_view>& tok, std::size_t line, Header& h) {
  for (std::size_t k = 0; k < tok.size(); ++k) {
    if (tok[k] == "#layers" && k + 1 < tok.size()) {
      long long v = to_int(tok[++k], line);
      if (v < 1) throw ValidationError("header: #layers must be positive");
      h.layers = static_cast<std::size_t>(v);
    } else if (tok[k] == "#nodes" && k + 1 < tok.size()) {
      long long v = to_int(tok[++k], line);
      if (v < 0) throw ValidationError("header: #nodes must be non-negative");
      h.nodes = static_cast<std::size_t>(v);
    } else if (tok[k] == "#sizes") {
      h.sizes.clear();
      while (k + 1 < tok.size() && tok[k + 1][0] != '#') {
        long long v = to_int(tok[++k], line);
        if (v < 0) throw ValidationError("header: #sizes must be non-negative");
        h.sizes.push_back(static_cast<std::size_t>(v));
      }
    }
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
  if (!out) throw ValidationError("write failed: " + path);
}

// ---- networks ----

MultilayerNetwork parse_network(const std::string& text, bool directed) {
  Header h;
  std::vector<std::vector<Edge>> edges;
  std::size_t max_layer = 0;
  std::size_t max_node = 0;
  bool any_edge = false;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    auto tok = split_ws(line);
    if (tok.empty()) return;
    if (tok[0][0] == '#') {
      read_header(tok, no, h);
      return;
    }
    if (tok.size() != 3 && tok.size() != 4)
      throw ParseError("expected 't i j [w]', got " + std::to_string(tok.size()) + " fields", no);
    std::size_t t = to_layer(tok[0], no);
    NodeId i = to_node(tok[1], no), j = to_node(tok[2], no);
    if (h.layers && t > h.layers)
      throw ValidationError("line " + std::to_string(no) + ": layer index " + std::to_string(t) +
                            " out of range (T=" + std::to_string(h.layers) + ")");
    if (tok.size() == 4) {
      double w = to_real(tok[3], no);
      if (w < 0) throw ValidationError("line " + std::to_string(no) + ": negative weight");
      if (w == 0) return;
      if (w != 1)
        throw ValidationError("line " + std::to_string(no) +
                              ": weights other than 0/1 are not supported");
    }
    if (edges.size() < t) edges.resize(t);
    edges[t - 1].push_back({i, j});
    max_layer = std::max(max_layer, t);
    max_node = std::max<std::size_t>(max_node, std::max(i, j));
    any_edge = true;
  });

  std::size_t T = h.layers ? h.layers : (h.sizes.empty() ? max_layer : h.sizes.size());
  if (T == 0) throw ValidationError("network has no layers (empty file without header)");
  if (!h.sizes.empty() && h.sizes.size() != T)
    throw ValidationError("#sizes lists " + std::to_string(h.sizes.size()) + " layers, expected " +
                          std::to_string(T));
  if (max_layer > T)
    throw ValidationError("layer index " + std::to_string(max_layer) + " out of range");
  edges.resize(T);
  std::vector<std::size_t> sizes = h.sizes;
  if (sizes.empty()) {
    std::size_t N = h.nodes ? h.nodes : (any_edge ? max_node + 1 : 0);
    if (h.nodes && any_edge && max_node >= h.nodes)
      throw ValidationError("node id " + std::to_string(max_node) + " out of range (N=" +
                            std::to_string(h.nodes) + ")");
    sizes.assign(T, N);
  }
  return MultilayerNetwork(sizes, edges, directed);
}

MultilayerNetwork load_network(const std::string& path, bool directed) {
  return parse_network(read_text_file(path), directed);
}

std::string format_network(const MultilayerNetwork& net) {
  std::ostringstream os;
  os << "#layers " << net.num_layers() << " #nodes " << net.num_nodes();
  if (!net.uniform_layers()) {
    os << " #sizes";
    for (auto n : net.layer_sizes()) os << ' ' << n;
  }
  os << '\n';
  for (std::size_t t = 0; t < net.num_layers(); ++t)
    for (const auto& e : net.edges(t)) os << (t + 1) << ' ' << e.src << ' ' << e.dst << '\n';
  return os.str();
}

void save_network(const MultilayerNetwork& net, const std::string& path) {
  write_text_file(path, format_network(net));
}

// ---- parent maps ----

ParentMaps parse_parent_maps(const std::string& text) {
  Header h;
  std::map<std::size_t, std::map<NodeId, NodeId>> entries;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    auto tok = split_ws(line);
    if (tok.empty()) return;
    if (tok[0][0] == '#') {
      read_header(tok, no, h);
      return;
    }
    if (tok.size() != 3) throw ParseError("expected 't i p'", no);
    std::size_t t = to_layer(tok[0], no);
    if (t < 2)
      throw ValidationError("line " + std::to_string(no) + ": parent maps start at layer 2");
    NodeId i = to_node(tok[1], no), p = to_node(tok[2], no);
    if (!entries[t].emplace(i, p).second)
      throw ValidationError("line " + std::to_string(no) + ": duplicate parent entry for node " +
                            std::to_string(i) + " in layer " + std::to_string(t));
  });

  std::size_t T = h.sizes.empty() ? (entries.empty() ? 1 : entries.rbegin()->first) : h.sizes.size();
  if (!entries.empty() && entries.rbegin()->first > T)
    throw ValidationError("parent map layer " + std::to_string(entries.rbegin()->first) +
                          " beyond #sizes");
  ParentMaps pm;
  pm.sizes.assign(T, 0);
  pm.parents.assign(T, {});
  if (!h.sizes.empty()) pm.sizes = h.sizes;
  for (std::size_t t = 2; t <= T; ++t) {
    auto& layer = entries[t];
    std::size_t n = h.sizes.empty() ? (layer.empty() ? 0 : layer.rbegin()->first + 1) : h.sizes[t - 1];
    if (h.sizes.empty()) pm.sizes[t - 1] = n;
    if (layer.size() != n || (!layer.empty() && layer.rbegin()->first >= n)) {
      for (NodeId i = 0; i < n; ++i)
        if (!layer.count(i))
          throw ValidationError("parent map of layer " + std::to_string(t) +
                                " is missing node " + std::to_string(i));
      throw ValidationError("parent map of layer " + std::to_string(t) +
                            " names nodes beyond the layer size");
    }
    auto& out = pm.parents[t - 1];
    out.reserve(n);
    for (auto& [i, p] : layer) out.push_back(p);
  }
  // bounds where the previous layer's size is known
  for (std::size_t t = 1; t < T; ++t) {
    if (pm.sizes[t - 1] == 0 && t == 1 && h.sizes.empty()) continue;
    for (NodeId p : pm.parents[t])
      if (p >= pm.sizes[t - 1])
        throw ValidationError("parent " + std::to_string(p) + " not in layer " + std::to_string(t));
  }
  return pm;
}

ParentMaps load_parent_maps(const std::string& path) {
  return parse_parent_maps(read_text_file(path));
}

void save_parent_maps(const std::vector<std::vector<NodeId>>& parents,
                      const std::vector<std::size_t>& sizes, const std::string& path) {
  std::ostringstream os;
  os << "#sizes";
  for (auto n : sizes) os << ' ' << n;
  os << '\n';
  for (std::size_t t = 1; t < parents.size(); ++t)
    for (std::size_t i = 0; i < parents[t].size(); ++i)
      os << (t + 1) << ' ' << i << ' ' << parents[t][i] << '\n';
  write_text_file(path, os.str());
}

// ---- partitions ----

namespace {

struct RawAssignment {
  std::size_t t;
  NodeId i;
  Label g;
  std::size_t line;
};

std::vector<RawAssignment> read_assignments(const std::string& text) {
  std::vector<RawAssignment> out;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    auto tok = split_ws(line);
    if (tok.empty() || tok[0][0] == '#') return;
    if (tok.size() != 3) throw ParseError("expected 't i g'", no);
    std::size_t t = to_layer(tok[0], no);
    NodeId i = to_node(tok[1], no);
    long long g = to_int(tok[2], no);
    if (g < 0 || g > 0xFFFFFFFFll)
      throw ValidationError("line " + std::to_string(no) + ": labels must be non-negative");
    out.push_back({t - 1, i, static_cast<Label>(g), no});
  });
  return out;
}

Partition assemble(const std::vector<RawAssignment>& raw, const std::vector<std::size_t>& sizes) {
  Partition p(sizes);
  std::vector<char> seen(p.size(), 0);
  for (const auto& a : raw) {
    if (a.t >= sizes.size())
      throw ValidationError("line " + std::to_string(a.line) + ": layer " +
                            std::to_string(a.t + 1) + " out of range");
    if (a.i >= sizes[a.t])
      throw ValidationError("line " + std::to_string(a.line) + ": node " + std::to_string(a.i) +
                            " out of range for layer " + std::to_string(a.t + 1));
    std::size_t k = p.offset(a.t) + a.i;
    if (seen[k])
      throw ValidationError("line " + std::to_string(a.line) + ": duplicate entry for (" +
                            std::to_string(a.t + 1) + ", " + std::to_string(a.i) + ")");
    seen[k] = 1;
    p.flat()[k] = a.g;
  }
  for (std::size_t t = 0; t < sizes.size(); ++t)
    for (NodeId i = 0; i < sizes[t]; ++i)
      if (!seen[p.offset(t) + i])
        throw ValidationError("label missing for layer " + std::to_string(t + 1) + ", node " +
                              std::to_string(i));
  return p;
}

}  // namespace

Partition parse_partition(const std::string& text) {
  auto raw = read_assignments(text);
  std::vector<std::size_t> sizes;
  for (const auto& a : raw) {
    if (sizes.size() <= a.t) sizes.resize(a.t + 1, 0);
    sizes[a.t] = std::max<std::size_t>(sizes[a.t], a.i + 1);
  }
  if (sizes.empty()) throw ValidationError("partition file is empty");
  return assemble(raw, sizes);
}

Partition parse_partition(const std::string& text, const std::vector<std::size_t>& layer_sizes) {
  return assemble(read_assignments(text), layer_sizes);
}

Partition load_partition(const std::string& path) { return parse_partition(read_text_file(path)); }

Partition load_partition(const std::string& path, const std::vector<std::size_t>& layer_sizes) {
  return parse_partition(read_text_file(path), layer_sizes);
}

std::string format_partition(const Partition& p) {
  std::string s;
  s.reserve(p.size() * 10);
  for (std::size_t t = 0; t < p.num_layers(); ++t)
    for (NodeId i = 0; i < p.layer_size(t); ++i) {
      s += std::to_string(t + 1);
      s += ' ';
      s += std::to_string(i);
      s += ' ';
      s += std::to_string(p(t, i));
      s += '\n';
    }
  return s;
}

void save_partition(const Partition& p, const std::string& path) {
  write_text_file(path, format_partition(p));
}

}  // namespace mlmod
