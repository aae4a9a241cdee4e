#include "mlmod/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

namespace mlmod {

const char* to_string(NmiNorm n) {
  return n == NmiNorm::MeanEntropy ? "mean_entropy" : "joint_entropy";
}

namespace {

std::vector<std::uint32_t> dense_codes(std::span<const Label> a, std::size_t& k) {
  std::unordered_map<Label, std::uint32_t> m;
  std::vector<std::uint32_t> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = m.try_emplace(a[i], static_cast<std::uint32_t>(m.size())).first->second;
  k = m.size();
  return out;
}

double h_of_counts(const std::vector<std::size_t>& c, double n) {
  double h = 0.0;
  for (auto x : c)
    if (x) {
      double q = static_cast<double>(x) / n;
      h -= q * std::log(q);
    }
  return h;
}

struct Entropies {
  double ha, hb, hab;
};

Entropies entropies(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) throw ValidationError("label vectors have different lengths");
  if (a.empty()) throw ValidationError("label vectors are empty");
  std::size_t ka = 0, kb = 0;
  auto ca = dense_codes(a, ka), cb = dense_codes(b, kb);
  const double n = static_cast<double>(a.size());
  std::vector<std::size_t> na(ka, 0), nb(kb, 0);
  std::unordered_map<std::uint64_t, std::size_t> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++na[ca[i]];
    ++nb[cb[i]];
    ++joint[(static_cast<std::uint64_t>(ca[i]) << 32) | cb[i]];
  }
  std::vector<std::size_t> nj;
  nj.reserve(joint.size());
  for (auto& [k, v] : joint) nj.push_back(v);
  std::sort(nj.begin(), nj.end());  // fixed summation order
  return {h_of_counts(na, n), h_of_counts(nb, n), h_of_counts(nj, n)};
}

}  // namespace

double entropy(std::span<const Label> a) {
  std::size_t k = 0;
  auto c = dense_codes(a, k);
  std::vector<std::size_t> n(k, 0);
  for (auto x : c) ++n[x];
  return a.empty() ? 0.0 : h_of_counts(n, static_cast<double>(a.size()));
}

double mutual_information(std::span<const Label> a, std::span<const Label> b) {
  auto e = entropies(a, b);
  return std::max(0.0, e.ha + e.hb - e.hab);
}

double nmi(std::span<const Label> a, std::span<const Label> b, NmiNorm norm) {
  auto e = entropies(a, b);
  double I = std::max(0.0, e.ha + e.hb - e.hab);
  double d = norm == NmiNorm::MeanEntropy ? 0.5 * (e.ha + e.hb) : e.hab;
  if (d <= 1e-15) return 1.0;  // both constant
  return std::clamp(I / d, 0.0, 1.0);
}

std::vector<double> layer_nmis(const Partition& a, const Partition& b, NmiNorm norm) {
  if (a.layer_sizes() != b.layer_sizes()) throw ValidationError("partitions have different shapes");
  std::vector<double> out;
  for (std::size_t t = 0; t < a.num_layers(); ++t) out.push_back(nmi(a.layer(t), b.layer(t), norm));
  return out;
}

double layer_avg_nmi(const Partition& a, const Partition& b, NmiNorm norm) {
  auto v = layer_nmis(a, b, norm);
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 1.0 : s / static_cast<double>(v.size());
}

std::vector<double> pairwise_nmi_matrix(const std::vector<Partition>& parts, NmiNorm norm,
                                        unsigned threads) {
  const std::size_t n = parts.size();
  if (n == 0) throw ValidationError("no partitions to compare");
  for (auto& p : parts)
    if (p.layer_sizes() != parts[0].layer_sizes())
      throw ValidationError("partitions have different shapes");
  std::vector<double> M(n * n, 1.0);
  auto row = [&](std::size_t a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double v = layer_avg_nmi(parts[a], parts[b], norm);
      M[a * n + b] = v;
      M[b * n + a] = v;
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (std::size_t a = 0; a < n; ++a) row(a);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t a = w; a < n; a += threads) row(a);
      });
    for (auto& th : pool) th.join();
  }
  return M;
}

MetadataNmi metadata_nmi(const Partition& p, std::span<const Label> metadata, LayerMode mode,
                         NmiNorm norm) {
  MetadataNmi r;
  for (std::size_t t = 0; t < p.num_layers(); ++t)
    if (p.layer_size(t) != metadata.size())
      throw ValidationError("metadata covers " + std::to_string(metadata.size()) +
                            " nodes, layer " + std::to_string(t + 1) + " has " +
                            std::to_string(p.layer_size(t)));
  if (mode == LayerMode::PerLayer) {
    double s = 0.0;
    for (std::size_t t = 0; t < p.num_layers(); ++t) {
      r.per_layer.push_back(nmi(p.layer(t), metadata, norm));
      s += r.per_layer.back();
    }
    r.value = s / static_cast<double>(p.num_layers());
  } else {
    std::vector<Label> meta;
    meta.reserve(p.size());
    for (std::size_t t = 0; t < p.num_layers(); ++t) meta.insert(meta.end(), metadata.begin(), metadata.end());
    r.value = nmi(p.flat(), meta, norm);
  }
  return r;
}

}  // namespace mlmod
