#pragma once

// Brute-force reference implementations used by the tests. Nothing here calls
// into the library beyond its plain data types, so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "mlmod/network.hpp"

namespace oracle {

using mlmod::Edge;
using mlmod::Label;
using mlmod::NodeId;

enum class Coupling { Temporal, Multiplex, Multilevel };

struct Dense {
  std::vector<std::size_t> n;  // layer sizes
  std::vector<std::vector<double>> A;  // row-major n_t x n_t
  bool directed = false;
  Coupling kind = Coupling::Temporal;
  std::vector<std::vector<NodeId>> parents;

  std::size_t T() const { return n.size(); }
  std::size_t total() const {
    std::size_t s = 0;
    for (auto x : n) s += x;
    return s;
  }
  std::size_t offset(std::size_t t) const {
    std::size_t s = 0;
    for (std::size_t u = 0; u < t; ++u) s += n[u];
    return s;
  }
};

// Undirected self-loops count twice on the diagonal.
inline Dense dense(const std::vector<std::size_t>& sizes,
                   const std::vector<std::vector<Edge>>& edges, bool directed,
                   Coupling kind = Coupling::Temporal,
                   std::vector<std::vector<NodeId>> parents = {}) {
  Dense d;
  d.n = sizes;
  d.directed = directed;
  d.kind = kind;
  d.parents = std::move(parents);
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    std::size_t n = sizes[t];
    std::vector<double> a(n * n, 0.0);
    for (auto e : edges[t]) {
      if (directed) {
        a[e.src * n + e.dst] += 1.0;
      } else if (e.src == e.dst) {
        a[e.src * n + e.src] += 2.0;
      } else {
        a[e.src * n + e.dst] += 1.0;
        a[e.dst * n + e.src] += 1.0;
      }
    }
    d.A.push_back(std::move(a));
  }
  return d;
}

// B^t_ij = A_ij - gamma kout_i kin_j / sum(A).
inline std::vector<double> bmatrix(const Dense& d, std::size_t t, double gamma) {
  std::size_t n = d.n[t];
  const auto& a = d.A[t];
  std::vector<double> kout(n, 0.0), kin(n, 0.0);
  double tot = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      kout[i] += a[i * n + j];
      kin[j] += a[i * n + j];
      tot += a[i * n + j];
    }
  std::vector<double> b(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      b[i * n + j] = a[i * n + j] - (tot > 0 ? gamma * kout[i] * kin[j] / tot : 0.0);
  return b;
}

// Same-label count across coupled copies. Temporal / multilevel: one count
// per (t, i), t >= 1. Multiplex: ordered pairs s != t.
inline double coupling_agreement(const Dense& d, const std::vector<Label>& g, std::size_t t) {
  double c = 0.0;
  std::size_t ot = d.offset(t), op = t > 0 ? d.offset(t - 1) : 0;
  for (std::size_t i = 0; i < d.n[t]; ++i) {
    std::size_t pi = d.kind == Coupling::Multilevel ? d.parents[t][i] : i;
    c += g[ot + i] == g[op + pi];
  }
  return c;
}

inline double multiplex_agreement(const Dense& d, const std::vector<Label>& g) {
  double c = 0.0;
  for (std::size_t s = 0; s < d.T(); ++s)
    for (std::size_t t = 0; t < d.T(); ++t) {
      if (s == t) continue;
      for (std::size_t i = 0; i < d.n[s]; ++i) c += g[d.offset(s) + i] == g[d.offset(t) + i];
    }
  return c;
}

// Precomputed evaluator for many labelings of one instance.
class Modularity {
 public:
  Modularity(const Dense& d, std::vector<double> gamma, double omega)
      : d_(d), omega_(omega) {
    for (std::size_t t = 0; t < d.T(); ++t) B_.push_back(bmatrix(d, t, gamma[t]));
  }
  double intra(const std::vector<Label>& g) const {
    double q = 0.0;
    for (std::size_t t = 0; t < d_.T(); ++t) {
      std::size_t n = d_.n[t], o = d_.offset(t);
      const auto& b = B_[t];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (g[o + i] == g[o + j]) q += b[i * n + j];
    }
    return q;
  }
  double inter(const std::vector<Label>& g) const {
    if (d_.kind == Coupling::Multiplex) return omega_ * multiplex_agreement(d_, g);
    double c = 0.0;
    for (std::size_t t = 1; t < d_.T(); ++t) c += coupling_agreement(d_, g, t);
    return omega_ * c;
  }
  double operator()(const std::vector<Label>& g) const { return intra(g) + inter(g); }

 private:
  Dense d_;
  double omega_;
  std::vector<std::vector<double>> B_;
};

// Log-posterior of the planted-partition model with label copying, up to a
// labeling-independent constant. Likelihood: independent Poisson counts on
// every ordered pair (i, j) with mean theta kout_i kin_j / sum(A). Prior:
// layer 0 uniform over K labels, then each coupled copy keeps its
// predecessor's label with probability p and otherwise redraws uniformly.
inline double log_posterior(const Dense& d, const std::vector<Label>& g, double th_in,
                            double th_out, double p, std::size_t K) {
  double ll = 0.0;
  for (std::size_t t = 0; t < d.T(); ++t) {
    std::size_t n = d.n[t], o = d.offset(t);
    const auto& a = d.A[t];
    std::vector<double> kout(n, 0.0), kin(n, 0.0);
    double tot = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        kout[i] += a[i * n + j];
        kin[j] += a[i * n + j];
        tot += a[i * n + j];
      }
    if (tot == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double th = g[o + i] == g[o + j] ? th_in : th_out;
        double lam = th * kout[i] * kin[j] / tot;
        if (lam > 0.0) ll += a[i * n + j] * std::log(lam) - lam;
      }
  }
  double same = std::log(p + (1.0 - p) / K), diff = std::log((1.0 - p) / K);
  for (std::size_t t = 1; t < d.T(); ++t) {
    double agree = coupling_agreement(d, g, t);
    ll += agree * same + (static_cast<double>(d.n[t]) - agree) * diff;
  }
  return ll;
}

// Calls fn on every labeling of n items with at most kmax labels, in
// restricted-growth form (each labeling up to renaming exactly once).
inline void for_each_labeling(std::size_t n, std::size_t kmax,
                              const std::function<void(const std::vector<Label>&)>& fn) {
  std::vector<Label> g(n, 0);
  std::function<void(std::size_t, Label)> rec = [&](std::size_t i, Label used) {
    if (i == n) {
      fn(g);
      return;
    }
    Label lim = std::min<Label>(used + 1, static_cast<Label>(kmax));
    for (Label c = 0; c < lim; ++c) {
      g[i] = c;
      rec(i + 1, std::max<Label>(used, c + 1));
    }
  };
  if (n == 0) {
    fn(g);
    return;
  }
  rec(0, 0);
}

inline double brute_max(const Modularity& q, std::size_t n_total, std::size_t kmax) {
  double best = -INFINITY;
  for_each_labeling(n_total, kmax, [&](const std::vector<Label>& g) { best = std::max(best, q(g)); });
  return best;
}

// NMI with mean-entropy normalization from a contingency table.
inline double nmi(const std::vector<Label>& a, const std::vector<Label>& b) {
  std::map<std::pair<Label, Label>, double> joint;
  std::map<Label, double> pa, pb;
  double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0 / n;
    pa[a[i]] += 1.0 / n;
    pb[b[i]] += 1.0 / n;
  }
  double ha = 0, hb = 0, mi = 0;
  for (auto& [k, v] : pa) ha -= v * std::log(v);
  for (auto& [k, v] : pb) hb -= v * std::log(v);
  for (auto& [k, v] : joint) mi += v * std::log(v / (pa[k.first] * pb[k.second]));
  if (ha + hb == 0.0) return 1.0;
  return 2.0 * mi / (ha + hb);
}

inline std::vector<Edge> random_edges(std::size_t n, double density, std::mt19937_64& rng,
                                      bool directed = false) {
  std::bernoulli_distribution coin(density);
  std::vector<Edge> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = directed ? 0 : i + 1; j < n; ++j)
      if (i != j && coin(rng)) e.push_back({i, j});
  return e;
}

}  // namespace oracle
