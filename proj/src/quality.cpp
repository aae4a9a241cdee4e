#include "mlmod/quality.hpp"

#include <algorithm>
#include <cmath>

namespace mlmod {

namespace {

// labels -> 0..K-1 (sorted order), shared across layers
std::vector<std::uint32_t> compact(const std::vector<Label>& labels, std::size_t& K) {
  std::vector<Label> u = labels;
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  K = u.size();
  std::vector<std::uint32_t> out(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k)
    out[k] = static_cast<std::uint32_t>(std::lower_bound(u.begin(), u.end(), labels[k]) - u.begin());
  return out;
}

double null_coef(const MultilayerNetwork& net, std::size_t t, double gamma) {
  double tot = net.adjacency_total(t);
  return tot > 0.0 ? gamma / tot : 0.0;
}

double intra_layer(const MultilayerNetwork& net, std::size_t t, const std::uint32_t* g,
                   std::size_t K, double gamma, std::vector<double>& kout,
                   std::vector<double>& kin) {
  const std::size_t n = net.layer_size(t);
  double a = 0.0;
  std::fill(kout.begin(), kout.begin() + K, 0.0);
  std::fill(kin.begin(), kin.begin() + K, 0.0);
  const auto& dout = net.out_degrees(t);
  const auto& din = net.in_degrees(t);
  for (NodeId i = 0; i < n; ++i) {
    for (const auto& nb : net.out_neighbors(t, i))
      if (g[nb.node] == g[i]) a += nb.weight;
    kout[g[i]] += dout[i];
    kin[g[i]] += din[i];
  }
  double c = null_coef(net, t, gamma);
  double null_sum = 0.0;
  if (c != 0.0)
    for (std::size_t r = 0; r < K; ++r) null_sum += kout[r] * kin[r];
  return a - c * null_sum;
}

}  // namespace

ModularityParams ModularityParams::uniform(std::size_t T, double gamma, double omega,
                                           bool directed) {
  ModularityParams p;
  p.gamma.assign(T, gamma);
  p.beta.assign(T, 1.0);
  p.coupling = Coupling::uniform(omega);
  p.directed = directed;
  return p;
}

void ModularityParams::validate(const MultilayerNetwork& net,
                                const InterlayerTopology& topo) const {
  const std::size_t T = net.num_layers();
  if (gamma.size() != T) throw ValidationError("need one gamma per layer");
  if (beta.size() != T) throw ValidationError("need one beta per layer");
  for (double g : gamma)
    if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("gamma must be positive and finite");
  for (double b : beta)
    if (!std::isfinite(b)) throw ValidationError("beta must be finite");
  if (net.directed() && !directed)
    throw ValidationError("directed network needs the directed null model");
  coupling.validate(topo.kind, T);
  topo.validate(net);
}

ModularityMatrix::ModularityMatrix(const MultilayerNetwork& net, std::size_t t, double gamma)
    : net_(&net), t_(t), n_(net.layer_size(t)), coef_(null_coef(net, t, gamma)),
      total_(net.adjacency_total(t)) {}

double ModularityMatrix::operator()(NodeId i, NodeId j) const {
  return net_->adjacency(t_, i, j) - coef_ * net_->out_degree(t_, i) * net_->in_degree(t_, j);
}

ModularityMatrix modularity_matrix(const MultilayerNetwork& net, std::size_t t, double gamma) {
  if (t >= net.num_layers()) throw ValidationError("layer index out of range");
  if (gamma < 0.0) throw ValidationError("gamma must be non-negative");
  return ModularityMatrix(net, t, gamma);
}

double layer_modularity(const MultilayerNetwork& net, std::size_t t, std::span<const Label> labels,
                        double gamma) {
  if (labels.size() != net.layer_size(t)) throw ValidationError("label vector size mismatch");
  std::size_t K = 0;
  auto g = compact(std::vector<Label>(labels.begin(), labels.end()), K);
  std::vector<double> kout(K), kin(K);
  return intra_layer(net, t, g.data(), K, gamma, kout, kin);
}

ModularityParts modularity_parts(const MultilayerNetwork& net, const InterlayerTopology& topo,
                                 const Partition& p, const ModularityParams& params) {
  if (!p.conforms_to(net)) throw ValidationError("partition does not match network shape");
  params.validate(net, topo);
  const std::size_t T = net.num_layers();
  std::size_t K = 0;
  auto g = compact(p.flat(), K);
  std::vector<double> kout(K), kin(K);

  ModularityParts q;
  for (std::size_t t = 0; t < T; ++t) {
    if (params.beta[t] == 0.0) continue;
    q.intra += params.beta[t] *
               intra_layer(net, t, g.data() + p.offset(t), K, params.gamma[t], kout, kin);
  }
  const auto& c = params.coupling;
  switch (topo.kind) {
    case TopologyKind::TemporalChain:
    case TopologyKind::MultilevelTree: {
      auto pers = layer_persistence(p, topo);
      for (std::size_t t = 1; t < T; ++t) q.inter += c.chain(t) * static_cast<double>(pers[t]);
      break;
    }
    case TopologyKind::MultiplexAllPairs:
      for (std::size_t s = 0; s < T; ++s)
        for (std::size_t t = s + 1; t < T; ++t) {
          double w = c.pair(s, t) + c.pair(t, s);
          if (w == 0.0) continue;
          std::size_t agree = 0;
          for (NodeId i = 0; i < p.layer_size(s); ++i) agree += (p(s, i) == p(t, i));
          q.inter += w * static_cast<double>(agree);
        }
      break;
  }
  return q;
}

double multilayer_modularity(const MultilayerNetwork& net, const InterlayerTopology& topo,
                             const Partition& p, const ModularityParams& params) {
  return modularity_parts(net, topo, p, params).total();
}

std::vector<std::size_t> layer_persistence(const Partition& p, const InterlayerTopology& topo) {
  if (topo.kind == TopologyKind::MultiplexAllPairs)
    throw UnsupportedError("persistence is defined for temporal and multilevel topologies only");
  topo.validate(p.layer_sizes());
  if (topo.kind == TopologyKind::TemporalChain)
    for (std::size_t t = 1; t < p.num_layers(); ++t)
      if (p.layer_size(t) != p.layer_size(0))
        throw ValidationError("temporal persistence needs equal layer sizes");
  std::vector<std::size_t> out(p.num_layers(), 0);
  for (std::size_t t = 1; t < p.num_layers(); ++t) {
    std::size_t c = 0;
    for (NodeId i = 0; i < p.layer_size(t); ++i) c += (p(t - 1, topo.predecessor(t, i)) == p(t, i));
    out[t] = c;
  }
  return out;
}

std::size_t persistence(const Partition& p, const InterlayerTopology& topo) {
  std::size_t s = 0;
  for (auto c : layer_persistence(p, topo)) s += c;
  return s;
}

std::size_t pairwise_agreement_count(const Partition& p) {
  std::size_t c = 0;
  for (std::size_t s = 0; s < p.num_layers(); ++s)
    for (std::size_t t = s + 1; t < p.num_layers(); ++t) {
      if (p.layer_size(s) != p.layer_size(t))
        throw ValidationError("pairwise agreement needs equal layer sizes");
      for (NodeId i = 0; i < p.layer_size(s); ++i) c += (p(s, i) == p(t, i));
    }
  return 2 * c;
}

namespace {

double log_ratio(double th_in, double th_out) {
  if (!(th_in > 0.0) || !(th_out > 0.0)) throw NumericalError("theta must be positive");
  return std::log1p((th_in - th_out) / th_out);
}

double copy_coef(double p, std::size_t K) {
  if (!(p >= 0.0) || p > 1.0) throw ValidationError("p must lie in [0,1]");
  if (p >= 1.0) throw NumericalError("p = 1 gives an infinite interlayer coefficient");
  if (K < 1) throw ValidationError("K must be >= 1");
  return std::log1p(p * static_cast<double>(K) / (1.0 - p));
}

double gamma_star(double th_in, double th_out) {
  const double r = (th_in - th_out) / th_out;
  if (r == 0.0) return th_in;
  return th_out * r / std::log1p(r);
}

}  // namespace

double log_posterior(const MultilayerNetwork& net, const InterlayerTopology& topo,
                     const Partition& p, const SBMParams& sbm) {
  if (!p.conforms_to(net)) throw ValidationError("partition does not match network shape");
  topo.validate(net);
  const std::size_t T = net.num_layers();

  if (!sbm.per_layer()) {
    if (!(sbm.theta_out < sbm.theta_in)) throw NumericalError("log_posterior needs theta_out < theta_in");
    double L = log_ratio(sbm.theta_in, sbm.theta_out);
    double gam = gamma_star(sbm.theta_in, sbm.theta_out);
    double intra = 0.0;
    for (std::size_t t = 0; t < T; ++t) intra += layer_modularity(net, t, p.layer(t), gam);
    double inter = 0.0;
    if (T > 1) {
      double a = copy_coef(sbm.p, sbm.K);
      if (topo.kind == TopologyKind::MultiplexAllPairs)
        inter = a * static_cast<double>(pairwise_agreement_count(p)) / static_cast<double>(T);
      else
        inter = a * static_cast<double>(persistence(p, topo));
    }
    return L * intra + inter;
  }

  if (topo.kind == TopologyKind::MultiplexAllPairs)
    throw UnsupportedError("per-layer log posterior is not available for multiplex networks");
  if (sbm.theta_in_layer.size() != T || sbm.theta_out_layer.size() != T)
    throw ValidationError("per-layer theta vectors must have length T");
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    double ti = sbm.theta_in_layer[t], to = sbm.theta_out_layer[t];
    total += log_ratio(ti, to) * layer_modularity(net, t, p.layer(t), gamma_star(ti, to));
  }
  if (T > 1) {
    auto pers = layer_persistence(p, topo);
    for (std::size_t t = 1; t < T; ++t) {
      double pt = sbm.p_layer.empty() ? sbm.p : sbm.p_layer[t];
      std::size_t Kt = sbm.K_layer.empty() ? sbm.K : sbm.K_layer[t];
      total += copy_coef(pt, Kt) * static_cast<double>(pers[t]);
    }
  }
  return total;
}

}  // namespace mlmod
