#include "mlmod/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mlmod {

namespace {

std::vector<std::uint32_t> compact_labels(const Partition& p, std::size_t& K) {
  std::vector<Label> u = p.flat();
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  K = u.size();
  std::vector<std::uint32_t> g(p.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    g[k] = static_cast<std::uint32_t>(std::lower_bound(u.begin(), u.end(), p.flat()[k]) - u.begin());
  return g;
}

void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("copying probability must lie in [0,1]");
}

double copy_log_term(double p, std::size_t K) {
  double q = std::min(p, kPClamp);
  return std::log1p(q * static_cast<double>(K) / (1.0 - q));
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

std::size_t pick_K(const std::vector<std::size_t>& K_layer, std::size_t t) {
  if (K_layer.empty()) throw ValidationError("K per layer is empty");
  return K_layer.size() == 1 ? K_layer[0] : K_layer.at(t);
}

ThetaEstimate theta_from_sums(double intra, double null_in, double total, double null_out) {
  if (!(null_in > 0.0)) throw NumericalError("theta_in is undefined: no degree mass");
  ThetaEstimate e;
  e.theta_in = intra / null_in;
  double out_mass = total - intra;
  e.theta_out = null_out > 0.0 ? out_mass / null_out : 0.0;
  if (e.theta_out < kThetaFloor * e.theta_in || null_out <= 0.0) {
    e.theta_out = kThetaFloor * e.theta_in;
    e.clamped = true;
  }
  return e;
}

}  // namespace

PartitionStats partition_stats(const MultilayerNetwork& net, const Partition& p,
                               const InterlayerTopology& topo) {
  if (!p.conforms_to(net)) throw ValidationError("partition does not match network shape");
  std::size_t K = 0;
  auto g = compact_labels(p, K);
  PartitionStats st;
  const std::size_t T = net.num_layers();
  st.layers.resize(T);
  std::vector<double> kin(K);
  for (std::size_t t = 0; t < T; ++t) {
    auto& L = st.layers[t];
    L.kappa.assign(K, 0.0);
    std::fill(kin.begin(), kin.end(), 0.0);
    const std::uint32_t* gl = g.data() + p.offset(t);
    for (NodeId i = 0; i < net.layer_size(t); ++i) {
      for (const auto& nb : net.out_neighbors(t, i))
        if (gl[nb.node] == gl[i]) L.intra_mass += nb.weight;
      L.kappa[gl[i]] += net.out_degree(t, i);
      kin[gl[i]] += net.in_degree(t, i);
    }
    L.total_mass = net.adjacency_total(t);
    L.m = net.edge_count(t);
    for (std::size_t r = 0; r < K; ++r) L.kappa_sq += L.kappa[r] * kin[r];
    // undirected: intra_mass counts every internal edge twice (self-loops: A_ii = 2)
    double scale = net.directed() ? 1.0 : 0.5;
    L.m_in = L.intra_mass * scale;
    L.m_out = L.m - L.m_in;
  }
  if (T > 1) {
    if (topo.chain_like()) {
      st.layer_persistence = layer_persistence(p, topo);
      st.persistence = std::accumulate(st.layer_persistence.begin(), st.layer_persistence.end(),
                                       std::size_t{0});
    } else {
      st.pairwise_agreement = empirical_pairwise_agreement(p);
    }
  }
  return st;
}

ThetaEstimate estimate_theta(const MultilayerNetwork& net, const Partition& p) {
  auto st = partition_stats(net, p, InterlayerTopology::multiplex());
  double intra = 0, null_in = 0, total = 0, null_out = 0;
  for (const auto& L : st.layers) {
    if (L.total_mass <= 0.0) continue;
    intra += L.intra_mass;
    null_in += L.kappa_sq / L.total_mass;
    total += L.total_mass;
    null_out += L.total_mass - L.kappa_sq / L.total_mass;
  }
  if (total <= 0.0) throw NumericalError("cannot estimate theta: every layer is empty");
  return theta_from_sums(intra, null_in, total, null_out);
}

std::vector<ThetaEstimate> estimate_theta_per_layer(const MultilayerNetwork& net,
                                                    const Partition& p) {
  auto pooled = estimate_theta(net, p);
  auto st = partition_stats(net, p, InterlayerTopology::multiplex());
  std::vector<ThetaEstimate> out;
  for (const auto& L : st.layers) {
    if (L.total_mass <= 0.0) {
      ThetaEstimate e = pooled;
      e.valid = false;
      out.push_back(e);
      continue;
    }
    double ni = L.kappa_sq / L.total_mass;
    out.push_back(theta_from_sums(L.intra_mass, ni, L.total_mass, L.total_mass - ni));
  }
  return out;
}

std::size_t estimate_K(const Partition& p) { return p.num_labels(); }

std::vector<std::size_t> estimate_K_per_layer(const Partition& p) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < p.num_layers(); ++t) {
    std::vector<Label> l(p.layer(t).begin(), p.layer(t).end());
    std::sort(l.begin(), l.end());
    out.push_back(static_cast<std::size_t>(std::unique(l.begin(), l.end()) - l.begin()));
  }
  return out;
}

namespace {

double p_from_rate(double rate, std::size_t K) {
  if (K < 2)
    throw NumericalError("copying probability undefined for K = 1; treat the coupling as 0");
  double inv = 1.0 / static_cast<double>(K);
  return clamp01((rate - inv) / (1.0 - inv));
}

double chain_p(const Partition& p, const InterlayerTopology& topo, std::size_t K) {
  if (p.num_layers() < 2) throw ValidationError("copying probability needs T >= 2");
  if (K < 2)
    throw NumericalError("copying probability undefined for K = 1; treat the coupling as 0");
  auto pers = layer_persistence(p, topo);
  double num = 0, den = 0;
  for (std::size_t t = 1; t < p.num_layers(); ++t) {
    num += static_cast<double>(pers[t]);
    den += static_cast<double>(p.layer_size(t));
  }
  if (den <= 0) throw NumericalError("no node-layer pairs below the first layer");
  return p_from_rate(num / den, K);
}

std::vector<double> chain_p_layers(const Partition& p, const InterlayerTopology& topo,
                                   const std::vector<std::size_t>& K_layer) {
  if (p.num_layers() < 2) throw ValidationError("copying probability needs T >= 2");
  auto pers = layer_persistence(p, topo);
  std::vector<double> out(p.num_layers(), 0.0);
  for (std::size_t t = 1; t < p.num_layers(); ++t) {
    if (p.layer_size(t) == 0) continue;
    out[t] = p_from_rate(static_cast<double>(pers[t]) / static_cast<double>(p.layer_size(t)),
                         pick_K(K_layer, t));
  }
  return out;
}

}  // namespace

double estimate_p_temporal(const Partition& p, std::size_t K) {
  return chain_p(p, InterlayerTopology::temporal(), K);
}

std::vector<double> estimate_p_temporal_per_layer(const Partition& p,
                                                  const std::vector<std::size_t>& K_layer) {
  return chain_p_layers(p, InterlayerTopology::temporal(), K_layer);
}

double estimate_p_multilevel(const Partition& p, const InterlayerTopology& topo, std::size_t K) {
  return chain_p(p, topo, K);
}

std::vector<double> estimate_p_multilevel_per_layer(const Partition& p,
                                                    const InterlayerTopology& topo,
                                                    const std::vector<std::size_t>& K_layer) {
  return chain_p_layers(p, topo, K_layer);
}

double multiplex_agreement(double p, std::size_t K, std::size_t T) {
  if (T < 2) throw ValidationError("agreement needs T >= 2");
  if (K < 1) throw ValidationError("K must be >= 1");
  const double Td = static_cast<double>(T);
  const double inv = 1.0 / static_cast<double>(K);
  double s = 0.0, pn = 1.0;
  for (std::size_t n = 1; n < T; ++n) {
    pn *= p;
    s += pn * static_cast<double>(T - n);
  }
  return 2.0 * (1.0 - inv) / (Td * (Td - 1.0)) * s + inv;
}

double empirical_pairwise_agreement(const Partition& p) {
  const std::size_t T = p.num_layers();
  if (T < 2) throw ValidationError("agreement needs T >= 2");
  double pairs = 0.0;
  for (std::size_t s = 0; s < T; ++s) pairs += static_cast<double>(p.layer_size(s));
  pairs *= static_cast<double>(T - 1);
  if (pairs <= 0) return 0.0;
  return static_cast<double>(pairwise_agreement_count(p)) / pairs;
}

double invert_multiplex_agreement(double a, std::size_t K, std::size_t T) {
  if (K < 2) throw NumericalError("copying probability undefined for K = 1; treat the coupling as 0");
  const double inv = 1.0 / static_cast<double>(K);
  a = std::clamp(a, inv, 1.0);
  if (a <= inv) return 0.0;
  if (a >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    if (multiplex_agreement(mid, K, T) < a)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double estimate_p_multiplex(const Partition& p, std::size_t K, std::size_t T) {
  if (T != p.num_layers()) throw ValidationError("T does not match the partition");
  return invert_multiplex_agreement(empirical_pairwise_agreement(p), K, T);
}

namespace {

double log_ratio(double a, double b) { return std::log1p((a - b) / b); }

}  // namespace

double gamma_from_theta(double theta_in, double theta_out) {
  if (!(theta_in > 0.0) || !(theta_out > 0.0)) throw NumericalError("theta must be positive");
  // log1p keeps the ratio exact when theta_in and theta_out nearly coincide
  const double r = (theta_in - theta_out) / theta_out;
  if (r == 0.0) return theta_in;
  return theta_out * r / std::log1p(r);
}

double omega_temporal(double theta_in, double theta_out, double p, std::size_t K,
                      double omega_max) {
  check_p(p);
  if (K < 1) throw ValidationError("K must be >= 1");
  if (!(theta_out > 0.0) || !(theta_in > theta_out))
    throw NumericalError("omega needs theta_in > theta_out > 0");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return omega_max;
  double w = copy_log_term(p, K) / (log_ratio(theta_in, theta_out));
  return std::min(w, omega_max);
}

double omega_multiplex_uniform(double theta_in, double theta_out, double p, std::size_t K,
                               std::size_t T, double omega_max) {
  if (T < 1) throw ValidationError("T must be >= 1");
  return omega_temporal(theta_in, theta_out, p, K, omega_max) / static_cast<double>(T);
}

double mean_log_ratio(const std::vector<double>& theta_in, const std::vector<double>& theta_out) {
  if (theta_in.empty() || theta_in.size() != theta_out.size())
    throw ValidationError("per-layer theta vectors must be non-empty and equal length");
  double s = 0.0;
  for (std::size_t t = 0; t < theta_in.size(); ++t) {
    if (!(theta_in[t] > 0.0) || !(theta_out[t] > 0.0)) throw NumericalError("theta must be positive");
    s += log_ratio(theta_in[t], theta_out[t]);
  }
  return s / static_cast<double>(theta_in.size());
}

std::vector<double> gamma_per_layer(const std::vector<double>& theta_in,
                                    const std::vector<double>& theta_out) {
  std::vector<double> g;
  for (std::size_t t = 0; t < theta_in.size(); ++t) g.push_back(gamma_from_theta(theta_in[t], theta_out[t]));
  return g;
}

std::vector<double> omega_per_layer(const std::vector<double>& theta_in,
                                    const std::vector<double>& theta_out,
                                    const std::vector<double>& p_layer,
                                    const std::vector<std::size_t>& K_layer, double omega_max) {
  const std::size_t T = theta_in.size();
  if (p_layer.size() != T) throw ValidationError("p per layer must have length T");
  double Lbar = mean_log_ratio(theta_in, theta_out);
  if (!(Lbar > 0.0)) throw NumericalError("mean log(theta_in/theta_out) must be positive");
  std::vector<double> w(T, 0.0);
  for (std::size_t t = 1; t < T; ++t) {
    check_p(p_layer[t]);
    if (p_layer[t] == 0.0) continue;
    w[t] = p_layer[t] == 1.0 ? omega_max
                             : std::min(omega_max, copy_log_term(p_layer[t], pick_K(K_layer, t)) / Lbar);
  }
  return w;
}

double omega_multiplex_uniform(const std::vector<double>& theta_in,
                               const std::vector<double>& theta_out, double p, std::size_t K,
                               double omega_max) {
  check_p(p);
  double Lbar = mean_log_ratio(theta_in, theta_out);
  if (!(Lbar > 0.0)) throw NumericalError("mean log(theta_in/theta_out) must be positive");
  const double T = static_cast<double>(theta_in.size());
  if (p == 0.0) return 0.0;
  if (p == 1.0) return omega_max / T;
  return std::min(omega_max, copy_log_term(p, K) / Lbar) / T;
}

std::vector<double> beta_weights(const std::vector<double>& theta_in,
                                 const std::vector<double>& theta_out) {
  double Lbar = mean_log_ratio(theta_in, theta_out);
  if (!(Lbar > 0.0)) throw NumericalError("mean log(theta_in/theta_out) must be positive");
  std::vector<double> b;
  for (std::size_t t = 0; t < theta_in.size(); ++t)
    b.push_back((log_ratio(theta_in[t], theta_out[t])) / Lbar);
  return b;
}

std::vector<double> permutation_pair_weights(const std::vector<Label>& labels,
                                             const std::vector<double>& p_pair, std::size_t K) {
  const std::size_t T = labels.size();
  if (T < 2 || T > 10) throw UnsupportedError("permutation enumeration supports 2 <= T <= 10");
  if (p_pair.size() != T * T) throw ValidationError("p_pair must be T x T");
  const double Kd = static_cast<double>(K);
  // per ordered pair factor (1-p) + pK delta; no division so p = 1 is fine
  std::vector<double> f(T * T, 0.0);
  for (std::size_t a = 0; a < T; ++a)
    for (std::size_t b = 0; b < T; ++b) {
      if (a == b) continue;
      double p = p_pair[a * T + b];
      check_p(p);
      f[a * T + b] = (1.0 - p) + p * Kd * (labels[a] == labels[b] ? 1.0 : 0.0);
    }
  std::vector<std::size_t> sigma(T);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  std::vector<double> M(T * T, 0.0);
  double Z = 0.0;
  do {
    double w = 1.0;
    for (std::size_t k = 1; k < T; ++k) w *= f[sigma[k - 1] * T + sigma[k]];
    Z += w;
    if (w == 0.0) continue;
    for (std::size_t k = 1; k < T; ++k) M[sigma[k - 1] * T + sigma[k]] += w;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  if (!(Z > 0.0)) throw NumericalError("permutation weights sum to zero");
  for (double& m : M) m /= Z;
  return M;
}

std::vector<double> permutation_pair_weights(const std::vector<Label>& labels, double p,
                                             std::size_t K) {
  const std::size_t T = labels.size();
  return permutation_pair_weights(labels, std::vector<double>(T * T, p), K);
}

std::vector<double> omega_multiplex_pairwise(const std::vector<double>& theta_in,
                                             const std::vector<double>& theta_out,
                                             const std::vector<double>& p_pair,
                                             const std::vector<std::size_t>& K_layer,
                                             const std::vector<double>& q_weights,
                                             double omega_max) {
  const std::size_t T = theta_in.size();
  if (T > 8) throw UnsupportedError("pairwise multiplex coupling supports T <= 8");
  if (p_pair.size() != T * T) throw ValidationError("p_pair must be T x T");
  if (!q_weights.empty() && q_weights.size() != T * T)
    throw ValidationError("q-weights must be T x T");
  double Lbar = mean_log_ratio(theta_in, theta_out);
  if (!(Lbar > 0.0)) throw NumericalError("mean log(theta_in/theta_out) must be positive");
  std::vector<double> W(T * T, 0.0);
  for (std::size_t s = 0; s < T; ++s)
    for (std::size_t t = 0; t < T; ++t) {
      if (s == t) continue;
      double p = p_pair[s * T + t];
      check_p(p);
      if (p == 0.0) continue;
      double q = q_weights.empty() ? 1.0 / static_cast<double>(T) : q_weights[s * T + t];
      double coef = p == 1.0 ? omega_max : std::min(omega_max, copy_log_term(p, pick_K(K_layer, t)) / Lbar);
      W[s * T + t] = coef * q;
    }
  return W;
}

}  // namespace mlmod
