// Acceptance checks 1-10. One PASS/FAIL line per criterion; exit status 1 if
// any criterion fails. Arguments (optional) select criteria by number.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "mlmod/cli.hpp"
#include "mlmod/estimator.hpp"
#include "mlmod/evaluation.hpp"
#include "mlmod/itermodmax.hpp"
#include "mlmod/synth.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mlmod;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string f3(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3f", x);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path workdir() {
  static fs::path d = [] {
    auto p = fs::temp_directory_path() / ("mlmod_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  if (code != 0) std::cerr << "  [cli exit " << code << "] " << err.str();
  return code;
}

json read_json(const fs::path& p) { return json::parse(read_text_file(p.string())); }

// The reported coupling values quoted by the criteria use the symmetric
// convention, which is half of the coupling used here (see README).
constexpr double kPaperToOurs = 2.0;

// ---- 1 ----------------------------------------------------------------------
Verdict criterion1() {
  int ok = 0;
  double worst_time = 0;
  std::string rows;
  for (int s = 1; s <= 10; ++s) {
    auto dir = workdir() / ("c1_" + std::to_string(s));
    auto seed = std::to_string(s);
    auto t0 = std::chrono::steady_clock::now();
    if (cli({"generate", "--toy-merge", "--seed", seed, "--out", (dir / "g").string()}) != 0) continue;
    int code = cli({"iterate", "--network", (dir / "g/network.txt").string(), "--reference",
                    (dir / "g/planted.txt").string(), "--gamma0", "1", "--omega0", std::to_string(kPaperToOurs),
                    "--policy", "random", "--warm-start", "--seed", seed, "--out", (dir / "it").string()});
    double secs = seconds_since(t0);
    worst_time = std::max(worst_time, secs);
    if (code != 0) continue;
    auto s_ = read_json(dir / "it/summary.json");
    double g = s_["gamma"], w = s_["omega_symmetric"];
    double n1 = s_["nmi_layers"][0], n2 = s_["nmi_layers"][1];
    bool conv = s_["status"] == "converged";
    bool good = conv && g >= 1.45 && g <= 1.75 && w >= 1.10 && w <= 1.50 && n1 >= 0.90 && n2 >= 0.95 &&
                secs < 120;
    ok += good;
    rows += " s" + seed + "(g=" + f3(g) + ",w=" + f3(w) + ",nmi=" + f3(n1) + "/" + f3(n2) +
            (conv ? "" : ",not-converged") + ")";
  }
  return {ok >= 7, std::to_string(ok) + "/10 in window, slowest " + f3(worst_time) + "s;" + rows};
}

// ---- 2 ----------------------------------------------------------------------
Verdict criterion2() {
  double n1 = 0, n2 = 0, k1 = 0;
  std::string rows;
  for (int s = 1; s <= 10; ++s) {
    auto dir = workdir() / ("c2_" + std::to_string(s));
    auto seed = std::to_string(s);
    if (cli({"generate", "--toy-merge", "--seed", seed, "--out", (dir / "g").string()}) != 0) return {false, "generate failed"};
    if (cli({"detect", "--network", (dir / "g/network.txt").string(), "--reference", (dir / "g/planted.txt").string(),
             "--gamma", "1", "--omega", std::to_string(kPaperToOurs), "--policy", "random", "--seed", seed, "--out",
             (dir / "d").string()}) != 0)
      return {false, "detect failed"};
    auto j = read_json(dir / "d/summary.json");
    double a = j["nmi_layers"][0], b = j["nmi_layers"][1];
    double k = j["K_layers"][0];
    n1 += a / 10;
    n2 += b / 10;
    k1 += k / 10;
    rows += " " + f3(a);
  }
  bool pass = n1 >= 0.35 && n1 <= 0.65 && n2 >= 0.9 && k1 >= 8 && k1 <= 12;
  return {pass, "mean layer NMIs " + f3(n1) + " / " + f3(n2) + ", mean K1 " + f3(k1) +
                    " (window [0.35,0.65] / >=0.9 / [8,12]); layer-1 per seed:" + rows};
}

// ---- 3 ----------------------------------------------------------------------
Verdict criterion3() {
  // published sample std, rows p = 0.5, 0.7, 0.9, columns T = 3..7
  const double sd[3][5] = {{0.052, 0.098, 0.090, 0.090, 0.076},
                           {0.068, 0.073, 0.082, 0.096, 0.071},
                           {0.016, 0.048, 0.064, 0.075, 0.051}};
  auto dir = workdir() / "c3";
  auto t0 = std::chrono::steady_clock::now();
  if (cli({"qsigma", "--p", "0.5,0.7,0.9", "--T", "3,4,5,6,7", "--K", "5", "--trials", "50", "--seed", "1", "--out",
           dir.string()}) != 0)
    return {false, "qsigma failed"};
  double per_cell = seconds_since(t0) / 15;
  std::istringstream in(read_text_file((dir / "qsigma.csv").string()));
  std::string line;
  std::getline(in, line);
  int good = 0;
  std::string bad;
  for (int k = 0; k < 15 && std::getline(in, line); ++k) {
    double p, K, T, trials, m, s, se;
    std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &p, &K, &T, &trials, &m, &s, &se);
    int r = k / 5, c = k % 5;
    double ratio = s / sd[r][c];
    bool ok = std::abs(m) <= 0.05 && ratio >= 0.5 && ratio <= 2.0;
    good += ok;
    if (!ok) bad += " (p=" + f3(p) + ",T=" + std::to_string(int(T)) + ": mean " + f3(m) + ", std " + f3(s) +
                    " vs " + f3(sd[r][c]) + ")";
  }
  bool pass = good == 15 && per_cell < 60;
  return {pass, std::to_string(good) + "/15 cells within factor 2 and |mean|<=0.05, " + f3(per_cell) +
                    "s per cell" + (bad.empty() ? "" : "; off:" + bad)};
}

// ---- 4 ----------------------------------------------------------------------
Verdict criterion4() {
  std::vector<std::string> fails;
  const double thetas[][2] = {{2.0, 0.5}, {1.3, 0.9}, {5.0, 0.01}, {1.0001, 1.0}, {1.538, 0.4615}};
  for (auto& th : thetas)
    for (std::size_t K : {1, 2, 5, 20}) {
      if (omega_temporal(th[0], th[1], 0.0, K) != 0.0) fails.push_back("omega(p=0) != 0");
      if (omega_temporal(th[0], th[1], 1.0, K) != 1000.0) fails.push_back("omega(p=1) != 1000");
      double prev = 0;
      for (double p : {0.5, 0.9, 0.99, 1 - 1e-6, 1 - 1e-12, 1 - 1e-15}) {
        double w = omega_temporal(th[0], th[1], p, K);
        if (!(w <= 1000.0) || w < prev) fails.push_back("omega not capped/monotone near p=1");
        prev = w;
      }
      for (std::size_t T : {2, 3, 7, 40})
        for (double p : {0.0, 0.3, 0.7, 0.95}) {
          double a = omega_multiplex_uniform(th[0], th[1], p, K, T);
          double b = omega_temporal(th[0], th[1], p, K) / static_cast<double>(T);
          if (std::abs(a - b) > 1e-15 * std::max(1.0, std::abs(b))) fails.push_back("multiplex != temporal/T");
        }
    }
  for (double th : {1e-3, 0.5, 1.0, 3.7, 250.0}) {
    if (std::abs(gamma_from_theta(th, th) - th) > 1e-9) fails.push_back("gamma(th,th) != th");
    double near = th * (1 + 1e-11);
    if (std::abs(gamma_from_theta(near, th) - th) > 1e-9 * std::max(1.0, th)) fails.push_back("gamma not continuous");
  }
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  double worst = 0;
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t T = 2 + rep % 30;
    std::vector<double> ti(T), to(T);
    for (std::size_t t = 0; t < T; ++t) {
      to[t] = u(rng);
      ti[t] = to[t] * (1.01 + u(rng));
    }
    auto b = beta_weights(ti, to);
    double m = 0;
    for (double x : b) m += x / static_cast<double>(T);
    worst = std::max(worst, std::abs(m - 1));
  }
  if (worst > 1e-12) fails.push_back("beta mean off by " + std::to_string(worst));
  std::set<std::string> uniq(fails.begin(), fails.end());
  std::string d = "all identities hold (beta mean error " + std::to_string(worst) + ")";
  if (!uniq.empty()) {
    d = "";
    for (auto& f : uniq) d += f + "; ";
  }
  return {uniq.empty(), d};
}

// ---- 5 ----------------------------------------------------------------------
Verdict criterion5() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int ok = 0;
  double worst = 0;
  std::size_t enumerated = 0;
  for (int inst = 0; inst < 100; ++inst) {
    bool tree = inst % 4 == 3;
    std::vector<std::size_t> sizes;
    std::vector<std::vector<NodeId>> parents;
    if (tree) {
      sizes = {2, static_cast<std::size_t>(3 + inst % 2), 4};
      parents.assign(3, {});
      for (std::size_t t = 1; t < 3; ++t)
        for (std::size_t i = 0; i < sizes[t]; ++i)
          parents[t].push_back(static_cast<NodeId>(std::uniform_int_distribution<std::size_t>(0, sizes[t - 1] - 1)(rng)));
    } else {
      std::size_t N = 2 + inst % 3, T = 1 + (inst / 3) % 3;
      sizes.assign(T, N);
    }
    std::size_t K = 1 + inst % 3;
    std::vector<std::vector<Edge>> edges;
    double dens = 0.3 + 0.5 * u(rng);
    for (auto n : sizes) edges.push_back(oracle::random_edges(n, dens, rng));
    MultilayerNetwork net(sizes, edges, false);
    auto topo = tree ? InterlayerTopology::multilevel(parents) : InterlayerTopology::temporal();
    auto dense = oracle::dense(sizes, edges, false, tree ? oracle::Coupling::Multilevel : oracle::Coupling::Temporal,
                               parents);
    double to = 0.1 + u(rng), ti = to * (1.2 + 3 * u(rng));
    double p = 0.05 + 0.9 * u(rng);
    double L = std::log(ti) - std::log(to);
    auto prm = ModularityParams::uniform(sizes.size(), gamma_from_theta(ti, to), omega_temporal(ti, to, p, K));

    double qmax = -INFINITY, lmax = -INFINITY, rmin = INFINITY, rmax = -INFINITY;
    std::vector<std::pair<double, double>> vals;
    Partition part(sizes);
    oracle::for_each_labeling(dense.total(), K, [&](const std::vector<Label>& g) {
      std::copy(g.begin(), g.end(), part.flat().begin());
      double q = multilayer_modularity(net, topo, part, prm);
      double l = oracle::log_posterior(dense, g, ti, to, p, K);
      vals.emplace_back(q, l);
      qmax = std::max(qmax, q);
      lmax = std::max(lmax, l);
      rmin = std::min(rmin, l - L * q);
      rmax = std::max(rmax, l - L * q);
    });
    enumerated += vals.size();
    bool same_argmax = true;
    for (auto& [q, l] : vals)
      if ((q >= qmax - 1e-9) != (l >= lmax - 1e-9 * L)) same_argmax = false;
    worst = std::max(worst, rmax - rmin);
    ok += same_argmax && rmax - rmin <= 1e-9;
  }
  return {ok == 100, std::to_string(ok) + "/100 instances, " + std::to_string(enumerated) +
                         " partitions, largest spread of logpost - L*Q " + std::to_string(worst)};
}

// ---- 6 ----------------------------------------------------------------------
Verdict criterion6() {
  const double eps = 0.3, eta = 0.9;
  const double ti = 2 / (1 + eps), to = 2 * eps / (1 + eps);
  int ok = 0;
  double wi = 0, wo = 0, wp = 0;
  for (int s = 1; s <= 20; ++s) {
    GeneratorConfig g;
    g.N = 512;
    g.T = 40;
    g.K = 2;
    g.eta = {eta};
    g.edges = EdgeModel::mean_degree(32, eps);
    g.seed = static_cast<std::uint64_t>(s);
    auto b = generate_benchmark(g);
    auto th = estimate_theta(b.network, b.planted);
    double p = estimate_p_temporal(b.planted, 2);
    double ei = std::abs(th.theta_in / ti - 1), eo = std::abs(th.theta_out / to - 1), ep = std::abs(p - eta);
    wi = std::max(wi, ei);
    wo = std::max(wo, eo);
    wp = std::max(wp, ep);
    ok += ei <= 0.10 && eo <= 0.10 && ep <= 0.03;
  }
  return {ok == 20, std::to_string(ok) + "/20 seeds; worst rel. error theta_in " + f3(wi) + ", theta_out " + f3(wo) +
                        ", worst |p - 0.9| " + f3(wp)};
}

// ---- 7 ----------------------------------------------------------------------
Verdict criterion7() {
  const std::vector<double> etas{0.5, 0.7, 0.9};
  const std::vector<double> grid{0.3, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
  const std::size_t K = 2;
  std::vector<std::vector<double>> nmi_mean(etas.size(), std::vector<double>(grid.size(), 0));
  for (std::size_t a = 0; a < etas.size(); ++a)
    for (std::size_t e = 0; e < grid.size(); ++e)
      for (std::uint64_t s : {1, 2}) {
        GeneratorConfig g;
        g.N = 512;
        g.T = 40;
        g.K = K;
        g.eta = {etas[a]};
        g.edges = EdgeModel::mean_degree(32, grid[e]);
        g.seed = s;
        auto b = generate_benchmark(g);
        double eps = grid[e];
        double ti = K / (1 + eps * (K - 1)), to = eps * ti;
        auto prm = ModularityParams::uniform(40, gamma_from_theta(ti, to), omega_temporal(ti, to, etas[a], K));
        OptimizerConfig oc;
        oc.move_policy = MovePolicy::WeightedRandomMove;
        oc.rng_seed = s;
        auto r = maximize(b.network, b.topology, prm, oc);
        nmi_mean[a][e] += layer_avg_nmi(r.partition, b.planted) / 2;
      }
  // first eps at which the mean NMI falls below 0.5, linearly interpolated
  auto crossover = [&](std::size_t a) {
    for (std::size_t e = 1; e < grid.size(); ++e)
      if (nmi_mean[a][e] < 0.5) {
        double y0 = nmi_mean[a][e - 1], y1 = nmi_mean[a][e];
        if (y0 < 0.5) return grid[e - 1];
        return grid[e - 1] + (y0 - 0.5) / (y0 - y1) * (grid[e] - grid[e - 1]);
      }
    return grid.back();
  };
  std::vector<double> cross;
  for (std::size_t a = 0; a < etas.size(); ++a) cross.push_back(crossover(a));
  double hi = nmi_mean[2][0], lo = nmi_mean[2].back();
  bool mono = std::is_sorted(cross.begin(), cross.end()) && cross.back() > cross.front();
  std::string curves;
  for (std::size_t a = 0; a < etas.size(); ++a) {
    curves += " eta=" + f3(etas[a]) + ":";
    for (double v : nmi_mean[a]) curves += " " + f3(v);
  }
  return {hi >= 0.95 && lo <= 0.1 && mono,
          "eta=0.9 NMI " + f3(hi) + " at eps=0.3, " + f3(lo) + " at eps=0.95; crossovers " + f3(cross[0]) + " " +
              f3(cross[1]) + " " + f3(cross[2]) + ";" + curves};
}

// ---- 8 ----------------------------------------------------------------------
Verdict criterion8() {
  // mu = 0.4 analogue for K = 5: eps = mu / ((1 - mu) K + mu)
  const double mu = 0.4;
  const std::size_t K = 5;
  const double eps = mu / ((1 - mu) * K + mu);
  const std::vector<std::size_t> cps{24, 49, 74};  // layers 25, 50, 75 counted from 1
  int ok = 0;
  std::string rows;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    auto b = change_point_network(150, 100, K, 0.9, cps, EdgeModel::mean_degree(10, eps), s);
    IterConfig cfg;
    cfg.fix_gamma = true;
    cfg.gamma0 = 1.0;
    cfg.omega0 = kPaperToOurs;
    cfg.optimizer.move_policy = MovePolicy::WeightedRandomMove;
    cfg.optimizer.rng_seed = s;
    auto r = iterate_layer_dependent(b.network, b.topology, cfg);
    if (r.trajectory.empty() || r.trajectory[0].omega_next.size() != 100) {
      rows += " s" + std::to_string(s) + "(no first update)";
      continue;
    }
    std::vector<double> w;
    for (double x : r.trajectory[0].omega_next) w.push_back(x / kPaperToOurs);
    double cmax = 0;
    std::vector<double> rest;
    for (std::size_t t = 1; t < 100; ++t) {
      if (std::find(cps.begin(), cps.end(), t) != cps.end())
        cmax = std::max(cmax, w[t]);
      else
        rest.push_back(w[t]);
    }
    std::nth_element(rest.begin(), rest.begin() + rest.size() / 2, rest.end());
    double med = rest[rest.size() / 2];
    double final_nmi = layer_avg_nmi(r.output_partition(), b.planted);
    bool good = cmax < 0.1 && med > 0.5 && final_nmi >= 0.90;
    ok += good;
    rows += " s" + std::to_string(s) + "(cp " + f3(w[24]) + "," + f3(w[49]) + "," + f3(w[74]) + " median " + f3(med) +
            " nmi " + f3(final_nmi) + (good ? "" : " x") + ")";
  }
  return {ok >= 3, std::to_string(ok) + "/5 seeds meet all three conditions (majority needed);" + rows};
}

// ---- 9 ----------------------------------------------------------------------
struct Fixture {
  std::string name;
  std::vector<std::size_t> sizes;
  std::vector<std::vector<Edge>> edges;
  bool directed = false;
  TopologyKind kind = TopologyKind::TemporalChain;
  std::vector<std::vector<NodeId>> parents;
  double gamma = 1.0, omega = 0.0;
};

std::vector<Fixture> fixtures() {
  auto clique = [](NodeId a, NodeId b) {
    std::vector<Edge> e;
    for (NodeId i = a; i < b; ++i)
      for (NodeId j = i + 1; j < b; ++j) e.push_back({i, j});
    return e;
  };
  auto cat = [](std::vector<Edge> a, const std::vector<Edge>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  std::vector<Fixture> fx;
  fx.push_back({"bridged 4-cliques", {8}, {cat(cat(clique(0, 4), clique(4, 8)), {{3, 4}})}});
  std::vector<Edge> ring, star;
  for (NodeId i = 0; i < 8; ++i) ring.push_back({i, static_cast<NodeId>((i + 1) % 8)});
  for (NodeId i = 1; i < 8; ++i) star.push_back({0, i});
  fx.push_back({"ring", {8}, {ring}});
  fx.push_back({"star", {8}, {star}});
  std::mt19937_64 rng(9);
  fx.push_back({"random 8 sparse", {8}, {oracle::random_edges(8, 0.35, rng)}});
  fx.push_back({"random 8 dense", {8}, {oracle::random_edges(8, 0.5, rng)}});
  fx.push_back({"random 8 low resolution", {8}, {oracle::random_edges(8, 0.4, rng)}, false,
                TopologyKind::TemporalChain, {}, 0.5});
  fx.push_back({"self-loops", {7}, {cat(cat(clique(0, 3), clique(3, 7)), {{0, 0}, {5, 5}, {2, 3}})}});
  fx.push_back({"directed 8", {8}, {oracle::random_edges(8, 0.25, rng, true)}, true});
  fx.push_back({"temporal shifted triangles", {6, 6}, {cat(clique(0, 3), clique(3, 6)),
                                                       {{1, 2}, {2, 3}, {1, 3}, {4, 5}, {5, 0}, {4, 0}}},
                false, TopologyKind::TemporalChain, {}, 1.0, 0.5});
  fx.push_back({"temporal random", {6, 6}, {oracle::random_edges(6, 0.5, rng), oracle::random_edges(6, 0.5, rng)},
                false, TopologyKind::TemporalChain, {}, 1.0, 1.0});
  fx.push_back({"temporal empty second layer", {6, 6}, {oracle::random_edges(6, 0.5, rng), {}}, false,
                TopologyKind::TemporalChain, {}, 1.0, 0.4});
  fx.push_back({"multiplex random", {6, 6}, {oracle::random_edges(6, 0.5, rng), oracle::random_edges(6, 0.5, rng)},
                false, TopologyKind::MultiplexAllPairs, {}, 1.0, 0.3});
  fx.push_back({"directed temporal", {5, 5},
                {oracle::random_edges(5, 0.35, rng, true), oracle::random_edges(5, 0.35, rng, true)}, true,
                TopologyKind::TemporalChain, {}, 1.0, 0.6});
  fx.push_back({"multilevel 3 -> 6", {3, 6}, {oracle::random_edges(3, 0.7, rng), oracle::random_edges(6, 0.5, rng)},
                false, TopologyKind::MultilevelTree, {{}, {0, 0, 1, 1, 2, 2}}, 1.0, 0.8});
  return fx;
}

Verdict criterion9() {
  int good = 0, total = 0;
  std::string rows;
  for (const auto& f : fixtures()) {
    ++total;
    MultilayerNetwork net(f.sizes, f.edges, f.directed);
    InterlayerTopology topo{f.kind, f.parents};
    auto ok = oracle::Coupling::Temporal;
    if (f.kind == TopologyKind::MultiplexAllPairs) ok = oracle::Coupling::Multiplex;
    if (f.kind == TopologyKind::MultilevelTree) ok = oracle::Coupling::Multilevel;
    auto d = oracle::dense(f.sizes, f.edges, f.directed, ok, f.parents);
    oracle::Modularity q(d, std::vector<double>(f.sizes.size(), f.gamma), f.omega);
    double best = oracle::brute_max(q, d.total(), d.total());
    auto prm = ModularityParams::uniform(f.sizes.size(), f.gamma, f.omega, f.directed);
    int hit = 0, hit_random = 0;
    double worst = best;
    for (std::uint64_t s = 0; s < 20; ++s) {
      OptimizerConfig c;
      c.rng_seed = s;
      double found = maximize(net, topo, prm, c).Q;
      worst = std::min(worst, found);
      hit += found >= best - 1e-9;
      c.move_policy = MovePolicy::WeightedRandomMove;
      hit_random += maximize(net, topo, prm, c).Q >= best - 1e-9;
    }
    good += hit >= 19;
    rows += " [" + f.name + ": " + std::to_string(hit) + "/20, random policy " + std::to_string(hit_random) +
            "/20, max " + f3(best) + " worst " + f3(worst) + "]";
  }
  return {good == total, std::to_string(good) + "/" + std::to_string(total) + " fixtures reach the exhaustive maximum in >= 19/20 restarts;" + rows};
}

// ---- 10 ---------------------------------------------------------------------
Verdict criterion10() {
  std::string cmd = std::string(MLMOD_PROPERTIES_BIN) + " > " + (workdir() / "properties.log").string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  auto log = read_text_file((workdir() / "properties.log").string());
  auto pos = log.find("[doctest] test cases:");
  std::string summary = pos == std::string::npos ? "no summary" : log.substr(pos, log.find('\n', pos) - pos);
  return {rc == 0, summary};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::function<Verdict()>> checks{criterion1, criterion2, criterion3, criterion4, criterion5,
                                               criterion6, criterion7, criterion8, criterion9, criterion10};
  std::set<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.insert(std::atoi(argv[k]));
  int failed = 0;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    int id = static_cast<int>(k) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = checks[k]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "CRITERION " << id << (v.pass ? " PASS" : " FAIL") << " (" << f3(seconds_since(t0)) << "s): "
              << v.detail << std::endl;
    failed += !v.pass;
  }
  fs::remove_all(workdir());
  return failed == 0 ? 0 : 1;
}
