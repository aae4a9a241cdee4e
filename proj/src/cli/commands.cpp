#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <thread>

#include "CLI11.hpp"
#include "internal.hpp"
#include "mlmod/cli.hpp"
#include "mlmod/errors.hpp"
#include "mlmod/estimator.hpp"
#include "mlmod/evaluation.hpp"
#include "mlmod/itermodmax.hpp"
#include "mlmod/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mlmod::cli {

namespace {

// Bad flag combinations that CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TopoOpts {
  bool temporal = false, multiplex = false, multilevel = false;
  std::string parents;
  std::vector<std::size_t> sizes;  // generate only: balanced tree
  bool directed = false;

  TopologyKind kind() const {
    if (multiplex) return TopologyKind::MultiplexAllPairs;
    if (multilevel) return TopologyKind::MultilevelTree;
    return TopologyKind::TemporalChain;
  }
};

void add_topology(CLI::App* sc, TopoOpts& o, bool generator = false) {
  auto* ft = sc->add_flag("--temporal", o.temporal, "Ordered chain of layers (default)");
  auto* fm = sc->add_flag("--multiplex", o.multiplex, "All layer pairs coupled");
  auto* fl = sc->add_flag("--multilevel", o.multilevel, "Tree of layers, needs --parents");
  auto* fp = sc->add_option("--parents", o.parents, "Parent map file (t i parent)");
  ft->excludes(fm)->excludes(fl);
  fm->excludes(fl);
  fp->excludes(ft)->excludes(fm);
  if (generator) {
    auto* fs_ = sc->add_option("--sizes", o.sizes, "Layer sizes of a balanced tree")->delimiter(',');
    fs_->excludes(ft)->excludes(fm)->excludes(fp);
  }
  sc->add_flag("--directed", o.directed, "Directed intralayer edges");
}

void check_topology(const TopoOpts& o, bool generator = false) {
  bool has_tree = !o.parents.empty() || (generator && !o.sizes.empty());
  if (o.multilevel && !has_tree)
    throw UsageError(generator ? "--multilevel needs --parents or --sizes" : "--multilevel needs --parents");
  if (!o.multilevel && has_tree) throw UsageError("--parents is only valid with --multilevel");
}

// Rebuilds the network on the parent maps' layer sizes. A network file with a
// single #nodes header pads every layer to the largest one.
MultilayerNetwork reshape(const MultilayerNetwork& net, const std::vector<std::size_t>& sizes) {
  if (net.num_layers() != sizes.size())
    throw ValidationError("network has " + std::to_string(net.num_layers()) +
                          " layers, parent maps describe " + std::to_string(sizes.size()));
  if (net.layer_sizes() == sizes) return net;
  std::vector<std::vector<Edge>> edges(sizes.size());
  for (std::size_t t = 0; t < sizes.size(); ++t) edges[t] = net.edges(t);
  return MultilayerNetwork(sizes, edges, net.directed());
}

struct Input {
  MultilayerNetwork net;
  InterlayerTopology topo;
};

Input load_input(const std::string& path, const TopoOpts& o, Manifest& m) {
  check_topology(o);
  m.input(path);
  Input in;
  in.net = load_network(path, o.directed);
  switch (o.kind()) {
    case TopologyKind::TemporalChain: in.topo = InterlayerTopology::temporal(); break;
    case TopologyKind::MultiplexAllPairs: in.topo = InterlayerTopology::multiplex(); break;
    case TopologyKind::MultilevelTree: {
      m.input(o.parents);
      auto pm = load_parent_maps(o.parents);
      if (pm.sizes.empty()) throw ValidationError("parent map file is empty");
      if (pm.sizes[0] == 0) {
        std::size_t top = 0;
        if (pm.parents.size() > 1)
          for (auto p : pm.parents[1]) top = std::max<std::size_t>(top, p + 1);
        pm.sizes[0] = top;
      }
      in.net = reshape(in.net, pm.sizes);
      in.topo = InterlayerTopology::multilevel(std::move(pm.parents));
      break;
    }
  }
  in.topo.validate(in.net);
  return in;
}

json topo_json(const TopoOpts& o) {
  return {{"topology", to_string(o.kind())}, {"parents", o.parents}, {"directed", o.directed}};
}

MovePolicy parse_policy(const std::string& s) {
  return s == "random" ? MovePolicy::WeightedRandomMove : MovePolicy::BestMove;
}

NmiNorm parse_norm(const std::string& s) {
  return s == "joint" ? NmiNorm::JointEntropy : NmiNorm::MeanEntropy;
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create " + dir + ": " + ec.message());
}

json layer_counts(const Partition& p) {
  auto k = estimate_K_per_layer(p);
  return json(k);
}

json step_json(const IterStep& s) {
  return {{"iteration", s.iteration},
          {"gamma", s.gamma},
          {"omega", s.omega},
          {"beta", s.beta},
          {"Q", s.Q},
          {"K", s.K},
          {"K_layers", s.K_layers},
          {"p", s.p},
          {"p_layers", s.p_layers},
          {"theta_in", s.theta_in},
          {"theta_out", s.theta_out},
          {"theta_in_layers", s.theta_in_layers},
          {"theta_out_layers", s.theta_out_layers},
          {"theta_clamped", s.theta_clamped},
          {"gamma_next", s.gamma_next},
          {"omega_next", s.omega_next},
          {"beta_next", s.beta_next},
          {"k_max_triggered", s.k_max_triggered}};
}

std::vector<double> grid(const std::vector<double>& spec, const std::vector<double>& list,
                         const char* name) {
  if (!list.empty()) return list;
  if (spec.size() != 3) throw UsageError(std::string("--") + name + "-grid takes lo,hi,n");
  double lo = spec[0], hi = spec[1];
  auto n = static_cast<long>(spec[2]);
  if (n < 1 || static_cast<double>(n) != spec[2]) throw UsageError(std::string(name) + " grid count must be a positive integer");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) g[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return g;
}

// ---- option bundles ----

struct DetectOpts {
  std::string network, out, init, reference, policy = "best";
  TopoOpts topo;
  double gamma = 1.0, omega = 1.0;
  std::vector<double> gamma_layers, omega_layers, beta_layers;
  std::uint64_t seed = 0;
  bool postprocess = false;
};

struct IterOpts {
  std::string network, out, reference, policy = "best";
  TopoOpts topo;
  double gamma0 = 1.0, omega0 = 1.0;
  std::vector<double> gamma0_layers, omega0_layers;
  int max_iters = 30;
  double tol = 1e-3;
  std::size_t kmax = 0;
  double shrink = 0.8, omega_max = kDefaultOmegaMax;
  int trials = 1;
  bool layer_dependent = false, fix_gamma = false, postprocess = false, warm_start = false;
  std::uint64_t seed = 0;
};

struct MultiOpts {
  IterOpts it;
  std::size_t runs = 10;
  std::vector<double> gamma_range{0.0, 5.0}, omega_range{0.0, 1.0};
  unsigned threads = 1;
  std::string norm = "mean";
  double consensus = -1.0;
};

struct GenOpts {
  TopoOpts topo;
  bool toy_merge = false;
  std::size_t N = 0, T = 1, K = 2;
  std::vector<double> eta{0.0};
  double c = -1.0, eps = -1.0, p_in = -1.0, p_out = -1.0;
  std::vector<std::size_t> change_layers;
  std::uint64_t seed = 0;
  std::string out;
};

struct EvalOpts {
  std::string a, b, metadata, out, norm = "both", layer_mode = "both";
  std::vector<std::string> bin;
  double bin_width = 5.0;
};

struct SweepOpts {
  std::string network, out, reference, policy = "best";
  TopoOpts topo;
  std::vector<double> gamma_grid, omega_grid, gammas, omegas;
  int trials = 1;
  bool no_nmi = false;
  double omega_max = kDefaultOmegaMax;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct QOpts {
  std::vector<double> p{0.5, 0.7, 0.9};
  std::vector<std::size_t> T{3, 4, 5, 6, 7};
  std::size_t K = 5, trials = 50;
  std::uint64_t seed = 0;
  std::string out;
};

struct ReplayOpts {
  std::string manifest, out;
};

// ---- commands ----

int cmd_detect(const DetectOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  Manifest m("detect", argv);
  auto in = load_input(o.network, o.topo, m);
  const std::size_t T = in.net.num_layers();
  auto params = ModularityParams::uniform(T, o.gamma, o.omega, in.net.directed());
  if (!o.gamma_layers.empty()) params.gamma = o.gamma_layers;
  if (!o.beta_layers.empty()) params.beta = o.beta_layers;
  if (!o.omega_layers.empty())
    params.coupling = in.topo.kind == TopologyKind::MultiplexAllPairs
                          ? Coupling::per_pair(o.omega_layers, T)
                          : Coupling::per_layer(o.omega_layers);
  OptimizerConfig cfg;
  cfg.move_policy = parse_policy(o.policy);
  cfg.rng_seed = o.seed;
  cfg.postprocess_persistence = o.postprocess;

  std::optional<Partition> init;
  if (!o.init.empty()) {
    m.input(o.init);
    init = load_partition(o.init, in.net.layer_sizes());
  }
  std::optional<Partition> ref;
  if (!o.reference.empty()) {
    m.input(o.reference);
    ref = load_partition(o.reference, in.net.layer_sizes());
  }
  auto r = maximize(in.net, in.topo, params, cfg, init);

  make_dir(o.out);
  save_partition(r.partition, out_path(o.out, "partition.txt"));
  json s = {{"Q", r.Q},
            {"passes", r.passes},
            {"K", estimate_K(r.partition)},
            {"K_layers", layer_counts(r.partition)}};
  if (ref) {
    s["nmi_layers"] = layer_nmis(r.partition, *ref);
    s["nmi_avg"] = layer_avg_nmi(r.partition, *ref);
  }
  write_json(out_path(o.out, "summary.json"), s);

  m.seed(o.seed);
  m.param("network", o.network);
  m.param("topology", topo_json(o.topo));
  m.param("gamma", params.gamma);
  m.param("beta", params.beta);
  m.param("omega", o.omega);
  m.param("omega_layers", o.omega_layers);
  m.param("policy", o.policy);
  m.param("postprocess", o.postprocess);
  m.param("init", o.init);
  m.param("reference", o.reference);
  m.write(o.out);
  out << "Q " << fmt(r.Q) << "  K " << estimate_K(r.partition) << "\n";
  return kOk;
}

IterConfig iter_config(const IterOpts& o) {
  IterConfig c;
  c.gamma0 = o.gamma0;
  c.omega0 = o.omega0;
  c.gamma0_layers = o.gamma0_layers;
  c.omega0_layers = o.omega0_layers;
  c.max_iters = o.max_iters;
  c.tol = o.tol;
  if (o.kmax > 0) c.k_max = o.kmax;
  c.gamma_shrink = o.shrink;
  c.fix_gamma = o.fix_gamma;
  c.omega_max = o.omega_max;
  c.trials_per_iter = o.trials;
  c.warm_start = o.warm_start;
  c.optimizer.move_policy = parse_policy(o.policy);
  c.optimizer.rng_seed = o.seed;
  c.optimizer.postprocess_persistence = o.postprocess;
  return c;
}

void iter_params(Manifest& m, const IterOpts& o) {
  m.seed(o.seed);
  m.param("network", o.network);
  m.param("topology", topo_json(o.topo));
  m.param("gamma0", o.gamma0);
  m.param("omega0", o.omega0);
  m.param("gamma0_layers", o.gamma0_layers);
  m.param("omega0_layers", o.omega0_layers);
  m.param("max_iters", o.max_iters);
  m.param("tol", o.tol);
  m.param("kmax", o.kmax);
  m.param("gamma_shrink", o.shrink);
  m.param("omega_max", o.omega_max);
  m.param("trials", o.trials);
  m.param("warm_start", o.warm_start);
  m.param("layer_dependent", o.layer_dependent);
  m.param("fix_gamma", o.fix_gamma);
  m.param("policy", o.policy);
  m.param("postprocess", o.postprocess);
  m.param("reference", o.reference);
}

void check_layer_dependent(const IterOpts& o) {
  if (o.layer_dependent && o.topo.multiplex)
    throw UsageError("--layer-dependent is not available with --multiplex");
  if (o.fix_gamma && !o.layer_dependent) throw UsageError("--fix-gamma needs --layer-dependent");
}

int cmd_iterate(const IterOpts& o, const std::vector<std::string>& argv, std::ostream& out,
                std::ostream& err) {
  check_layer_dependent(o);
  Manifest m("iterate", argv);
  auto in = load_input(o.network, o.topo, m);
  std::optional<Partition> ref;
  if (!o.reference.empty()) {
    m.input(o.reference);
    ref = load_partition(o.reference, in.net.layer_sizes());
  }
  auto cfg = iter_config(o);
  auto res = o.layer_dependent ? iterate_layer_dependent(in.net, in.topo, cfg)
                               : iterate(in.net, in.topo, cfg);

  make_dir(o.out);
  std::string traj;
  for (const auto& s : res.trajectory) traj += step_json(s).dump() + "\n";
  write_text_file(out_path(o.out, "trajectory.jsonl"), traj);
  const Partition& part = res.output_partition();
  if (part.size() > 0) save_partition(part, out_path(o.out, "partition.txt"));
  if (res.best_partition.size() > 0) save_partition(res.best_partition, out_path(o.out, "best_partition.txt"));
  if (res.final_partition.size() > 0) save_partition(res.final_partition, out_path(o.out, "final_partition.txt"));
  json s = {{"status", to_string(res.status)},
            {"converged", res.converged},
            {"layer_dependent", res.layer_dependent},
            {"topology", to_string(res.kind)},
            {"iterations", res.iterations},
            {"gamma", res.gamma},
            {"omega", res.omega},
            {"omega_symmetric", res.omega_symmetric},
            {"gamma_layers", res.gamma_layers},
            {"omega_layers", res.omega_layers},
            {"beta_layers", res.beta_layers},
            {"best_Q", res.best_Q},
            {"best_iteration", res.best_iteration},
            {"final_Q", res.final_Q},
            {"diagnostic", res.diagnostic}};
  if (part.size() > 0) {
    s["K"] = estimate_K(part);
    s["K_layers"] = layer_counts(part);
    if (ref) {
      s["nmi_layers"] = layer_nmis(part, *ref);
      s["nmi_avg"] = layer_avg_nmi(part, *ref);
    }
  }
  write_json(out_path(o.out, "summary.json"), s);
  iter_params(m, o);
  m.write(o.out);

  out << to_string(res.status) << " after " << res.iterations << " iterations: gamma "
      << fmt(res.gamma) << " omega " << fmt(res.omega) << "\n";
  if (res.status == IterStatus::Degenerate) {
    err << "degenerate: " << res.diagnostic << "\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_multirun(const MultiOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  check_layer_dependent(o.it);
  if (o.gamma_range.size() != 2 || o.omega_range.size() != 2)
    throw UsageError("ranges take two values lo,hi");
  if (o.runs < 1) throw UsageError("--runs must be >= 1");
  Manifest m("multirun", argv);
  auto in = load_input(o.it.network, o.it.topo, m);
  MultiRunConfig cfg;
  cfg.n_runs = o.runs;
  cfg.seed = o.it.seed;
  cfg.gamma_lo = o.gamma_range[0];
  cfg.gamma_hi = o.gamma_range[1];
  cfg.omega_lo = o.omega_range[0];
  cfg.omega_hi = o.omega_range[1];
  cfg.layer_dependent = o.it.layer_dependent;
  cfg.threads = std::max(1u, o.threads);
  cfg.norm = parse_norm(o.norm);
  cfg.base = iter_config(o.it);
  auto res = multi_run(in.net, in.topo, cfg);

  make_dir(o.it.out);
  make_dir(out_path(o.it.out, "partitions"));
  Csv runs({"run", "gamma0", "omega0", "gamma", "omega", "status", "converged", "iterations",
            "best_Q", "final_Q", "K", "p"});
  for (const auto& r : res.runs) {
    runs << r.run << r.gamma0 << r.omega0 << r.gamma << r.omega << to_string(r.status)
         << (r.converged ? 1 : 0) << r.iterations << r.best_Q << r.final_Q << r.K << r.p;
    runs.end_row();
  }
  runs.save(out_path(o.it.out, "runs.csv"));
  std::vector<std::string> hdr{"run"};
  for (std::size_t k = 0; k < o.runs; ++k) hdr.push_back(std::to_string(k));
  Csv mat(hdr);
  for (std::size_t r = 0; r < o.runs; ++r) {
    mat << r;
    for (std::size_t c = 0; c < o.runs; ++c) mat << res.nmi_matrix[r * o.runs + c];
    mat.end_row();
  }
  mat.save(out_path(o.it.out, "nmi_matrix.csv"));
  for (std::size_t r = 0; r < o.runs; ++r) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%03zu.txt", r);
    if (res.partitions[r].size() > 0)
      save_partition(res.partitions[r], out_path(out_path(o.it.out, "partitions"), name));
  }
  if (o.consensus >= 0.0) {
    std::vector<Partition> parts;
    for (const auto& p : res.partitions)
      if (p.size() > 0) parts.push_back(p);
    if (parts.size() >= 2) {
      ConsensusOptions co;
      co.threshold = o.consensus;
      co.coupling = in.topo.kind;
      co.parents = in.topo.parents;
      OptimizerConfig oc = cfg.base.optimizer;
      auto cr = consensus_partition(parts, co, oc);
      save_partition(cr.partition, out_path(o.it.out, "consensus.txt"));
      out << "consensus: " << estimate_K(cr.partition) << " communities after " << cr.rounds
          << " rounds" << (cr.stable ? "" : " (not stable)") << "\n";
    }
  }
  iter_params(m, o.it);
  m.param("runs", o.runs);
  m.param("gamma_range", o.gamma_range);
  m.param("omega_range", o.omega_range);
  m.param("norm", o.norm);
  m.param("consensus", o.consensus);
  m.write(o.it.out);
  std::size_t conv = 0;
  for (const auto& r : res.runs) conv += r.converged;
  out << conv << " of " << o.runs << " runs converged\n";
  return kOk;
}

int cmd_generate(const GenOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  Manifest m("generate", argv);
  Benchmark b;
  bool tree = false;
  if (o.toy_merge) {
    b = toy_merge_network(o.seed);
  } else {
    check_topology(o.topo, true);
    const bool have_c = o.c >= 0.0 || o.eps >= 0.0;
    const bool have_p = o.p_in >= 0.0 || o.p_out >= 0.0;
    if (have_c == have_p) throw UsageError("give either --c and --eps or --p-in and --p-out");
    EdgeModel em = have_c ? EdgeModel::mean_degree(o.c, o.eps) : EdgeModel::probabilities(o.p_in, o.p_out);
    if (have_c && (o.c < 0.0 || o.eps < 0.0)) throw UsageError("--c and --eps go together");
    if (have_p && (o.p_in < 0.0 || o.p_out < 0.0)) throw UsageError("--p-in and --p-out go together");
    if (!o.change_layers.empty()) {
      if (o.topo.kind() != TopologyKind::TemporalChain) throw UsageError("--change-layers is temporal only");
      if (o.eta.size() != 1) throw UsageError("--change-layers takes a single --eta");
      std::vector<std::size_t> cl;
      for (auto t : o.change_layers) {
        if (t < 2 || t > o.T) throw ValidationError("change layers must lie in 2..T");
        cl.push_back(t - 1);
      }
      b = change_point_network(o.N, o.T, o.K, o.eta[0], cl, em, o.seed);
    } else {
      GeneratorConfig g;
      g.N = o.N;
      g.T = o.T;
      g.K = o.K;
      g.eta = o.eta;
      g.edges = em;
      g.kind = o.topo.kind();
      g.seed = o.seed;
      g.directed = o.topo.directed;
      InterlayerTopology topo = InterlayerTopology::temporal();
      if (o.topo.multiplex) topo = InterlayerTopology::multiplex();
      if (o.topo.multilevel) {
        tree = true;
        if (!o.topo.parents.empty()) {
          m.input(o.topo.parents);
          auto pm = load_parent_maps(o.topo.parents);
          if (pm.sizes[0] == 0) pm.sizes[0] = o.N;
          if (pm.sizes.size() != o.T) throw ValidationError("parent maps and --T disagree");
          if (pm.sizes[0] != o.N) throw ValidationError("top layer of the parent maps has a different size than --N");
          topo = InterlayerTopology::multilevel(std::move(pm.parents));
        } else {
          if (o.topo.sizes.size() != o.T) throw ValidationError("--sizes needs T values");
          if (o.topo.sizes[0] != o.N) throw ValidationError("--sizes must start with --N");
          topo = InterlayerTopology::multilevel(balanced_tree_parents(o.topo.sizes));
        }
      }
      b = generate_benchmark(g, topo);
    }
  }
  make_dir(o.out);
  save_network(b.network, out_path(o.out, "network.txt"));
  save_partition(b.planted, out_path(o.out, "planted.txt"));
  if (tree) save_parent_maps(b.topology.parents, b.network.layer_sizes(), out_path(o.out, "parents.txt"));
  m.seed(o.seed);
  m.param("toy_merge", o.toy_merge);
  m.param("topology", topo_json(o.topo));
  m.param("sizes", o.topo.sizes);
  m.param("N", o.N);
  m.param("T", o.T);
  m.param("K", o.K);
  m.param("eta", o.eta);
  m.param("c", o.c);
  m.param("eps", o.eps);
  m.param("p_in", o.p_in);
  m.param("p_out", o.p_out);
  m.param("change_layers", o.change_layers);
  m.write(o.out);
  double edges = 0.0;
  for (std::size_t t = 0; t < b.network.num_layers(); ++t) edges += b.network.edge_count(t);
  out << "wrote " << b.network.num_layers() << " layers, " << edges << " edges\n";
  return kOk;
}

int cmd_evaluate(const EvalOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  if (o.b.empty() == o.metadata.empty()) throw UsageError("give exactly one of --b and --metadata");
  Manifest m("evaluate", argv);
  m.input(o.a);
  auto a = load_partition(o.a);
  std::vector<NmiNorm> norms;
  if (o.norm != "joint") norms.push_back(NmiNorm::MeanEntropy);
  if (o.norm != "mean") norms.push_back(NmiNorm::JointEntropy);
  make_dir(o.out);

  if (!o.b.empty()) {
    m.input(o.b);
    auto b = load_partition(o.b, a.layer_sizes());
    std::vector<std::string> hdr{"layer"};
    for (auto n : norms) hdr.push_back(std::string("nmi_") + (n == NmiNorm::MeanEntropy ? "mean" : "joint"));
    Csv csv(hdr);
    std::vector<std::vector<double>> cols;
    for (auto n : norms) cols.push_back(layer_nmis(a, b, n));
    for (std::size_t t = 0; t < a.num_layers(); ++t) {
      csv << std::to_string(t + 1);
      for (auto& c : cols) csv << c[t];
      csv.end_row();
    }
    csv << "avg";
    for (auto n : norms) csv << layer_avg_nmi(a, b, n);
    csv.end_row();
    csv.save(out_path(o.out, "metrics.csv"));
    out << "layer-averaged NMI " << fmt(layer_avg_nmi(a, b, norms.front())) << "\n";
  } else {
    m.input(o.metadata);
    auto table = load_metadata(o.metadata, o.bin, o.bin_width);
    std::vector<LayerMode> modes;
    if (o.layer_mode != "flatten") modes.push_back(LayerMode::PerLayer);
    if (o.layer_mode != "per-layer") modes.push_back(LayerMode::Flatten);
    Csv csv({"column", "categories", "mode", "norm", "nmi"});
    for (const auto& col : table.columns)
      for (auto mode : modes)
        for (auto n : norms) {
          auto r = metadata_nmi(a, col.codes, mode, n);
          csv << col.name << col.categories.size() << (mode == LayerMode::PerLayer ? "per-layer" : "flatten")
              << to_string(n) << r.value;
          csv.end_row();
        }
    csv.save(out_path(o.out, "metadata_nmi.csv"));
    out << table.columns.size() << " metadata columns evaluated\n";
  }
  m.param("a", o.a);
  m.param("b", o.b);
  m.param("metadata", o.metadata);
  m.param("bin", o.bin);
  m.param("bin_width", o.bin_width);
  m.param("norm", o.norm);
  m.param("layer_mode", o.layer_mode);
  m.write(o.out);
  return kOk;
}

int cmd_sweep(const SweepOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  if (o.reference.empty() && !o.no_nmi) throw UsageError("sweep needs --reference (or --no-nmi)");
  if (o.trials < 1) throw UsageError("--trials must be >= 1");
  auto gammas = grid(o.gamma_grid, o.gammas, "gamma");
  auto omegas = grid(o.omega_grid, o.omegas, "omega");
  Manifest m("sweep", argv);
  auto in = load_input(o.network, o.topo, m);
  std::optional<Partition> ref;
  if (!o.no_nmi) {
    m.input(o.reference);
    ref = load_partition(o.reference, in.net.layer_sizes());
  }
  const std::size_t T = in.net.num_layers();

  struct Cell {
    double nmi = 0.0, Q = 0.0, K = 0.0, gamma_next = 0.0, omega_next = 0.0;
    std::size_t valid = 0;
  };
  const std::size_t n = gammas.size() * omegas.size();
  std::vector<Cell> cells(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c; (c = next++) < n;) {
      try {
        double g = gammas[c / omegas.size()], w = omegas[c % omegas.size()];
        auto params = ModularityParams::uniform(T, g, w, in.net.directed());
        Cell& cell = cells[c];
        for (int k = 0; k < o.trials; ++k) {
          OptimizerConfig oc;
          oc.move_policy = parse_policy(o.policy);
          oc.rng_seed = derive_seed(o.seed, c * 1000 + static_cast<std::size_t>(k));
          auto r = maximize(in.net, in.topo, params, oc);
          cell.Q += r.Q;
          cell.K += static_cast<double>(estimate_K(r.partition));
          if (ref) cell.nmi += layer_avg_nmi(r.partition, *ref);
          try {
            auto up = update_parameters(in.net, in.topo, r.partition, o.omega_max);
            cell.gamma_next += up.gamma;
            cell.omega_next += up.omega;
            ++cell.valid;
          } catch (const NumericalError&) {
          }
        }
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  unsigned threads = std::max(1u, std::min<unsigned>(o.threads, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  make_dir(o.out);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Csv heat({"gamma", "omega", "trials", "mean_nmi", "mean_Q", "mean_K"});
  Csv arrows({"gamma", "omega", "gamma_next", "omega_next", "dgamma", "domega", "valid_trials"});
  for (std::size_t c = 0; c < n; ++c) {
    double g = gammas[c / omegas.size()], w = omegas[c % omegas.size()];
    const Cell& cell = cells[c];
    double tr = o.trials;
    heat << g << w << o.trials << (ref ? cell.nmi / tr : nan) << cell.Q / tr << cell.K / tr;
    heat.end_row();
    double gn = cell.valid ? cell.gamma_next / cell.valid : nan;
    double wn = cell.valid ? cell.omega_next / cell.valid : nan;
    arrows << g << w << gn << wn << gn - g << wn - w << cell.valid;
    arrows.end_row();
  }
  heat.save(out_path(o.out, "heatmap.csv"));
  arrows.save(out_path(o.out, "arrows.csv"));
  m.seed(o.seed);
  m.param("network", o.network);
  m.param("topology", topo_json(o.topo));
  m.param("gammas", gammas);
  m.param("omegas", omegas);
  m.param("trials", o.trials);
  m.param("policy", o.policy);
  m.param("omega_max", o.omega_max);
  m.param("reference", o.reference);
  m.write(o.out);
  out << "swept " << n << " cells\n";
  return kOk;
}

int cmd_qsigma(const QOpts& o, const std::vector<std::string>& argv, std::ostream& out) {
  Manifest m("qsigma", argv);
  Csv csv({"p", "K", "T", "trials", "mean", "std", "stderr"});
  for (double p : o.p)
    for (auto T : o.T) {
      auto s = qsigma_table(p, o.K, T, o.trials, o.seed);
      csv << p << o.K << T << o.trials << s.mean << s.std << s.std / std::sqrt(static_cast<double>(o.trials));
      csv.end_row();
    }
  make_dir(o.out);
  csv.save(out_path(o.out, "qsigma.csv"));
  m.seed(o.seed);
  m.param("p", o.p);
  m.param("K", o.K);
  m.param("T", o.T);
  m.param("trials", o.trials);
  m.write(o.out);
  out << o.p.size() * o.T.size() << " cells written\n";
  return kOk;
}

int cmd_replay(const ReplayOpts& o, std::ostream& out, std::ostream& err) {
  auto j = read_json(o.manifest);
  if (!j.contains("argv") || !j["argv"].is_array()) throw ValidationError("manifest has no argv");
  const json inputs = j.value("inputs", json::object());
  for (const auto& [path, d] : inputs.items()) {
    auto have = sha256_file(path);
    if (have != d.at("sha256").get<std::string>())
      throw ValidationError("input " + path + " changed since the manifest was written");
  }
  auto args = j["argv"].get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "replay") throw ValidationError("manifest records a replay");
  if (!o.out.empty()) {
    bool replaced = false;
    for (std::size_t k = 0; k < args.size(); ++k) {
      if (args[k] == "--out" && k + 1 < args.size()) {
        args[k + 1] = o.out;
        replaced = true;
      } else if (args[k].rfind("--out=", 0) == 0) {
        args[k] = "--out=" + o.out;
        replaced = true;
      }
    }
    if (!replaced) throw ValidationError("manifest argv has no --out");
  }
  return run(args, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilayer modularity and SBM parameter estimation"};
  app.name("mlmod");
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  const std::vector<std::string> policies{"best", "random"};

  DetectOpts det;
  auto* sd = app.add_subcommand("detect", "One modularity maximization at fixed parameters");
  sd->add_option("--network", det.network, "Network file")->required();
  add_topology(sd, det.topo);
  sd->add_option("--gamma", det.gamma, "Resolution for every layer");
  sd->add_option("--omega", det.omega, "Interlayer coupling");
  sd->add_option("--gamma-layers", det.gamma_layers, "Per-layer resolutions (T values)")->delimiter(',');
  sd->add_option("--omega-layers", det.omega_layers,
                 "Per-link couplings: T-1 values for chains, T*T for multiplex")->delimiter(',');
  sd->add_option("--beta-layers", det.beta_layers, "Per-layer weights (T values)")->delimiter(',');
  sd->add_option("--policy", det.policy, "Move policy")->check(CLI::IsMember(policies));
  sd->add_option("--seed", det.seed);
  sd->add_flag("--postprocess", det.postprocess, "Relabel layers to increase persistence");
  sd->add_option("--init", det.init, "Initial partition");
  sd->add_option("--reference", det.reference, "Partition to report NMI against");
  sd->add_option("--out", det.out, "Output directory")->required();

  auto add_iter = [&](CLI::App* sc, IterOpts& o) {
    sc->add_option("--network", o.network, "Network file")->required();
    add_topology(sc, o.topo);
    sc->add_option("--gamma0", o.gamma0);
    sc->add_option("--omega0", o.omega0);
    sc->add_option("--gamma0-layers", o.gamma0_layers)->delimiter(',');
    sc->add_option("--omega0-layers", o.omega0_layers, "T values, the first is ignored")->delimiter(',');
    sc->add_option("--max-iters", o.max_iters);
    sc->add_option("--tol", o.tol);
    sc->add_option("--kmax", o.kmax, "Shrink gamma while more communities than this are found");
    sc->add_option("--gamma-shrink", o.shrink);
    sc->add_option("--omega-max", o.omega_max);
    sc->add_option("--trials", o.trials, "Optimizer restarts per iteration");
    sc->add_flag("--warm-start", o.warm_start, "Also refine the previous iteration's partition");
    sc->add_flag("--layer-dependent", o.layer_dependent);
    sc->add_flag("--fix-gamma", o.fix_gamma, "Keep gamma at its start values");
    sc->add_option("--policy", o.policy)->check(CLI::IsMember(policies));
    sc->add_option("--seed", o.seed);
    sc->add_flag("--postprocess", o.postprocess);
    sc->add_option("--out", o.out, "Output directory")->required();
  };

  IterOpts it;
  auto* si = app.add_subcommand("iterate", "Alternate detection and parameter estimation");
  add_iter(si, it);
  si->add_option("--reference", it.reference, "Partition to report NMI against");

  MultiOpts mr;
  auto* sm = app.add_subcommand("multirun", "Iterate from many random starts");
  add_iter(sm, mr.it);
  sm->add_option("--runs", mr.runs);
  sm->add_option("--gamma-range", mr.gamma_range, "lo,hi")->delimiter(',')->expected(2);
  sm->add_option("--omega-range", mr.omega_range, "lo,hi")->delimiter(',')->expected(2);
  mr.threads = default_thread_count();
  sm->add_option("--threads", mr.threads);
  sm->add_option("--norm", mr.norm)->check(CLI::IsMember({"mean", "joint"}));
  sm->add_option("--consensus", mr.consensus, "Co-classification threshold for a consensus partition");

  GenOpts gen;
  auto* sg = app.add_subcommand("generate", "Sample a benchmark network and its planted partition");
  sg->add_flag("--toy-merge", gen.toy_merge, "Two-layer network where layer 2 merges pairs of groups");
  add_topology(sg, gen.topo, true);
  sg->add_option("--N", gen.N);
  sg->add_option("--T", gen.T);
  sg->add_option("--K", gen.K);
  sg->add_option("--eta", gen.eta, "Copying probability, one value or T values")->delimiter(',');
  sg->add_option("--c", gen.c, "Mean degree");
  sg->add_option("--eps", gen.eps, "p_out / p_in");
  sg->add_option("--p-in", gen.p_in);
  sg->add_option("--p-out", gen.p_out);
  sg->add_option("--change-layers", gen.change_layers, "Layers (1-based) that copy nothing")->delimiter(',');
  sg->add_option("--seed", gen.seed);
  sg->add_option("--out", gen.out, "Output directory")->required();

  EvalOpts ev;
  auto* se = app.add_subcommand("evaluate", "Compare a partition with another or with metadata");
  se->add_option("--a", ev.a, "Partition")->required();
  se->add_option("--b", ev.b, "Second partition");
  se->add_option("--metadata", ev.metadata, "Node metadata CSV");
  se->add_option("--bin", ev.bin, "Numeric metadata columns to bin")->delimiter(',');
  se->add_option("--bin-width", ev.bin_width);
  se->add_option("--norm", ev.norm)->check(CLI::IsMember({"mean", "joint", "both"}));
  se->add_option("--layer-mode", ev.layer_mode)->check(CLI::IsMember({"per-layer", "flatten", "both"}));
  se->add_option("--out", ev.out, "Output directory")->required();

  SweepOpts sw;
  auto* ss = app.add_subcommand("sweep", "NMI heatmap and estimator arrows over a (gamma, omega) grid");
  ss->add_option("--network", sw.network)->required();
  add_topology(ss, sw.topo);
  ss->add_option("--gamma-grid", sw.gamma_grid, "lo,hi,n")->delimiter(',');
  ss->add_option("--omega-grid", sw.omega_grid, "lo,hi,n")->delimiter(',');
  ss->add_option("--gammas", sw.gammas, "Explicit gamma values")->delimiter(',');
  ss->add_option("--omegas", sw.omegas, "Explicit omega values")->delimiter(',');
  ss->add_option("--trials", sw.trials);
  ss->add_option("--reference", sw.reference);
  ss->add_flag("--no-nmi", sw.no_nmi);
  ss->add_option("--omega-max", sw.omega_max);
  ss->add_option("--policy", sw.policy)->check(CLI::IsMember(policies));
  ss->add_option("--seed", sw.seed);
  sw.threads = default_thread_count();
  ss->add_option("--threads", sw.threads);
  ss->add_option("--out", sw.out)->required();

  QOpts q;
  auto* sq = app.add_subcommand("qsigma", "Permutation weight statistics of the copying process");
  sq->add_option("--p", q.p)->delimiter(',');
  sq->add_option("--K", q.K);
  sq->add_option("--T", q.T)->delimiter(',');
  sq->add_option("--trials", q.trials);
  sq->add_option("--seed", q.seed);
  sq->add_option("--out", q.out)->required();

  ReplayOpts rp;
  auto* sr = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  sr->add_option("manifest", rp.manifest)->required();
  sr->add_option("--out", rp.out, "Write to this directory instead");

  std::vector<std::string> argv_store{"mlmod"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (sd->parsed()) return cmd_detect(det, args, out);
    if (si->parsed()) return cmd_iterate(it, args, out, err);
    if (sm->parsed()) return cmd_multirun(mr, args, out);
    if (sg->parsed()) return cmd_generate(gen, args, out);
    if (se->parsed()) return cmd_evaluate(ev, args, out);
    if (ss->parsed()) return cmd_sweep(sw, args, out);
    if (sq->parsed()) return cmd_qsigma(q, args, out);
    if (sr->parsed()) return cmd_replay(rp, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kValidation;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace mlmod::cli
