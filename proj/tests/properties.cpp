// Property suites: run as a standalone binary, generated inputs only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "mlmod/estimator.hpp"
#include "mlmod/evaluation.hpp"
#include "mlmod/quality.hpp"
#include "mlmod/synth.hpp"

using namespace mlmod;

namespace {

std::vector<Label> random_labels(std::size_t n, Label K, std::mt19937_64& rng) {
  std::uniform_int_distribution<Label> d(0, K - 1);
  std::vector<Label> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_SUITE("nmi axioms") {
  TEST_CASE("symmetric, bounded, one on identical labelings") {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 200; ++rep) {
      std::size_t n = 2 + rep % 50;
      auto a = random_labels(n, 1 + rep % 6, rng);
      auto b = random_labels(n, 1 + (rep / 6) % 6, rng);
      for (auto norm : {NmiNorm::MeanEntropy, NmiNorm::JointEntropy}) {
        double ab = nmi(a, b, norm), ba = nmi(b, a, norm);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ab >= -1e-12);
        CHECK(ab <= 1 + 1e-12);
        CHECK(nmi(a, a, norm) == doctest::Approx(1.0));
      }
      // joint normalization never exceeds mean normalization
      CHECK(nmi(a, b, NmiNorm::JointEntropy) <= nmi(a, b, NmiNorm::MeanEntropy) + 1e-12);
    }
  }

  TEST_CASE("invariant under renaming labels") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 50; ++rep) {
      auto a = random_labels(40, 5, rng), b = random_labels(40, 4, rng);
      std::vector<Label> perm(5);
      std::iota(perm.begin(), perm.end(), 100);
      std::shuffle(perm.begin(), perm.end(), rng);
      auto r = a;
      for (auto& x : r) x = perm[x];
      CHECK(nmi(r, b) == doctest::Approx(nmi(a, b)).epsilon(1e-12));
    }
  }

  TEST_CASE("independent labelings give nearly zero") {
    std::mt19937_64 rng(3);
    auto a = random_labels(200000, 3, rng), b = random_labels(200000, 3, rng);
    CHECK(nmi(a, b) < 1e-3);
  }

  TEST_CASE("mutual information never exceeds either entropy") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 100; ++rep) {
      auto a = random_labels(30, 4, rng), b = random_labels(30, 3, rng);
      double mi = mutual_information(a, b);
      CHECK(mi <= entropy(a) + 1e-12);
      CHECK(mi <= entropy(b) + 1e-12);
    }
  }
}

TEST_SUITE("persistence bounds") {
  TEST_CASE("between 0 and N(T-1), layer counts sum to the total") {
    std::mt19937_64 rng(5);
    auto topo = InterlayerTopology::temporal();
    for (int rep = 0; rep < 100; ++rep) {
      std::size_t T = 1 + rep % 5, N = 1 + rep % 13;
      Partition p(T, N);
      p.flat() = random_labels(T * N, 1 + rep % 4, rng);
      auto pers = persistence(p, topo);
      CHECK(pers <= N * (T - 1));
      auto layers = layer_persistence(p, topo);
      CHECK(std::accumulate(layers.begin(), layers.end(), std::size_t{0}) == pers);
      CHECK(persistence(Partition(T, N, 7), topo) == N * (T - 1));
      CHECK(pairwise_agreement_count(p) <= N * T * (T - 1));
    }
  }

  TEST_CASE("multilevel persistence at most the number of child nodes") {
    std::mt19937_64 rng(6);
    auto parents = balanced_tree_parents({4, 8, 16});
    auto topo = InterlayerTopology::multilevel(parents);
    for (int rep = 0; rep < 50; ++rep) {
      Partition p(std::vector<std::size_t>{4, 8, 16});
      p.flat() = random_labels(28, 3, rng);
      CHECK(persistence(p, topo) <= 24);
    }
    CHECK(persistence(Partition(std::vector<std::size_t>{4, 8, 16}, 1), topo) == 24);
  }
}

TEST_SUITE("generator moments") {
  TEST_CASE("temporal persistence fraction is eta + (1 - eta)/K") {
    GeneratorConfig g;
    g.N = 2000;
    g.T = 50;
    g.K = 2;
    g.eta = {0.9};
    g.seed = 1;
    auto p = sample_temporal_partition(g);
    double n = 2000.0 * 49.0, expect = 0.95;
    double frac = persistence(p, InterlayerTopology::temporal()) / n;
    CHECK(std::abs(frac - expect) < 3 * std::sqrt(expect * (1 - expect) / n));
  }

  TEST_CASE("multiplex pairwise agreement follows the copying polynomial") {
    GeneratorConfig g;
    g.N = 20000;
    g.T = 3;
    g.K = 2;
    g.eta = {0.5};
    g.kind = TopologyKind::MultiplexAllPairs;
    g.seed = 2;
    auto p = sample_multiplex_partition(g);
    // per-node agreement rates are independent across nodes
    std::vector<double> rate(g.N);
    for (NodeId i = 0; i < g.N; ++i) {
      int a = (p(0, i) == p(1, i)) + (p(0, i) == p(2, i)) + (p(1, i) == p(2, i));
      rate[i] = a / 3.0;
    }
    double mean = std::accumulate(rate.begin(), rate.end(), 0.0) / g.N, var = 0;
    for (double r : rate) var += (r - mean) * (r - mean) / (g.N - 1);
    CHECK(multiplex_agreement(0.5, 2, 3) == doctest::Approx(0.7083333333333334));
    CHECK(std::abs(mean - 0.7083333333333334) < 3 * std::sqrt(var / g.N));
  }

  TEST_CASE("multilevel agreement is p + (1 - p)/K") {
    auto parents = balanced_tree_parents({500, 1000, 2000});
    auto topo = InterlayerTopology::multilevel(parents);
    GeneratorConfig g;
    g.N = 500;
    g.T = 3;
    g.K = 4;
    g.eta = {0.6};
    g.kind = TopologyKind::MultilevelTree;
    g.seed = 3;
    auto p = sample_multilevel_partition(g, topo);
    double n = 3000, expect = 0.6 + 0.4 / 4;
    double frac = persistence(p, topo) / n;
    CHECK(std::abs(frac - expect) < 3 * std::sqrt(expect * (1 - expect) / n));
  }

  TEST_CASE("eta = 0 gives uniform labels (chi-square)") {
    GeneratorConfig g;
    g.N = 5000;
    g.T = 4;
    g.K = 4;
    g.eta = {0.0};
    g.seed = 4;
    auto p = sample_temporal_partition(g);
    std::vector<double> count(4, 0.0);
    for (Label l : p.flat()) count[l] += 1;
    double e = p.size() / 4.0, chi = 0;
    for (double c : count) chi += (c - e) * (c - e) / e;
    CHECK(chi < 16.27);  // 3 degrees of freedom, 0.999 quantile
    // and no excess persistence
    double n = 5000.0 * 3, frac = persistence(p, InterlayerTopology::temporal()) / n;
    CHECK(std::abs(frac - 0.25) < 3 * std::sqrt(0.25 * 0.75 / n));
  }

  TEST_CASE("mean degree matches c") {
    GeneratorConfig g;
    g.N = 512;
    g.T = 1;
    g.K = 2;
    g.edges = EdgeModel::mean_degree(32, 0.4);
    g.seed = 5;
    auto b = generate_benchmark(g);
    double m = b.network.edge_count(0);
    double mean_deg = 2 * m / 512;
    // edge count is a sum of independent Bernoullis, var <= its mean
    CHECK(std::abs(mean_deg - 32) < 3 * 2 * std::sqrt(32.0 * 512 / 2) / 512);
  }
}

TEST_SUITE("multiplex copying polynomial") {
  TEST_CASE("monotone in p with the right end points") {
    for (std::size_t K : {2, 3, 5, 10})
      for (std::size_t T : {2, 3, 4, 7, 12}) {
        CHECK(multiplex_agreement(0.0, K, T) == doctest::Approx(1.0 / K));
        CHECK(multiplex_agreement(1.0, K, T) == doctest::Approx(1.0));
        double prev = multiplex_agreement(0.0, K, T);
        for (int k = 1; k <= 100; ++k) {
          double a = multiplex_agreement(k / 100.0, K, T);
          CHECK(a > prev);
          prev = a;
        }
      }
  }

  TEST_CASE("inversion recovers p") {
    for (std::size_t K : {2, 3, 5})
      for (std::size_t T : {2, 3, 5, 8})
        for (int k = 0; k <= 20; ++k) {
          double p = k / 20.0;
          double back = invert_multiplex_agreement(multiplex_agreement(p, K, T), K, T);
          CHECK(std::abs(back - p) < 1e-8);
        }
    // below the chance rate clips to 0
    CHECK(invert_multiplex_agreement(0.1, 3, 4) == 0.0);
  }

  TEST_CASE("T = 2 reduces to the temporal rate") {
    for (double p : {0.1, 0.4, 0.9}) CHECK(multiplex_agreement(p, 4, 2) == doctest::Approx(p + (1 - p) / 4));
  }
}
