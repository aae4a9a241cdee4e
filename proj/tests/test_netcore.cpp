#include <filesystem>

#include "doctest.h"
#include "mlmod/network.hpp"

using namespace mlmod;

TEST_CASE("network text: edge counts per layer") {
  auto net = parse_network("1 0 1\n1 1 2\n2 0 2\n", false);
  CHECK(net.num_layers() == 2);
  CHECK(net.num_nodes() == 3);
  CHECK(net.edge_count(0) == 2);
  CHECK(net.edge_count(1) == 1);
  CHECK(net.degree(0, 1) == 2);
  CHECK(net.adjacency(1, 2, 0) == 1);
}

TEST_CASE("network text: empty layer from header") {
  auto net = parse_network("#layers 2 #nodes 3\n1 0 1\n", false);
  REQUIRE(net.num_layers() == 2);
  CHECK(net.edge_count(1) == 0);
  for (NodeId i = 0; i < 3; ++i) CHECK(net.degree(1, i) == 0);
  CHECK(net.adjacency_total(1) == 0);
}

TEST_CASE("network text: malformed lines") {
  CHECK_THROWS_AS(parse_network("1 0\n", false), ParseError);
  CHECK_THROWS_AS(parse_network("1 a 2\n", false), ParseError);
  CHECK_THROWS_AS(parse_network("0 0 1\n", false), ValidationError);
  CHECK_THROWS_AS(parse_network("1 0 1\n1 1 0\n", false), ValidationError);  // duplicate
  CHECK_THROWS_AS(parse_network("#layers 1 #nodes 2\n1 0 5\n", false), ValidationError);
  CHECK_THROWS_AS(parse_network("", false), ValidationError);
  try {
    parse_network("1 0 1\n1 x 1\n", false);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("self-loop counts once toward m and twice toward the degree") {
  auto net = parse_network("1 0 0\n1 0 1\n", false);
  CHECK(net.edge_count(0) == 2);
  CHECK(net.degree(0, 0) == 3);
  CHECK(net.adjacency(0, 0, 0) == 2);
  double sum = net.degree(0, 0) + net.degree(0, 1);
  CHECK(sum == 2 * net.edge_count(0));

  auto dir = parse_network("1 0 0\n1 0 1\n", true);
  CHECK(dir.adjacency(0, 0, 0) == 1);
  CHECK(dir.adjacency_total(0) == 2);
}

TEST_CASE("directed in/out degrees") {
  auto net = parse_network("1 0 1\n1 2 1\n1 1 0\n", true);
  CHECK(net.out_degree(0, 1) == 1);
  CHECK(net.in_degree(0, 1) == 2);
  CHECK(net.in_degree(0, 2) == 0);
  CHECK(net.edge_count(0) == 3);
}

TEST_CASE("network round trip through text") {
  auto net = parse_network("#layers 3 #nodes 5\n1 0 1\n1 3 4\n3 2 2\n", false);
  auto back = parse_network(format_network(net), false);
  CHECK(back.layer_sizes() == net.layer_sizes());
  for (std::size_t t = 0; t < 3; ++t) CHECK(back.edges(t).size() == net.edges(t).size());
  CHECK(back.adjacency(2, 2, 2) == 2);
}

TEST_CASE("parent maps") {
  auto pm = parse_parent_maps("2 0 0\n2 1 0\n");
  REQUIRE(pm.parents.size() == 2);
  CHECK(pm.parents[1] == std::vector<NodeId>{0, 0});

  CHECK_THROWS(parse_parent_maps("#sizes 1 2\n2 0 0\n"));  // node 1 of layer 2 missing
  CHECK_THROWS_AS(parse_parent_maps("1 0 0\n"), ValidationError);

  // 2 -> 4 -> 8 binary tree
  std::string text = "#sizes 2 4 8\n";
  for (int i = 0; i < 4; ++i) text += "2 " + std::to_string(i) + " " + std::to_string(i / 2) + "\n";
  for (int i = 0; i < 8; ++i) text += "3 " + std::to_string(i) + " " + std::to_string(i / 2) + "\n";
  auto tree = parse_parent_maps(text);
  CHECK(tree.sizes == std::vector<std::size_t>{2, 4, 8});
  auto topo = InterlayerTopology::multilevel(tree.parents);
  CHECK_NOTHROW(topo.validate(tree.sizes));
  CHECK(topo.predecessor(2, 5) == 2);
}

TEST_CASE("partition text") {
  std::vector<std::vector<Label>> layers(2);
  for (Label i = 0; i < 20; ++i) layers[0].push_back(i);
  for (Label i = 0; i < 20; ++i) layers[1].push_back(i % 10);
  auto p = Partition::from_layers(layers);
  auto q = parse_partition(format_partition(p));
  CHECK(q == p);
  CHECK(q.num_labels() == 20);

  CHECK_THROWS_AS(parse_partition("1 0 0\n1 0 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_partition("1 0 0\n", {2}), ValidationError);  // node 1 missing
  CHECK_THROWS_AS(parse_partition("1 0\n"), ParseError);
}

TEST_CASE("partition canonical form") {
  auto p = Partition::from_layers({{7, 7, 3}, {3, 9, 7}});
  auto c = p.canonical();
  CHECK(c.flat() == std::vector<Label>{0, 0, 1, 1, 2, 0});
  CHECK(c.num_labels() == 3);
}

TEST_CASE("partition file round trip") {
  auto dir = std::filesystem::temp_directory_path() / "mlmod_netcore_test";
  std::filesystem::create_directories(dir);
  auto p = Partition::from_layers({{0, 1, 1}, {2, 2, 0}});
  auto path = (dir / "p.txt").string();
  save_partition(p, path);
  CHECK(load_partition(path) == p);
  std::filesystem::remove_all(dir);
}

TEST_CASE("supra-adjacency") {
  SUBCASE("single layer is A") {
    auto net = parse_network("1 0 1\n1 1 2\n", false);
    auto S = supra_adjacency(net, InterlayerTopology::temporal(), Coupling::uniform(1.0));
    CHECK(S.dim == 3);
    CHECK(S.at(0, 1) == 1);
    CHECK(S.at(2, 1) == 1);
    CHECK(S.at(0, 2) == 0);
  }
  SUBCASE("temporal T=2: identity only above the diagonal") {
    auto net = parse_network("#layers 2 #nodes 2\n1 0 1\n", false);
    auto S = supra_adjacency(net, InterlayerTopology::temporal(), Coupling::uniform(1.0));
    CHECK(S.dim == 4);
    CHECK(S.at(0, 2) == 1);
    CHECK(S.at(1, 3) == 1);
    CHECK(S.at(2, 0) == 0);
    CHECK(S.at(0, 3) == 0);
    CHECK(S.at(2, 3) == 0);
  }
  SUBCASE("multiplex T=3: six scaled identity blocks") {
    auto net = parse_network("#layers 3 #nodes 2\n", false);
    auto S = supra_adjacency(net, InterlayerTopology::multiplex(), Coupling::uniform(0.5));
    CHECK(S.nonzeros() == 12);
    for (std::size_t s = 0; s < 3; ++s)
      for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t i = 0; i < 2; ++i)
          CHECK(S.at(2 * s + i, 2 * t + i) == (s == t ? 0.0 : 0.5));
  }
}

TEST_CASE("coupling forms") {
  auto c = Coupling::per_layer({0.5, 2.0});
  CHECK(c.chain(1) == 0.5);
  CHECK(c.chain(2) == 2.0);
  CHECK_THROWS_AS(Coupling::uniform(-1).validate(TopologyKind::TemporalChain, 2), ValidationError);
  CHECK_THROWS(c.validate(TopologyKind::TemporalChain, 4));
}
