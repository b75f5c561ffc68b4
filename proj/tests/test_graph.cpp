#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "oscnet/graph.hpp"

using oscnet::Graph;

TEST_CASE("from_edges canonicalizes endpoint order", "[graph]") {
  auto g = Graph::from_edges(4, {{2, 0}, {1, 0}, {3, 2}});
  REQUIRE(g.n == 4);
  REQUIRE(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {2, 3}});
  CHECK(g.has_edge(0, 2));
  CHECK(g.has_edge(2, 0));
  CHECK_FALSE(g.has_edge(1, 2));
}

TEST_CASE("from_edges rejects self-loops, range violations and duplicates", "[graph]") {
  CHECK_THROWS_AS(Graph::from_edges(3, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, -1}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(0, {}), std::invalid_argument);
}

TEST_CASE("parse_dimacs reads a triangle", "[graph][dimacs]") {
  auto g = oscnet::parse_dimacs("c a triangle\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n");
  REQUIRE(g.n == 3);
  REQUIRE(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("parse_dimacs deduplicates repeated edge lines", "[graph][dimacs]") {
  auto g = oscnet::parse_dimacs("p edge 3 4\ne 1 2\ne 2 1\ne 1 2\ne 2 3\n");
  REQUIRE(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
}

TEST_CASE("parse_dimacs rejects malformed input", "[graph][dimacs]") {
  CHECK_THROWS_AS(oscnet::parse_dimacs("e 1 2\n"), std::invalid_argument);       // edge before p
  CHECK_THROWS_AS(oscnet::parse_dimacs("c only comments\n"), std::invalid_argument);
  CHECK_THROWS_AS(oscnet::parse_dimacs("p edge 3 1\np edge 3 1\ne 1 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(oscnet::parse_dimacs("p edge 3 1\ne 4 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(oscnet::parse_dimacs("p edge 3 1\ne 2 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(oscnet::parse_dimacs("p edge 3 1\nx 1 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(oscnet::parse_dimacs("p circuit 3 1\n"), std::invalid_argument);
}

TEST_CASE("dimacs round-trip is the identity on random graphs", "[graph][dimacs][property]") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng() % 20);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (rng() % 3 == 0) edges.emplace_back(a, b);
    auto g = Graph::from_edges(n, edges);
    auto g2 = oscnet::parse_dimacs(oscnet::to_dimacs(g));
    REQUIRE(g2.n == g.n);
    REQUIRE(g2.edges == g.edges);
  }
}

TEST_CASE("circulant_graph small cases", "[graph][circulant]") {
  auto c3 = oscnet::circulant_graph(3, 2);
  REQUIRE(c3.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});

  // n=5, k=4: every pair is within ring distance 2, so K5.
  auto k5 = oscnet::circulant_graph(5, 4);
  REQUIRE(k5.edges.size() == 10);

  auto c84 = oscnet::circulant_graph(8, 4);
  REQUIRE(c84.edges.size() == 16);
  std::vector<int> degree(8, 0);
  for (auto [a, b] : c84.edges) {
    ++degree[static_cast<std::size_t>(a)];
    ++degree[static_cast<std::size_t>(b)];
  }
  for (int d : degree) CHECK(d == 4);
}

TEST_CASE("circulant_graph rejects invalid k", "[graph][circulant]") {
  CHECK_THROWS_AS(oscnet::circulant_graph(8, 3), std::invalid_argument);  // odd
  CHECK_THROWS_AS(oscnet::circulant_graph(8, 0), std::invalid_argument);
  CHECK_THROWS_AS(oscnet::circulant_graph(4, 4), std::invalid_argument);  // k >= n
}
