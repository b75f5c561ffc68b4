#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oscnet/graph.hpp"
#include "oscnet/model.hpp"

using namespace oscnet;

TEST_CASE("natural_period closed form", "[model]") {
  OscillatorParams p;  // defaults: 1 MOhm, 100 pF, beta 0.5
  // 2 * 1e6 * 100e-12 * ln 3
  CHECK(natural_period(p) == Catch::Approx(2.1972245773362196e-4).epsilon(1e-12));

  OscillatorParams q = p;
  q.beta = 1.0 / 3.0;
  // same tau, ln((4/3)/(2/3)) = ln 2
  CHECK(natural_period(q) == Catch::Approx(1.3862943611198906e-4).epsilon(1e-12));

  OscillatorParams r = p;
  r.r_f = 2e6;
  CHECK(natural_period(r) == Catch::Approx(2.0 * natural_period(p)).epsilon(1e-12));
}

TEST_CASE("natural_period is increasing in r_f, c_l and beta", "[model][property]") {
  std::mt19937_64 rng(7);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  for (int trial = 0; trial < 500; ++trial) {
    OscillatorParams p;
    p.r_f = uniform(1e3, 1e8);
    p.c_l = uniform(1e-12, 1e-6);
    p.beta = uniform(0.05, 0.95);
    p.v_a = uniform(0.5, 5.0);
    double t0 = natural_period(p);
    OscillatorParams a = p, b = p, c = p;
    a.r_f *= 1.5;
    b.c_l *= 1.5;
    c.beta = c.beta + 0.5 * (0.99 - c.beta);
    CHECK(natural_period(a) > t0);
    CHECK(natural_period(b) > t0);
    CHECK(natural_period(c) > t0);
  }
}

TEST_CASE("OscillatorParams validation", "[model]") {
  OscillatorParams p;
  p.r_f = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.beta = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.beta = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.c_l = -1e-12;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.v_a = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("build_network applies detune to r_f", "[model]") {
  auto g = Graph::from_edges(2, {});
  auto net = build_network(g, {}, 0, 1e-12, {0.0, 0.02});
  REQUIRE(net.size() == 2);
  CHECK(net.oscillators[0].r_f == Catch::Approx(1.00e6).epsilon(1e-12));
  CHECK(net.oscillators[1].r_f == Catch::Approx(1.02e6).epsilon(1e-12));
  CHECK(net.edges.empty());
  CHECK(net.c_noise == std::vector<double>{1e-12, 1e-12});
}

TEST_CASE("build_network puts c_c on every edge of the diamond", "[model]") {
  // 4-cycle plus chord 1-3 (1-based): edges 1-2, 2-3, 3-4, 4-1, 1-3.
  auto g = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}});
  auto net = build_network(g, {}, 5e-12, 1e-12, {0, 0, 0, 0});
  REQUIRE(net.edges.size() == 5);
  for (const auto& e : net.edges) CHECK(e.c_c == 5e-12);
}

TEST_CASE("build_network rejects bad inputs", "[model]") {
  auto g = Graph::from_edges(2, {{0, 1}});
  CHECK_THROWS_AS(build_network(g, {}, 1e-12, 1e-12, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_network(g, {}, 0, 1e-12, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_network(g, {}, 1e-12, -1e-12, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_network(g, {}, 1e-12, 1e-12, {0.0, -1.0}), std::invalid_argument);
}

TEST_CASE("capacitance_matrix small cases", "[model]") {
  auto g2 = Graph::from_edges(2, {});
  auto net = build_network(g2, {}, 0, 1e-12, {0, 0});
  auto m = capacitance_matrix(net);
  CHECK(m(0, 0) == Catch::Approx(101e-12).epsilon(1e-12));
  CHECK(m(1, 1) == Catch::Approx(101e-12).epsilon(1e-12));
  CHECK(m(0, 1) == 0.0);

  auto g2e = Graph::from_edges(2, {{0, 1}});
  auto net2 = build_network(g2e, {}, 5e-12, 1e-12, {0, 0});
  auto m2 = capacitance_matrix(net2);
  CHECK(m2(0, 0) == Catch::Approx(106e-12).epsilon(1e-12));
  CHECK(m2(1, 1) == Catch::Approx(106e-12).epsilon(1e-12));
  CHECK(m2(0, 1) == Catch::Approx(-5e-12).epsilon(1e-12));
  CHECK(m2(1, 0) == Catch::Approx(-5e-12).epsilon(1e-12));

  auto tri = Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  auto net3 = build_network(tri, {}, 1e-12, 1e-12, {0, 0, 0});
  auto m3 = capacitance_matrix(net3);
  for (int i = 0; i < 3; ++i) {
    CHECK(m3(i, i) == Catch::Approx(103e-12).epsilon(1e-12));
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(m3(i, j) == Catch::Approx(-1e-12).epsilon(1e-12));
  }
}

TEST_CASE("capacitance_matrix is symmetric and strictly diagonally dominant",
          "[model][property]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng() % 12);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (rng() % 2 == 0) edges.emplace_back(a, b);
    auto g = Graph::from_edges(n, edges);
    std::vector<double> detune(static_cast<std::size_t>(n), 0.0);
    double cc = 1e-12 * (1 + static_cast<double>(rng() % 50));
    double cn = 1e-13 * static_cast<double>(rng() % 20);
    auto net = build_network(g, {}, edges.empty() ? 1e-12 : cc, cn, detune);
    auto m = capacitance_matrix(net);
    for (int i = 0; i < n; ++i) {
      double off = 0;
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        REQUIRE(m(i, j) == m(j, i));
        off += std::abs(m(i, j));
      }
      REQUIRE(m(i, i) > off);  // strict dominance: c_l + c_noise > 0 on top of couplings
    }
  }
}

TEST_CASE("edgeless network gives a diagonal matrix", "[model][property]") {
  auto g = Graph::from_edges(5, {});
  auto net = build_network(g, {}, 0, 2e-12, {0, 0, 0, 0, 0});
  auto m = capacitance_matrix(net);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(m(i, j) == (i == j ? Catch::Approx(102e-12).epsilon(1e-12) : Catch::Approx(0.0).margin(0)));
}
