#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oscnet/analysis.hpp"
#include "oscnet/graph.hpp"
#include "oscnet/model.hpp"
#include "oscnet/seeds.hpp"
#include "oscnet/sim.hpp"

namespace oscnet {

/// Nodes sorted by ascending phase; phases_deg lists the phase of each node
/// along the sequence (nondecreasing).
struct CyclicOrder {
  std::vector<int> sequence;  // 0-based node ids
  std::vector<double> phases_deg;
};

inline CyclicOrder phase_order(const PhaseReport& report) {
  auto n = report.phases_deg.size();
  std::vector<int> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    double pa = report.phases_deg[static_cast<std::size_t>(a)];
    double pb = report.phases_deg[static_cast<std::size_t>(b)];
    if (pa != pb) return pa < pb;
    return a < b;  // stable tie-break by node index
  });
  CyclicOrder order;
  order.sequence = std::move(idx);
  order.phases_deg.reserve(n);
  for (int i : order.sequence) order.phases_deg.push_back(report.phases_deg[static_cast<std::size_t>(i)]);
  return order;
}

struct Coloring {
  std::vector<int> assignment;  // node -> color, colors 0-based and contiguous
  int num_colors = 0;
};

/// Greedy slicing of the cyclic order into consecutive independent sets, tried
/// from every rotation; keeps the rotation with the fewest classes (ties go to
/// the smallest rotation offset). Always proper: a node only joins a class it
/// has no edge into.
inline Coloring cyclic_greedy_coloring(const CyclicOrder& order, const Graph& g) {
  int n = g.n;
  if (static_cast<int>(order.sequence.size()) != n)
    throw std::invalid_argument("cyclic_greedy_coloring: order does not cover the graph");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : order.sequence) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("cyclic_greedy_coloring: order is not a permutation of the nodes");
    seen[static_cast<std::size_t>(v)] = 1;
  }

  std::vector<char> adj(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  for (auto [a, b] : g.edges) {
    adj[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)] = 1;
    adj[static_cast<std::size_t>(b) * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)] = 1;
  }
  auto connected = [&](int a, int b) {
    return adj[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)] != 0;
  };

  auto run_rotation = [&](int rot, std::vector<int>* assignment) {
    int classes = 0;
    std::vector<int> current;
    for (int p = 0; p < n; ++p) {
      int node = order.sequence[static_cast<std::size_t>((rot + p) % n)];
      bool fits = true;
      for (int member : current)
        if (connected(member, node)) {
          fits = false;
          break;
        }
      if (!fits || current.empty()) {
        if (!fits) current.clear();
        ++classes;
      }
      current.push_back(node);
      if (assignment) (*assignment)[static_cast<std::size_t>(node)] = classes - 1;
    }
    return classes;
  };

  int best_classes = std::numeric_limits<int>::max();
  int best_rot = 0;
  for (int rot = 0; rot < n; ++rot) {
    int classes = run_rotation(rot, nullptr);
    if (classes < best_classes) {
      best_classes = classes;
      best_rot = rot;
    }
  }

  Coloring col;
  col.assignment.assign(static_cast<std::size_t>(n), -1);
  col.num_colors = run_rotation(best_rot, &col.assignment);
  return col;
}

struct ColoringVerdict {
  bool valid = false;
  std::vector<std::pair<int, int>> violations;  // offending edges, 0-based
};

inline ColoringVerdict verify_coloring(const Graph& g, const Coloring& c) {
  if (static_cast<int>(c.assignment.size()) != g.n)
    throw std::invalid_argument("verify_coloring: assignment does not cover the graph");
  for (int col : c.assignment)
    if (col < 0) throw std::invalid_argument("verify_coloring: incomplete assignment");
  ColoringVerdict verdict;
  for (auto [a, b] : g.edges)
    if (c.assignment[static_cast<std::size_t>(a)] == c.assignment[static_cast<std::size_t>(b)])
      verdict.violations.emplace_back(a, b);
  verdict.valid = verdict.violations.empty();
  return verdict;
}

/// Exact chromatic number by backtracking over k-colorability, k = 1..n.
/// Symmetry pruning: a node may only open one fresh color beyond those used.
inline int chromatic_number_bruteforce(const Graph& g, int node_limit = 16) {
  if (g.n > node_limit)
    throw std::invalid_argument("chromatic_number_bruteforce: graph exceeds node_limit");
  int n = g.n;
  if (g.edges.empty()) return 1;

  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (auto [a, b] : g.edges) {
    ++degree[static_cast<std::size_t>(a)];
    ++degree[static_cast<std::size_t>(b)];
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (degree[static_cast<std::size_t>(a)] != degree[static_cast<std::size_t>(b)])
      return degree[static_cast<std::size_t>(a)] > degree[static_cast<std::size_t>(b)];
    return a < b;
  });
  std::vector<int> pos_of(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) pos_of[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = p;
  auto adjacency = g.adjacency();
  std::vector<std::vector<int>> earlier(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    int node = order[static_cast<std::size_t>(p)];
    for (int nb : adjacency[static_cast<std::size_t>(node)])
      if (pos_of[static_cast<std::size_t>(nb)] < p) earlier[static_cast<std::size_t>(p)].push_back(nb);
  }

  std::vector<int> color(static_cast<std::size_t>(n), 0);
  std::function<bool(int, int, int)> place = [&](int p, int used, int k) -> bool {
    if (p == n) return true;
    int cap = std::min(k, used + 1);
    for (int c = 1; c <= cap; ++c) {
      bool ok = true;
      for (int nb : earlier[static_cast<std::size_t>(p)])
        if (color[static_cast<std::size_t>(nb)] == c) {
          ok = false;
          break;
        }
      if (!ok) continue;
      color[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = c;
      if (place(p + 1, std::max(used, c), k)) return true;
    }
    color[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = 0;
    return false;
  };

  for (int k = 1; k <= n; ++k) {
    std::fill(color.begin(), color.end(), 0);
    if (place(0, 0, k)) return k;
  }
  return n;  // unreachable: n colors always suffice
}

/// Frozen operating point of the oscillator coloring pipeline plus the lock
/// thresholds it applies.
struct PipelineSettings {
  OscillatorParams defaults{};
  double c_c = 50e-12;          // coupling per graph edge
  double c_noise = 1e-12;       // noise injection per oscillator
  double noise_rms = 0.0;       // volts; 0 disables the noise source
  double hold_interval = 1e-6;
  bool noise_common = true;
  double t_end = 10e-3;
  double detune_spread = 0.01;  // fractional r_f offsets drawn uniformly in +-spread
  double window_fraction = 0.5;
  double eps_f = 1e-3;
  double eps_phi_deg = 10.0;
  int runs = 12;
};

struct RunRecord {
  std::uint64_t seed = 0;
  bool locked = false;
  int num_colors = -1;  // -1 when the run did not produce a coloring
  double max_rel_period_spread = -1;
  double phase_std_deg = -1;
  std::string error;  // nonempty if the simulation or analysis failed
};

struct ColoringResult {
  bool locked = false;  // true iff at least one run locked
  std::optional<Coloring> coloring;
  std::optional<CyclicOrder> order;
  int locked_runs = 0;
  int total_runs = 0;
  std::vector<RunRecord> runs;
};

/// Full pipeline: map the graph onto a coupled oscillator network, run
/// `runs` independently seeded simulations, and color from the cyclic phase
/// order of each locked run. The best (fewest-color) locked run wins; if no
/// run locks the result says so instead of fabricating a coloring.
inline ColoringResult color_via_oscillators(const Graph& g, const PipelineSettings& ps,
                                            std::uint64_t master_seed) {
  if (ps.runs < 1) throw std::invalid_argument("color_via_oscillators: need runs >= 1");

  std::mt19937_64 drng(derive_seed(master_seed, kStreamDetune));
  std::vector<double> detune(static_cast<std::size_t>(g.n));
  for (auto& d : detune) {
    double u = static_cast<double>(drng() >> 11) * 0x1.0p-53;
    d = ps.detune_spread * (2.0 * u - 1.0);
  }
  auto net = build_network(g, ps.defaults, ps.c_c, ps.c_noise, detune, ps.noise_common);
  auto cfg = SimConfig::for_network(net, ps.t_end);

  ColoringResult result;
  result.total_runs = ps.runs;
  for (int r = 0; r < ps.runs; ++r) {
    RunRecord rec;
    std::uint64_t run_seed = derive_seed(master_seed, kStreamRunBase + static_cast<std::uint64_t>(r));
    rec.seed = run_seed;
    try {
      NoiseSpec noise;
      noise.rms_voltage = ps.noise_rms;
      noise.hold_interval = ps.hold_interval;
      noise.seed = derive_seed(run_seed, kStreamNoise);
      auto trace = simulate(net, noise, cfg, run_seed);
      auto lock = lock_report(trace, ps.window_fraction, ps.eps_f, ps.eps_phi_deg);
      rec.locked = lock.locked;
      rec.max_rel_period_spread = lock.max_rel_period_spread;
      rec.phase_std_deg = lock.phase_std_deg;
      if (lock.locked) {
        auto phases = phase_report(trace, 0, ps.window_fraction);
        auto order = phase_order(phases);
        auto coloring = cyclic_greedy_coloring(order, g);
        if (!verify_coloring(g, coloring).valid)
          throw std::logic_error("cyclic_greedy_coloring produced an improper coloring");
        rec.num_colors = coloring.num_colors;
        ++result.locked_runs;
        if (!result.coloring || coloring.num_colors < result.coloring->num_colors) {
          result.coloring = std::move(coloring);
          result.order = std::move(order);
        }
      }
    } catch (const std::runtime_error& e) {
      rec.error = e.what();
    }
    result.runs.push_back(std::move(rec));
  }
  result.locked = result.locked_runs > 0;
  return result;
}

}  // namespace oscnet
