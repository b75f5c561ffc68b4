#pragma once

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oscnet {

/// Undirected simple graph. Nodes are 0-based internally; file formats
/// (DIMACS) and JSON reports use 1-based ids at the boundary.
/// Edges are stored canonically: first < second, sorted, no duplicates.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  /// Builds a graph from an arbitrary edge list. Endpoints may come in any
  /// order; self-loops, out-of-range endpoints and duplicates are rejected.
  static Graph from_edges(int n, std::vector<std::pair<int, int>> raw) {
    if (n < 1) throw std::invalid_argument("Graph: node count must be >= 1");
    for (auto& [a, b] : raw) {
      if (a == b) throw std::invalid_argument("Graph: self-loop on node " + std::to_string(a + 1));
      if (a < 0 || b < 0 || a >= n || b >= n)
        throw std::invalid_argument("Graph: edge endpoint out of range");
      if (a > b) std::swap(a, b);
    }
    std::sort(raw.begin(), raw.end());
    if (std::adjacent_find(raw.begin(), raw.end()) != raw.end())
      throw std::invalid_argument("Graph: duplicate edge");
    Graph g;
    g.n = n;
    g.edges = std::move(raw);
    return g;
  }

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (auto [a, b] : edges) {
      adj[static_cast<std::size_t>(a)].push_back(b);
      adj[static_cast<std::size_t>(b)].push_back(a);
    }
    return adj;
  }
};

/// Parses DIMACS .col text: `c` comments, one `p edge <n> <m>` line, edge
/// lines `e <i> <j>` with 1-based endpoints. Duplicate edge lines are
/// tolerated and deduplicated; structural problems are errors.
inline Graph parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = -1;
  long declared_m = 0;
  std::vector<std::pair<int, int>> edges;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;  // blank line
    if (tag == "c") continue;
    if (tag == "p") {
      if (n >= 0) throw std::invalid_argument("DIMACS: duplicate p line at line " + std::to_string(lineno));
      std::string fmt;
      if (!(ls >> fmt >> n >> declared_m) || fmt != "edge" || n < 1)
        throw std::invalid_argument("DIMACS: malformed p line at line " + std::to_string(lineno));
      continue;
    }
    if (tag == "e") {
      if (n < 0) throw std::invalid_argument("DIMACS: edge before p line at line " + std::to_string(lineno));
      int a = 0, b = 0;
      if (!(ls >> a >> b))
        throw std::invalid_argument("DIMACS: malformed e line at line " + std::to_string(lineno));
      if (a < 1 || b < 1 || a > n || b > n)
        throw std::invalid_argument("DIMACS: endpoint out of range at line " + std::to_string(lineno));
      if (a == b) throw std::invalid_argument("DIMACS: self-loop at line " + std::to_string(lineno));
      if (a > b) std::swap(a, b);
      edges.emplace_back(a - 1, b - 1);
      continue;
    }
    throw std::invalid_argument("DIMACS: unknown line type '" + tag + "' at line " + std::to_string(lineno));
  }
  if (n < 0) throw std::invalid_argument("DIMACS: missing p line");
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  Graph g;
  g.n = n;
  g.edges = std::move(edges);
  return g;
}

inline std::string to_dimacs(const Graph& g) {
  std::ostringstream out;
  out << "p edge " << g.n << ' ' << g.edges.size() << '\n';
  for (auto [a, b] : g.edges) out << "e " << (a + 1) << ' ' << (b + 1) << '\n';
  return out.str();
}

/// K-nearest-neighbor ring: node i adjacent to (i +- d) mod n for d = 1..k/2.
/// Every node has degree k. Requires k even, 2 <= k < n.
inline Graph circulant_graph(int n, int k) {
  if (k < 2 || k >= n || k % 2 != 0)
    throw std::invalid_argument("circulant_graph: need k even, 2 <= k < n");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int d = 1; d <= k / 2; ++d) {
      int j = (i + d) % n;
      int a = std::min(i, j), b = std::max(i, j);
      edges.emplace_back(a, b);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  Graph g;
  g.n = n;
  g.edges = std::move(edges);
  return g;
}

}  // namespace oscnet
