#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "errors.hpp"

// Simple undirected graph over qubits/ions: the entanglement target for
// phase accumulation, verification, and parameter searches.

namespace ionweave {

struct GraphSpec {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // stored with first < second

  static GraphSpec make(int n, std::vector<std::pair<int, int>> edges) {
    GraphSpec g;
    g.n = n;
    for (auto& [a, b] : edges) {
      if (a > b) std::swap(a, b);
      require(a != b, Errc::invalid_argument, "graph has a self-loop");
      require(a >= 0 && b < n, Errc::invalid_argument,
              "graph edge endpoint out of range");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.edges = std::move(edges);
    return g;
  }

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (const auto& [a, b] : edges) {
      if (a == v) out.push_back(b);
      if (b == v) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<int> degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    for (const auto& [a, b] : edges) {
      ++deg[static_cast<std::size_t>(a)];
      ++deg[static_cast<std::size_t>(b)];
    }
    return deg;
  }
};

}  // namespace ionweave
