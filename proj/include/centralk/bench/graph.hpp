#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "centralk/rng.hpp"

namespace centralk::bench {

/// Undirected weighted graph, adjacency-list form. Each edge is stored in
/// both endpoint lists with the same weight; no self-loops.
struct BenchGraph {
  struct Edge {
    std::uint32_t to;
    std::uint64_t weight;
  };

  std::size_t n = 0;
  std::size_t edge_count = 0;
  std::vector<std::vector<Edge>> adjacency;
};

/// Erdos-Renyi style generation off the half adjacency matrix: each unordered
/// pair (i, j), i < j, gets an edge with probability p, with weight uniform
/// in [1, max_w]. Deterministic in (n, p, max_w, seed); the draw order (i
/// outer, j inner) is part of the format.
inline BenchGraph gen_graph(std::size_t n, double p, std::uint64_t max_w,
                            std::uint64_t seed) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0, 1]");
  if (max_w < 1) throw std::invalid_argument("max_w must be >= 1");

  BenchGraph g;
  g.n = n;
  g.adjacency.resize(n);
  CounterRng rng(seed, kStreamGraph);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform01() < p) {
        const std::uint64_t w = 1 + rng.uniform_below(max_w);
        g.adjacency[i].push_back({static_cast<std::uint32_t>(j), w});
        g.adjacency[j].push_back({static_cast<std::uint32_t>(i), w});
        ++g.edge_count;
      }
    }
  }
  return g;
}

}  // namespace centralk::bench
