#pragma once

#include <atomic>
#include <cassert>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "centralk/bench/graph.hpp"
#include "centralk/scheduler.hpp"

namespace centralk::bench {

inline constexpr std::uint64_t kInfDistance =
    std::numeric_limits<std::uint64_t>::max();

/// Exact sequential Dijkstra; unreachable nodes stay at kInfDistance.
inline std::vector<std::uint64_t> sssp_seq(const BenchGraph& g,
                                           std::uint32_t source) {
  assert(source < g.n);
  std::vector<std::uint64_t> dist(g.n, kInfDistance);
  using Qe = std::pair<std::uint64_t, std::uint32_t>;  // (dist, node)
  std::priority_queue<Qe, std::vector<Qe>, std::greater<>> queue;
  dist[source] = 0;
  queue.push({0, source});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const auto& e : g.adjacency[u]) {
      const std::uint64_t nd = d + e.weight;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        queue.push({nd, e.to});
      }
    }
  }
  return dist;
}

struct SsspTask {
  std::uint64_t dist;
  std::uint32_t node;
  auto operator<=>(const SsspTask&) const = default;
};

/// Label-correcting parallel Dijkstra over the k-relaxed storage: a task
/// (u, d) skips if stale, otherwise relaxes each edge with a monotone
/// compare-exchange min on the shared distance array and spawns a task per
/// improved neighbor. Priority is -distance (closest first). At quiescence
/// the distances equal sssp_seq exactly; correctness comes from the monotone
/// min and the scheduler's termination, not from access order, so the
/// distance cells are relaxed.
template <typename O>
std::vector<std::uint64_t> sssp_parallel(const BenchGraph& g,
                                         std::uint32_t source, std::size_t k,
                                         unsigned threads, const Config& cfg,
                                         RunStats* stats_out = nullptr) {
  assert(source < g.n);
  std::vector<std::atomic<std::uint64_t>> dist(g.n);
  for (auto& d : dist) d.store(kInfDistance, std::memory_order_relaxed);
  dist[source].store(0, std::memory_order_relaxed);

  auto execute = [&g, &dist, k](const SsspTask& task, Spawner<SsspTask, O>& ctx) {
    if (task.dist > dist[task.node].load(std::memory_order_relaxed))
      return;  // stale: a shorter path already won
    for (const auto& e : g.adjacency[task.node]) {
      const std::uint64_t nd = task.dist + e.weight;
      std::uint64_t cur = dist[e.to].load(std::memory_order_relaxed);
      while (nd < cur) {
        if (dist[e.to].compare_exchange_weak(cur, nd,
                                             std::memory_order_relaxed)) {
          ctx.spawn({-static_cast<std::int64_t>(nd), k}, SsspTask{nd, e.to});
          break;
        }
      }
    }
  };

  std::vector<Task<SsspTask>> roots{{Strategy{0, k}, SsspTask{0, source}}};
  RunStats stats = run<SsspTask, O>(threads, roots, cfg, execute);
  if (stats_out) *stats_out = stats;

  std::vector<std::uint64_t> result(g.n);
  for (std::size_t i = 0; i < g.n; ++i)
    result[i] = dist[i].load(std::memory_order_relaxed);
  return result;
}

}  // namespace centralk::bench
