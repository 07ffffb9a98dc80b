#pragma once

#include <atomic>
#include <bit>
#include <cassert>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "centralk/bench/graph.hpp"
#include "centralk/scheduler.hpp"

namespace centralk::bench {

inline constexpr std::uint64_t kInfCut = std::numeric_limits<std::uint64_t>::max();

/// Balanced bipartition: |A| = floor(n/2). Cut weight of the assignment
/// encoded by mask_a over the first `depth` nodes (the rest unassigned).
inline std::uint64_t gp_partial_cut(const BenchGraph& g, std::uint32_t mask_a,
                                    std::uint32_t depth) {
  const std::uint64_t prefix = (std::uint64_t{1} << depth) - 1;
  const std::uint64_t mask_b = prefix & ~static_cast<std::uint64_t>(mask_a);
  std::uint64_t cut = 0;
  for (std::uint32_t u = 0; u < depth; ++u) {
    const bool u_in_a = (mask_a >> u) & 1u;
    for (const auto& e : g.adjacency[u]) {
      if (e.to <= u || e.to >= depth) continue;  // count each fixed pair once
      const bool v_in_a = (mask_a >> e.to) & 1u;
      if (u_in_a != v_in_a) cut += e.weight;
    }
  }
  (void)mask_b;
  return cut;
}

/// Lower bound for the subproblem: cut so far plus, per unassigned node, the
/// cheaper feasible side's cost of cutting its edges into the opposite fixed
/// set. Edges between two unassigned nodes contribute nothing, so this never
/// exceeds the best completion.
inline std::uint64_t gp_lower_bound(const BenchGraph& g, std::uint32_t mask_a,
                                    std::uint32_t depth, std::uint64_t cut) {
  const std::size_t n = g.n;
  const std::size_t cap_a = n / 2;
  const std::size_t cap_b = n - cap_a;
  const std::size_t cnt_a = std::popcount(mask_a);
  const std::size_t cnt_b = depth - cnt_a;
  std::uint64_t bound = cut;
  const std::uint64_t prefix = (std::uint64_t{1} << depth) - 1;
  const std::uint64_t mask_b = prefix & ~static_cast<std::uint64_t>(mask_a);
  for (std::uint32_t u = depth; u < n; ++u) {
    std::uint64_t into_a = 0;  // cost of putting u in B
    std::uint64_t into_b = 0;  // cost of putting u in A
    for (const auto& e : g.adjacency[u]) {
      if (e.to >= depth) continue;
      if ((mask_a >> e.to) & 1u)
        into_a += e.weight;
      else if ((mask_b >> e.to) & 1u)
        into_b += e.weight;
    }
    if (cnt_a >= cap_a)
      bound += into_a;  // A full: u must go to B
    else if (cnt_b >= cap_b)
      bound += into_b;  // B full: u must go to A
    else
      bound += std::min(into_a, into_b);
  }
  return bound;
}

/// Exhaustive oracle: minimum cut over all balanced bipartitions. Guarded to
/// n <= 20 so it stays an oracle, not a benchmark.
inline std::uint64_t gp_seq(const BenchGraph& g) {
  if (g.n > 20) throw std::invalid_argument("gp_seq oracle is limited to n <= 20");
  const std::uint32_t n = static_cast<std::uint32_t>(g.n);
  const std::uint32_t size_a = n / 2;
  std::uint64_t best = n == 0 ? 0 : kInfCut;
  if (n == 0) return 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != static_cast<int>(size_a)) continue;
    best = std::min(best, gp_partial_cut(g, mask, n));
  }
  return best;
}

struct GpTask {
  std::uint32_t mask_a;
  std::uint32_t depth;
  std::uint64_t cut;    // weight already cut by the fixed prefix
  std::uint64_t bound;  // gp_lower_bound for this subproblem
  auto operator<=>(const GpTask&) const = default;
};

/// Branch-and-bound over the k-relaxed storage. Each task fixes the next
/// node to A or B; the global upper bound is a compare-exchange-min cell and
/// tasks at or above it are pruned. Priority favors smaller lower bounds,
/// then deeper subproblems. The result equals gp_seq exactly: a subproblem
/// is pruned only when the incumbent is already at least as good as anything
/// below it.
template <typename O>
std::uint64_t gp_parallel(const BenchGraph& g, unsigned threads, std::size_t k,
                          const Config& cfg, RunStats* stats_out = nullptr) {
  if (g.n > 30) throw std::invalid_argument("gp_parallel is limited to n <= 30");
  if (g.n == 0) return 0;
  const std::uint32_t n = static_cast<std::uint32_t>(g.n);
  const std::uint32_t cap_a = n / 2;
  const std::uint32_t cap_b = n - cap_a;

  std::atomic<std::uint64_t> upper{kInfCut};
  auto offer = [&upper](std::uint64_t cut) {
    std::uint64_t cur = upper.load(std::memory_order_relaxed);
    while (cut < cur) {
      if (upper.compare_exchange_weak(cur, cut, std::memory_order_relaxed))
        break;
    }
  };

  const std::int64_t prio_scale = n + 1;
  auto priority = [prio_scale](const GpTask& t) {
    return -static_cast<std::int64_t>(t.bound) * prio_scale +
           static_cast<std::int64_t>(t.depth);
  };

  auto execute = [&](const GpTask& task, Spawner<GpTask, O>& ctx) {
    if (task.bound >= upper.load(std::memory_order_relaxed)) return;  // pruned
    if (task.depth == n) {
      offer(task.cut);
      return;
    }
    const std::uint32_t cnt_a = std::popcount(task.mask_a);
    const std::uint32_t cnt_b = task.depth - cnt_a;
    const std::uint64_t prefix = (std::uint64_t{1} << task.depth) - 1;
    const std::uint64_t mask_b = prefix & ~static_cast<std::uint64_t>(task.mask_a);

    // One side full: the rest is forced, complete in place.
    if (cnt_a == cap_a || cnt_b == cap_b) {
      std::uint64_t total = task.cut;
      for (std::uint32_t u = task.depth; u < n; ++u) {
        for (const auto& e : g.adjacency[u]) {
          if (e.to >= task.depth) continue;
          const bool v_in_a = (task.mask_a >> e.to) & 1u;
          if (cnt_a == cap_a ? v_in_a : !v_in_a) total += e.weight;
        }
      }
      offer(total);
      return;
    }

    const std::uint32_t u = task.depth;
    std::uint64_t into_a = 0, into_b = 0;
    for (const auto& e : g.adjacency[u]) {
      if (e.to >= task.depth) continue;
      if ((task.mask_a >> e.to) & 1u)
        into_a += e.weight;
      else if ((mask_b >> e.to) & 1u)
        into_b += e.weight;
    }
    const std::uint64_t ub = upper.load(std::memory_order_relaxed);
    // Branch u -> A (cuts edges into fixed B), then u -> B.
    {
      GpTask child{task.mask_a | (1u << u), task.depth + 1, task.cut + into_b, 0};
      child.bound = gp_lower_bound(g, child.mask_a, child.depth, child.cut);
      if (child.bound < ub) ctx.spawn({priority(child), k}, child);
    }
    {
      GpTask child{task.mask_a, task.depth + 1, task.cut + into_a, 0};
      child.bound = gp_lower_bound(g, child.mask_a, child.depth, child.cut);
      if (child.bound < ub) ctx.spawn({priority(child), k}, child);
    }
  };

  GpTask root{0, 0, 0, gp_lower_bound(g, 0, 0, 0)};
  std::vector<Task<GpTask>> roots{{Strategy{priority(root), k}, root}};
  RunStats stats = run<GpTask, O>(threads, roots, cfg, execute);
  if (stats_out) *stats_out = stats;
  return upper.load(std::memory_order_relaxed);
}

}  // namespace centralk::bench
