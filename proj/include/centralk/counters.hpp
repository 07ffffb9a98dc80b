#pragma once

#include <atomic>
#include <cstdint>

namespace centralk {

/// Per-place tallies. Single writer (the owning thread); fields are relaxed
/// atomics so progress watchdogs and end-of-run reporting may read them from
/// other threads without a race.
struct PerformanceCounters {
  std::atomic<std::uint64_t> pushes{0};
  std::atomic<std::uint64_t> pops{0};
  std::atomic<std::uint64_t> pop_empties{0};
  std::atomic<std::uint64_t> slot_probe_failures{0};
  std::atomic<std::uint64_t> blocks_linked{0};
  std::atomic<std::uint64_t> blocks_reused{0};
  std::atomic<std::uint64_t> blocks_allocated{0};
  std::atomic<std::uint64_t> heap_discards{0};
  std::atomic<std::uint64_t> items_allocated{0};
  std::atomic<std::uint64_t> items_reused{0};
  std::atomic<std::uint64_t> max_slot_spin{0};

  void bump(std::atomic<std::uint64_t>& c, std::uint64_t n = 1) {
    c.store(c.load(std::memory_order_relaxed) + n, std::memory_order_relaxed);
  }

  void record_slot_spin(std::uint64_t spins) {
    if (spins > max_slot_spin.load(std::memory_order_relaxed))
      max_slot_spin.store(spins, std::memory_order_relaxed);
  }
};

/// Plain copy of the counters for aggregation and reporting.
struct CounterSnapshot {
  std::uint64_t pushes = 0;
  std::uint64_t pops = 0;
  std::uint64_t pop_empties = 0;
  std::uint64_t slot_probe_failures = 0;
  std::uint64_t blocks_linked = 0;
  std::uint64_t blocks_reused = 0;
  std::uint64_t blocks_allocated = 0;
  std::uint64_t heap_discards = 0;
  std::uint64_t items_allocated = 0;
  std::uint64_t items_reused = 0;
  std::uint64_t max_slot_spin = 0;

  CounterSnapshot& operator+=(const CounterSnapshot& o) {
    pushes += o.pushes;
    pops += o.pops;
    pop_empties += o.pop_empties;
    slot_probe_failures += o.slot_probe_failures;
    blocks_linked += o.blocks_linked;
    blocks_reused += o.blocks_reused;
    blocks_allocated += o.blocks_allocated;
    heap_discards += o.heap_discards;
    items_allocated += o.items_allocated;
    items_reused += o.items_reused;
    if (o.max_slot_spin > max_slot_spin) max_slot_spin = o.max_slot_spin;
    return *this;
  }
};

inline CounterSnapshot snapshot(const PerformanceCounters& pc) {
  CounterSnapshot s;
  s.pushes = pc.pushes.load(std::memory_order_relaxed);
  s.pops = pc.pops.load(std::memory_order_relaxed);
  s.pop_empties = pc.pop_empties.load(std::memory_order_relaxed);
  s.slot_probe_failures = pc.slot_probe_failures.load(std::memory_order_relaxed);
  s.blocks_linked = pc.blocks_linked.load(std::memory_order_relaxed);
  s.blocks_reused = pc.blocks_reused.load(std::memory_order_relaxed);
  s.blocks_allocated = pc.blocks_allocated.load(std::memory_order_relaxed);
  s.heap_discards = pc.heap_discards.load(std::memory_order_relaxed);
  s.items_allocated = pc.items_allocated.load(std::memory_order_relaxed);
  s.items_reused = pc.items_reused.load(std::memory_order_relaxed);
  s.max_slot_spin = pc.max_slot_spin.load(std::memory_order_relaxed);
  return s;
}

}  // namespace centralk
