#pragma once

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "centralk/config.hpp"
#include "centralk/counters.hpp"
#include "centralk/place.hpp"
#include "centralk/rng.hpp"
#include "centralk/scheduler.hpp"
#include "centralk/task_storage.hpp"

namespace centralk {

struct StressParams {
  unsigned threads = 2;
  std::uint64_t items_per_thread = 1000;
  std::size_t k = 4;
  Config config{};
  /// Pops interleaved between pushes (one pop attempt every pop_interval
  /// pushes; 0 = push everything first).
  std::uint64_t pop_interval = 2;
  /// Give up draining after this long (a correct build never gets close).
  std::uint32_t drain_timeout_ms = 60000;
};

/// Result of one stress run plus the invariant audit over it:
///   - exactly-once: popped payload multiset equals the pushed one
///     (lost_items / duplicate_takes break it down);
///   - fill guarantee: every global index below the final tail was popped by
///     someone (published positions are unique, so coverage of [0, tail)
///     doubles as the slot single-publication check);
///   - lifecycle: per block, completed cleanups match activations, i.e.
///     exactly one cleanup per epoch.
struct StressReport {
  std::uint64_t items_pushed = 0;
  std::uint64_t items_popped = 0;
  std::uint64_t duplicate_takes = 0;
  std::uint64_t lost_items = 0;
  std::uint64_t final_tail = 0;
  std::uint64_t max_slot_spin = 0;
  std::uint64_t blocks_allocated = 0;
  std::uint64_t blocks_reused = 0;
  std::uint64_t cleanups = 0;
  bool fill_ok = false;
  bool lifecycle_ok = false;
  bool positions_unique = false;
  bool drained = false;
  double wall_seconds = 0.0;
  CounterSnapshot totals;

  bool pass() const {
    return duplicate_takes == 0 && lost_items == 0 && fill_ok &&
           lifecycle_ok && positions_unique && drained;
  }

  std::string summary() const {
    std::ostringstream os;
    os << "pushed=" << items_pushed << " popped=" << items_popped
       << " dup=" << duplicate_takes << " lost=" << lost_items
       << " tail=" << final_tail << " fill=" << (fill_ok ? "ok" : "FAIL")
       << " lifecycle=" << (lifecycle_ok ? "ok" : "FAIL")
       << " unique_positions=" << (positions_unique ? "ok" : "FAIL")
       << " drained=" << (drained ? "ok" : "FAIL")
       << " blocks_alloc=" << blocks_allocated
       << " blocks_reused=" << blocks_reused << " cleanups=" << cleanups
       << " max_spin=" << max_slot_spin;
    return os.str();
  }
};

namespace detail {

inline std::uint64_t stress_tag(unsigned place, std::uint64_t i) {
  return (static_cast<std::uint64_t>(place) << 40) | i;
}

/// Exactly-once audit over the consumed tags: sorts in place, counts
/// repeated consumptions and expected tags that were never consumed.
inline void audit_tags(std::vector<std::uint64_t>& tags, unsigned threads,
                       std::uint64_t per_thread, std::uint64_t& duplicates,
                       std::uint64_t& lost) {
  std::sort(tags.begin(), tags.end());
  duplicates = 0;
  for (std::size_t j = 1; j < tags.size(); ++j)
    if (tags[j] == tags[j - 1]) ++duplicates;
  std::uint64_t found = 0;
  auto it = tags.begin();
  for (unsigned p = 0; p < threads; ++p) {
    for (std::uint64_t n = 0; n < per_thread; ++n) {
      const std::uint64_t want = stress_tag(p, n);
      it = std::lower_bound(it, tags.end(), want);
      if (it != tags.end() && *it == want) ++found;
    }
  }
  lost = per_thread * threads - found;
}

template <typename T, typename O>
inline void audit_blocks(const TaskStorage<T, O>& storage,
                         const std::vector<std::unique_ptr<Place<T, O>>>& places,
                         StressReport& report) {
  report.lifecycle_ok = true;
  auto check = [&](const DataBlock<T, O>& b) {
    const std::uint64_t cleanups = b.epoch_relaxed();
    const std::uint64_t activations = b.activations();
    report.cleanups += cleanups;
    // One cleanup per completed epoch: never more cleanups than activations,
    // never more than one epoch still open.
    if (cleanups > activations || activations > cleanups + 1)
      report.lifecycle_ok = false;
    if (!b.active_relaxed() && b.active_threads_relaxed() != 0)
      report.lifecycle_ok = false;
  };
  check(*storage.start_block());
  for (const auto& p : places) p->for_each_pool_block(check);
}

}  // namespace detail

/// Each thread pushes its own uniquely tagged items (pops interleaved per
/// pop_interval), then everyone pops until the global count drains. The
/// report audits exactly-once consumption, the fill guarantee over
/// [0, final tail) and the block lifecycle.
template <typename O>
StressReport run_stress(const StressParams& params) {
  const unsigned threads = params.threads;
  const std::uint64_t per_thread = params.items_per_thread;
  const std::uint64_t total = per_thread * threads;

  TaskStorage<std::uint64_t, O> storage(threads, params.config);
  std::vector<std::unique_ptr<Place<std::uint64_t, O>>> places;
  places.reserve(threads);
  for (unsigned i = 0; i < threads; ++i)
    places.push_back(std::make_unique<Place<std::uint64_t, O>>(storage, i));

  std::atomic<std::uint64_t> popped_total{0};
  std::atomic<bool> timed_out{false};
  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> popped(
      threads);  // (tag, position)
  std::barrier<> start_barrier(threads);

  const auto t0 = std::chrono::steady_clock::now();
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) {
      workers.emplace_back([&, i] {
        auto& place = *places[i];
        auto& mine = popped[i];
        mine.reserve(per_thread + per_thread / 2);
        CounterRng rng(params.config.seed ^ 0x57e5, kStreamStress + i);
        Backoff backoff(params.config.backoff_cap_us);

        auto try_pop = [&] {
          if (auto t = place.pop_task()) {
            mine.emplace_back(t->payload, t->position);
            popped_total.fetch_add(1, std::memory_order_relaxed);
            return true;
          }
          return false;
        };

        start_barrier.arrive_and_wait();
        for (std::uint64_t n = 0; n < per_thread; ++n) {
          const Strategy strategy{
              static_cast<std::int64_t>(rng.uniform_below(97)), params.k};
          place.push(strategy, detail::stress_tag(i, n));
          if (params.pop_interval != 0 && (n + 1) % params.pop_interval == 0)
            try_pop();
        }
        const auto deadline =
            std::chrono::steady_clock::now() +
            std::chrono::milliseconds(params.drain_timeout_ms);
        while (popped_total.load(std::memory_order_relaxed) < total) {
          if (try_pop()) {
            backoff.reset();
            continue;
          }
          if (std::chrono::steady_clock::now() > deadline) {
            timed_out.store(true, std::memory_order_relaxed);
            break;
          }
          backoff.step();
        }
      });
    }
  }
  const auto t1 = std::chrono::steady_clock::now();

  StressReport report;
  report.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  report.items_pushed = total;
  report.drained = !timed_out.load(std::memory_order_relaxed);
  report.final_tail = storage.observe_tail();

  std::vector<std::uint64_t> tags;
  std::vector<std::uint64_t> positions;
  tags.reserve(total);
  positions.reserve(total);
  for (const auto& v : popped) {
    for (const auto& [tag, pos] : v) {
      tags.push_back(tag);
      positions.push_back(pos);
    }
  }
  report.items_popped = tags.size();

  detail::audit_tags(tags, threads, per_thread, report.duplicate_takes,
                     report.lost_items);

  std::sort(positions.begin(), positions.end());
  report.positions_unique =
      std::adjacent_find(positions.begin(), positions.end()) ==
      positions.end();
  // Fill guarantee: [0, final_tail) fully covered by popped positions.
  report.fill_ok = true;
  for (std::uint64_t want = 0; want < report.final_tail; ++want) {
    if (want >= positions.size() || positions[want] != want) {
      report.fill_ok = false;
      break;
    }
  }

  detail::audit_blocks(storage, places, report);
  for (const auto& p : places) report.totals += snapshot(p->counters());
  report.max_slot_spin = report.totals.max_slot_spin;
  report.blocks_allocated = report.totals.blocks_allocated;
  report.blocks_reused = report.totals.blocks_reused;
  return report;
}

}  // namespace centralk
