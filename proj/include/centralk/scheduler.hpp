#pragma once

#include <atomic>
#include <barrier>
#include <cassert>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <thread>
#include <vector>

#include "centralk/config.hpp"
#include "centralk/counters.hpp"
#include "centralk/place.hpp"
#include "centralk/task_storage.hpp"

namespace centralk {

template <typename T>
struct Task {
  Strategy strategy;
  T payload;
};

struct RunStats {
  double wall_seconds = 0.0;
  std::uint64_t tasks_executed = 0;
  std::uint64_t tasks_pushed = 0;
  std::vector<CounterSnapshot> per_place;

  CounterSnapshot totals() const {
    CounterSnapshot t;
    for (const auto& s : per_place) t += s;
    return t;
  }
};

/// Capped exponential backoff for empty pops: a few yields first, then
/// sleeps doubling up to the cap.
class Backoff {
 public:
  explicit Backoff(std::uint32_t cap_us) : cap_us_(cap_us) {}

  /// Delay for the n-th consecutive empty round (n from 0). 0 means yield.
  std::uint32_t delay_us(std::uint32_t round) const {
    if (round < kYieldRounds) return 0;
    const std::uint32_t shift = std::min(round - kYieldRounds, 31u);
    const std::uint64_t us = std::uint64_t{1} << shift;
    return static_cast<std::uint32_t>(std::min<std::uint64_t>(us, cap_us_));
  }

  void step() {
    const std::uint32_t us = delay_us(round_);
    if (round_ < 0xffffffffu) ++round_;
    if (us == 0) {
      std::this_thread::yield();
    } else {
      std::this_thread::sleep_for(std::chrono::microseconds(us));
    }
  }

  void reset() { round_ = 0; }

  static constexpr std::uint32_t kYieldRounds = 16;

 private:
  std::uint32_t cap_us_;
  std::uint32_t round_ = 0;
};

/// Handle through which an executing task spawns further tasks on the
/// worker's own place.
template <typename T, typename O>
class Spawner {
 public:
  Spawner(Place<T, O>& place, std::atomic<std::uint64_t>& outstanding)
      : place_(&place), outstanding_(&outstanding) {}

  void spawn(const Strategy& strategy, const T& payload) {
    outstanding_->fetch_add(1, std::memory_order_relaxed);
    place_->push(strategy, payload);
    ++spawned_;
  }

  std::uint64_t spawned() const { return spawned_; }

 private:
  Place<T, O>* place_;
  std::atomic<std::uint64_t>* outstanding_;
  std::uint64_t spawned_ = 0;
};

namespace detail {

struct SchedulerShared {
  alignas(64) std::atomic<std::uint64_t> outstanding{0};
  alignas(64) std::atomic<std::uint64_t> progress{0};
};

template <typename T, typename O>
[[noreturn]] void watchdog_abort(const TaskStorage<T, O>& storage,
                                 const std::vector<std::unique_ptr<Place<T, O>>>& places,
                                 std::uint64_t outstanding) {
  std::fprintf(stderr,
               "centralk scheduler watchdog: no progress with %llu task(s) "
               "outstanding; tail=%zu\n",
               static_cast<unsigned long long>(outstanding),
               storage.observe_tail());
  for (const auto& p : places) {
    const auto s = snapshot(p->counters());
    std::fprintf(stderr,
                 "  place %u: head=%zu heap=%zu pushes=%llu pops=%llu "
                 "empties=%llu discards=%llu\n",
                 p->id(), p->head(), p->heap_size(),
                 static_cast<unsigned long long>(s.pushes),
                 static_cast<unsigned long long>(s.pops),
                 static_cast<unsigned long long>(s.pop_empties),
                 static_cast<unsigned long long>(s.heap_discards));
  }
  std::abort();
}

}  // namespace detail

/// Worker body: pop/execute with capped backoff on empty until the
/// outstanding count is observed at zero. The final decrement's release and
/// this acquire ensure no worker exits while a task is mid-execution.
template <typename T, typename O, typename Exec>
std::uint64_t worker_loop(Place<T, O>& place, Exec& execute,
                          detail::SchedulerShared& shared,
                          const TaskStorage<T, O>& storage,
                          const std::vector<std::unique_ptr<Place<T, O>>>& places,
                          Spawner<T, O>& spawner) {
  const Config& cfg = storage.config();
  Backoff backoff(cfg.backoff_cap_us);
  std::uint64_t executed = 0;
  std::uint64_t last_progress = shared.progress.load(std::memory_order_relaxed);
  auto idle_since = std::chrono::steady_clock::now();
  bool idle = false;

  for (;;) {
    if (auto popped = place.pop()) {
      execute(*popped, spawner);
      ++executed;
      shared.progress.fetch_add(1, std::memory_order_relaxed);
      shared.outstanding.fetch_sub(1, std::memory_order_release);
      backoff.reset();
      idle = false;
      continue;
    }
    const std::uint64_t outstanding =
        shared.outstanding.load(std::memory_order_acquire);
    if (outstanding == 0) return executed;
    if (cfg.watchdog_ms != 0) {
      const std::uint64_t now_progress =
          shared.progress.load(std::memory_order_relaxed);
      const auto now = std::chrono::steady_clock::now();
      if (!idle || now_progress != last_progress) {
        idle = true;
        last_progress = now_progress;
        idle_since = now;
      } else if (now - idle_since > std::chrono::milliseconds(cfg.watchdog_ms)) {
        detail::watchdog_abort(storage, places, outstanding);
      }
    }
    backoff.step();
  }
}

/// Run roots (and everything they spawn) to quiescence on num_threads
/// workers, each owning one place. Roots are pushed by worker 0 before the
/// others start consuming; termination is a global outstanding-task counter
/// reaching zero.
template <typename T, typename O, typename Exec>
RunStats run(unsigned num_threads, const std::vector<Task<T>>& roots,
             const Config& cfg, Exec execute) {
  assert(num_threads >= 1);
  cfg.validate();

  TaskStorage<T, O> storage(num_threads, cfg);
  std::vector<std::unique_ptr<Place<T, O>>> places;
  places.reserve(num_threads);
  for (unsigned i = 0; i < num_threads; ++i)
    places.push_back(std::make_unique<Place<T, O>>(storage, i));

  detail::SchedulerShared shared;
  shared.outstanding.store(roots.size(), std::memory_order_relaxed);
  std::barrier<> start_barrier(num_threads);

  std::vector<std::uint64_t> executed(num_threads, 0);
  std::vector<std::uint64_t> spawned(num_threads, 0);

  const auto t0 = std::chrono::steady_clock::now();
  {
    std::vector<std::jthread> workers;
    workers.reserve(num_threads);
    for (unsigned i = 0; i < num_threads; ++i) {
      workers.emplace_back([&, i] {
        Place<T, O>& place = *places[i];
        Spawner<T, O> spawner(place, shared.outstanding);
        if (i == 0) {
          for (const auto& root : roots)
            place.push(root.strategy, root.payload);
        }
        start_barrier.arrive_and_wait();
        executed[i] =
            worker_loop(place, execute, shared, storage, places, spawner);
        spawned[i] = spawner.spawned();
      });
    }
  }
  const auto t1 = std::chrono::steady_clock::now();

  RunStats stats;
  stats.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  stats.tasks_pushed = roots.size();
  for (unsigned i = 0; i < num_threads; ++i) {
    stats.tasks_executed += executed[i];
    stats.tasks_pushed += spawned[i];
    stats.per_place.push_back(snapshot(places[i]->counters()));
  }
  assert(stats.tasks_executed == stats.tasks_pushed);
  return stats;
}

}  // namespace centralk
