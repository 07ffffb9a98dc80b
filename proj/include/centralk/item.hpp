#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>

#include "centralk/strategy.hpp"

namespace centralk {

/// One queued task, referenced from a block slot and from local heaps.
///
/// position doubles as the taken mark: the item is live while
/// position == orig_position, and a consumer claims it by bumping position to
/// orig_position + 1. All position accesses are relaxed: a stale read either
/// fails the following compare-exchange or causes some extra work (e.g. a
/// taken item lingering in a heap), never incorrectness.
///
/// strategy, payload, orig_position and owner are written by the owning place
/// before the item becomes reachable through a slot (the slot's release CAS
/// publishes them) and never after, so no other field needs to be atomic.
template <typename T, typename O>
struct TaskItem {
  Strategy strategy{};
  T payload{};
  std::size_t orig_position = 0;
  std::atomic<std::size_t> position{0};
  std::uint32_t owner = 0;
  /// Reuse generation. Test-support metadata only: bumped on every init so
  /// harnesses can tell generations apart; the algorithm never reads it.
  std::atomic<std::uint64_t> epoch{0};

  TaskItem() = default;
  TaskItem(const TaskItem&) = delete;
  TaskItem& operator=(const TaskItem&) = delete;

  /// Owner-only, before (re)publication. Positions stay untouched here; put
  /// assigns them when a slot is found.
  void init(const Strategy& s, const T& p, std::uint32_t owner_id) {
    strategy = s;
    payload = p;
    owner = owner_id;
    epoch.fetch_add(1, std::memory_order_relaxed);
  }

  /// Claim the item: single-shot strong CAS from expected_orig to
  /// expected_orig + 1. Strong is required; the caller does not retry, and a
  /// spurious failure would silently drop the task for the heap that owned
  /// it. Returns true iff this call performed the transition.
  bool try_take_at(std::size_t expected_orig) {
    std::size_t cur = position.load(O::relaxed);
    if (cur != expected_orig) return false;
    return position.compare_exchange_strong(cur, expected_orig + 1, O::relaxed,
                                            O::relaxed);
  }

  bool try_take() { return try_take_at(orig_position); }

  bool is_taken_at(std::size_t expected_orig) const {
    return position.load(O::relaxed) != expected_orig;
  }

  /// Reads the (non-atomic) orig_position, so only valid where item reuse
  /// cannot interleave: on the owning thread, or while the item is pinned by
  /// an unconsumed slot.
  bool is_taken() const { return is_taken_at(orig_position); }
};

}  // namespace centralk
