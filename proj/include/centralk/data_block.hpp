#pragma once

#include <atomic>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <memory>

#include "centralk/counters.hpp"
#include "centralk/item.hpp"
#include "centralk/ordering.hpp"

namespace centralk {

/// One segment of the global array. The array is a singly linked list of
/// blocks; each block carries the global index of its first slot (offset),
/// fixed by whoever links it: offset = pred->offset + block_size.
///
/// Reuse handshake: when a place's head passes a block it calls deregister;
/// the last deregistering thread cleans the slots and release-stores
/// active = false. The owning place later observes that via is_reusable
/// (relaxed; a lagging read only delays reuse) and re-links the block with
/// add_block, whose acquire load of active closes the synchronize-with edge
/// so the cleanup writes are visible before the block is reachable again.
template <typename T, typename O>
class DataBlock {
 public:
  using Item = TaskItem<T, O>;

  explicit DataBlock(std::size_t block_size)
      : size_(block_size),
        slots_(std::make_unique<std::atomic<Item*>[]>(block_size)) {
    for (std::size_t i = 0; i < size_; ++i)
      slots_[i].store(nullptr, std::memory_order_relaxed);
  }

  DataBlock(const DataBlock&) = delete;
  DataBlock& operator=(const DataBlock&) = delete;

  std::size_t size() const { return size_; }
  std::size_t offset() const { return offset_; }
  std::size_t end() const { return offset_ + size_; }

  /// Storage construction only: make this the entry block of the list, live
  /// from the start so the first epoch needs no special case.
  void init_as_start_block(std::size_t num_places) {
    offset_ = 0;
    active_threads_.store(num_places, std::memory_order_relaxed);
    active_.store(true, std::memory_order_relaxed);
    activations_.fetch_add(1, std::memory_order_relaxed);
  }

  /// Try to publish item in this block, starting from the window based at
  /// cur_tail. Draws a uniform start offset in the k-window and probes up to
  /// `tests` slots; empty -> item transitions use a strong CAS, release on
  /// success so the item's fields are published with the slot. Strong is
  /// mandatory: each slot is tried once per window, and a spurious failure
  /// would let the window pass as full, breaking the guarantee that every
  /// index below tail holds a valid item.
  ///
  /// On success returns true with cur_tail at the window base that produced
  /// the slot. On exhaustion returns false with cur_tail advanced to the
  /// first index past this block.
  template <typename Rng>
  bool put(std::size_t& cur_tail, Item* item, Rng& rng, std::size_t tests,
           PerformanceCounters& pc) {
    assert(cur_tail >= offset_);
    const std::size_t k = item->strategy.k;
    std::size_t array_offset = cur_tail - offset_;
    while (array_offset < size_) {
      const std::size_t cur_k = std::min(k, size_ - array_offset - 1);
      const std::size_t to_add = rng.uniform_inclusive(cur_k);
      const std::size_t i_limit = to_add + std::min(tests, cur_k + 1);
      for (std::size_t i = to_add; i != i_limit; ++i) {
        O::interleave_point();
        const std::size_t wrapped_i = i % (cur_k + 1);
        auto& slot = slots_[array_offset + wrapped_i];
        if (slot.load(O::relaxed) == nullptr) {
          const std::size_t position = cur_tail + wrapped_i;
          item->orig_position = position;
          item->position.store(position, O::relaxed);
          Item* expected = nullptr;
          if (slot.compare_exchange_strong(expected, item, O::release,
                                           O::relaxed)) {
            return true;
          }
        }
        pc.bump(pc.slot_probe_failures);
      }
      cur_tail += cur_k + 1;
      array_offset = cur_tail - offset_;
    }
    return false;
  }

  /// Link `block` (owned by the caller, is_reusable-approved) behind this
  /// one. Returns false if another thread linked first; the block is then
  /// back in reusable state. The initial acquire load of block->active pairs
  /// with the release store in deregister; its value is known to be false
  /// and is ignored; in the fence handshake is_reusable_fenced already
  /// supplied the edge, so the load is skipped.
  bool add_block(DataBlock* block, std::size_t num_places,
                 bool fenced_handshake) {
    O::interleave_point();
    if (!fenced_handshake) (void)block->active_.load(O::acquire);
    block->active_threads_.store(num_places, O::relaxed);
    block->active_.store(true, O::relaxed);
    block->offset_ = offset_ + size_;
    DataBlock* expected = next_.load(O::relaxed);
    while (expected == nullptr) {
      O::interleave_point();
      // Weak CAS: spurious failure just retries; a genuine failure loads the
      // winner and exits the loop.
      if (next_.compare_exchange_weak(expected, block, O::release,
                                      O::relaxed)) {
        block->activations_.fetch_add(1, std::memory_order_relaxed);
        return true;
      }
    }
    // Inactive blocks carry no registrations; nobody reads the counter until
    // the next activation re-initializes it.
    block->active_threads_.store(0, O::relaxed);
    block->active_.store(false, O::relaxed);
    return false;
  }

  /// Drop this thread's registration. The last thread out cleans the slots
  /// and release-stores active = false, making the cleanup visible to the
  /// next add_block.
  void deregister() {
    O::interleave_point();
#if CENTRALK_TSAN
    // TSan cannot see fence-based edges; acq_rel on the decrement models the
    // departure-fence/join-fence pair below for the detector.
    const std::size_t old =
        active_threads_.fetch_sub(1, std::memory_order_acq_rel);
#else
    const std::size_t old = active_threads_.fetch_sub(1, O::relaxed);
#endif
    assert(old >= 1 && "deregister called more than once per place per epoch");
    if (old == 1) {
#if !CENTRALK_TSAN
      // Joins the departing readers' release fences through the fetch_sub
      // chain; items housed here may be re-initialized by their owners once
      // the epoch below advances.
      std::atomic_thread_fence(std::memory_order_acquire);
#endif
      for (std::size_t i = 0; i < size_; ++i)
        slots_[i].store(nullptr, O::relaxed);
      epoch_.fetch_add(1, std::memory_order_release);
      next_.store(nullptr, O::relaxed);
      if constexpr (O::seq_cst_cleanup_fence)
        std::atomic_thread_fence(std::memory_order_seq_cst);
      active_.store(false, O::release);
    }
  }

  /// Owner-only. Relaxed on purpose: while the block is still in use this
  /// avoids paying for an acquire; the synchronize-with edge comes later,
  /// from add_block's acquire load.
  bool is_reusable() const { return !active_.load(O::relaxed); }

  /// Owner-only. Variant that supplies the edge here (acquire fence once the
  /// flag reads false) so add_block can skip its extra load.
  bool is_reusable_fenced() const {
#if CENTRALK_TSAN
    if (active_.load(O::relaxed)) return false;
    return !active_.load(std::memory_order_acquire);
#else
    const bool result = !active_.load(O::relaxed);
    if (result) std::atomic_thread_fence(std::memory_order_acquire);
    return result;
#endif
  }

  std::atomic<Item*>& slot(std::size_t i) {
    assert(i < size_);
    return slots_[i];
  }

  DataBlock* next_acquire() const { return next_.load(O::acquire); }

  // Introspection for audits and tests.
  DataBlock* next_relaxed() const {
    return next_.load(std::memory_order_relaxed);
  }
  std::size_t active_threads_relaxed() const {
    return active_threads_.load(std::memory_order_relaxed);
  }
  bool active_relaxed() const {
    return active_.load(std::memory_order_relaxed);
  }
  /// Completed cleanups (one per finished epoch).
  std::uint64_t epoch_relaxed() const {
    return epoch_.load(std::memory_order_relaxed);
  }
  std::uint64_t epoch_acquire() const {
    return epoch_.load(std::memory_order_acquire);
  }
  /// Times this block was made live (successful links + start-block init).
  std::uint64_t activations() const {
    return activations_.load(std::memory_order_relaxed);
  }

 private:
  const std::size_t size_;
  std::size_t offset_ = 0;
  std::unique_ptr<std::atomic<Item*>[]> slots_;
  std::atomic<DataBlock*> next_{nullptr};
  std::atomic<std::size_t> active_threads_{0};
  std::atomic<bool> active_{false};
  /// Reuse-generation counter, bumped by cleanup. The owner's item-reuse
  /// check acquires it; release here orders the cleanup before any reuse.
  std::atomic<std::uint64_t> epoch_{0};
  std::atomic<std::uint64_t> activations_{0};
};

}  // namespace centralk
