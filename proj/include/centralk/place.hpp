#pragma once

#include <algorithm>
#include <atomic>
#include <cassert>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <thread>
#include <vector>

#include "centralk/config.hpp"
#include "centralk/counters.hpp"
#include "centralk/data_block.hpp"
#include "centralk/ordering.hpp"
#include "centralk/rng.hpp"
#include "centralk/task_storage.hpp"

namespace centralk {

/// Local priority queue over item handles. Entries snapshot priority,
/// position and payload at insert time, so after insertion the heap only ever
/// touches the item's atomic position. Taken or reused items linger until a
/// pop discards them (lazy deletion).
template <typename T, typename O>
  requires std::totally_ordered<T>
class StrategyHeap {
 public:
  using Item = TaskItem<T, O>;

  struct Entry {
    std::int64_t priority;
    T payload;
    std::uint64_t seq;
    Item* item;
    std::size_t orig_position;
  };

  void push(std::int64_t priority, Item* item, std::size_t orig_position,
            const T& payload) {
    heap_.push(Entry{priority, payload, seq_++, item, orig_position});
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

  Entry pop_top() {
    Entry e = heap_.top();
    heap_.pop();
    return e;
  }

 private:
  // Max-heap: priority first, then smaller payload, then insertion order,
  // so the single-threaded degenerate case is deterministic.
  struct Worse {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.priority != b.priority) return a.priority < b.priority;
      if (a.payload != b.payload) return b.payload < a.payload;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Worse> heap_;
  std::uint64_t seq_ = 0;
};

/// Per-thread access point. All operations are owner-only; cross-thread
/// interaction happens exclusively through the storage's atomics, block
/// atomics and item positions.
template <typename T, typename O>
class Place {
 public:
  using Storage = TaskStorage<T, O>;
  using Block = DataBlock<T, O>;
  using Item = TaskItem<T, O>;

  struct Popped {
    T payload;
    std::int64_t priority;
    std::size_t position;
  };

  Place(Storage& storage, std::uint32_t id)
      : storage_(&storage),
        id_(id),
        block_size_(storage.config().block_size),
        tests_(storage.config().resolved_tests()),
        fenced_(storage.config().handshake == Handshake::fence),
        rng_(storage.config().seed, kStreamPlaceBase + id),
        head_block_(storage.start_block()),
        tail_block_(storage.start_block()) {
    assert(id < storage.num_places());
  }

  Place(const Place&) = delete;
  Place& operator=(const Place&) = delete;

  std::uint32_t id() const { return id_; }
  std::size_t head() const { return head_; }
  PerformanceCounters& counters() { return counters_; }
  const PerformanceCounters& counters() const { return counters_; }

  /// Publish a task. Walks from the newest block this place knows of to the
  /// block covering the observed tail, puts (linking fresh or reused blocks
  /// as needed), raises the global tail, and finally inserts the item into
  /// this place's own heap (the pusher is always allowed to see its own
  /// newest task).
  void push(const Strategy& strategy, const T& payload) {
    Item* item = acquire_item();
    item->init(strategy, payload, id_);

    std::size_t cur_tail = storage_->tail_relaxed();
    // The relaxed tail read may lag the cached block; its offset region was
    // verified full by whoever linked it, so starting there is sound.
    if (cur_tail < tail_block_->offset()) cur_tail = tail_block_->offset();

    Block* block = tail_block_;
    for (;;) {
      if (block->put(cur_tail, item, rng_, tests_, counters_)) break;
      // Exhausted: cur_tail now points just past this block.
      Block* next = block->next_acquire();
      if (next == nullptr) {
        Block* fresh = acquire_block();
        if (block->add_block(fresh, storage_->num_places(), fenced_)) {
          counters_.bump(counters_.blocks_linked);
          next = fresh;
        } else {
          // Lost the race; the winner's link is visible by now.
          next = block->next_acquire();
          assert(next != nullptr);
        }
      }
      block = next;
      tail_block_ = block;
    }
    storage_->advance_tail(cur_tail);

    record_housing(item, block);
    heap_.push(strategy.priority, item, item->orig_position, item->payload);
    counters_.bump(counters_.pushes);
  }

  /// Bring the heap up to date with the global tail: consume every slot in
  /// [head, tail), inserting untaken foreign items, and deregister blocks the
  /// head has fully passed.
  void update_heap() {
    const std::size_t t = storage_->observe_tail();
    deregister_old_blocks();
    while (head_ < t) {
      deregister_old_blocks();
      assert(head_block_->offset() <= head_ && head_ < head_block_->end());
      auto& slot = head_block_->slot(head_ - head_block_->offset());
      Item* item = slot.load(O::acquire);
      std::uint64_t spins = 0;
      while (item == nullptr) {
        // Below the acquired tail every slot is published; an empty read here
        // can only be a transient of an in-flight interleaving. A permanently
        // empty slot is a fill-guarantee violation, which the cap turns into
        // a hard failure instead of a hang.
        ++spins;
        if ((spins & 0x3ff) == 0) std::this_thread::yield();
        assert(spins < kSlotSpinCap && "empty slot below tail");
        item = slot.load(O::acquire);
      }
      counters_.record_slot_spin(spins);
      assert(item->orig_position == head_);
      if (item->owner != id_ && !item->is_taken_at(head_)) {
        heap_.push(item->strategy.priority, item, head_, item->payload);
      }
      ++head_;
    }
    deregister_old_blocks();
  }

  /// Highest-priority visible task, or empty. Empty means nothing is visible
  /// to this place right now, not that the storage is globally empty.
  std::optional<Popped> pop_task() {
    for (int attempt = 0; attempt < 2; ++attempt) {
      update_heap();
      while (!heap_.empty()) {
        auto entry = heap_.pop_top();
        if (entry.item->try_take_at(entry.orig_position)) {
          counters_.bump(counters_.pops);
          return Popped{entry.payload, entry.priority, entry.orig_position};
        }
        counters_.bump(counters_.heap_discards);
      }
    }
    counters_.bump(counters_.pop_empties);
    return std::nullopt;
  }

  std::optional<T> pop() {
    auto popped = pop_task();
    if (!popped) return std::nullopt;
    return popped->payload;
  }

  /// Deregister every block fully behind head and advance head_block. If the
  /// successor is not linked yet the block is left registered; the next call
  /// picks it up. tail_block_ is dragged along so it can never point at a
  /// block this place has already deregistered (whose reuse could otherwise
  /// relocate it under us).
  void deregister_old_blocks() {
    while (head_ >= head_block_->end()) {
      Block* next = head_block_->next_acquire();
      if (next == nullptr) break;
      if (tail_block_ == head_block_) tail_block_ = next;
#if !CENTRALK_TSAN
      // Reader-departure edge: orders this place's reads of the block's items
      // before the cleanup performed by the last deregistering thread.
      std::atomic_thread_fence(std::memory_order_release);
#endif
      head_block_->deregister();
      head_block_ = next;
    }
  }

  /// A block from this place's pool that is free for (re)linking; allocates
  /// when none is reusable. The returned block is not yet linked or active.
  Block* acquire_block() {
    for (auto& b : block_pool_) {
      const bool reusable = fenced_ ? b->is_reusable_fenced() : b->is_reusable();
      if (reusable) {
        counters_.bump(counters_.blocks_reused);
        return b.get();
      }
    }
    block_pool_.push_back(std::make_unique<Block>(block_size_));
    counters_.bump(counters_.blocks_allocated);
    return block_pool_.back().get();
  }

  /// An item whose previous use is over: taken, and the block epoch that
  /// housed it has advanced (so no thread can still read its fields).
  /// Allocates when no pooled item qualifies within the probe budget.
  Item* acquire_item() {
    const std::size_t n = item_pool_.size();
    const std::size_t probes = std::min(n, kItemProbeLimit);
    for (std::size_t p = 0; p < probes; ++p) {
      if (item_cursor_ >= n) item_cursor_ = 0;
      PoolEntry& e = item_pool_[item_cursor_++];
      if (reusable(e)) {
        e.housing_block = nullptr;
        counters_.bump(counters_.items_reused);
        pending_entry_ = &e;
        return e.item.get();
      }
    }
    item_pool_.push_back(PoolEntry{std::make_unique<Item>(), nullptr, 0});
    counters_.bump(counters_.items_allocated);
    pending_entry_ = &item_pool_.back();
    return item_pool_.back().item.get();
  }

  // Introspection for audits and tests.
  std::size_t heap_size() const { return heap_.size(); }
  std::size_t item_pool_size() const { return item_pool_.size(); }
  std::size_t block_pool_size() const { return block_pool_.size(); }
  const Block* head_block() const { return head_block_; }
  const Block* tail_block() const { return tail_block_; }
  template <typename Fn>
  void for_each_pool_block(Fn&& fn) const {
    for (const auto& b : block_pool_) fn(*b);
  }

 private:
  struct PoolEntry {
    std::unique_ptr<Item> item;
    Block* housing_block = nullptr;
    std::uint64_t housing_epoch = 0;
  };

  static constexpr std::size_t kItemProbeLimit = 64;
  static constexpr std::uint64_t kSlotSpinCap = std::uint64_t{1} << 26;

  bool reusable(const PoolEntry& e) const {
    if (e.housing_block == nullptr) return false;  // in flight, never housed
    if (!e.item->is_taken()) return false;
    // Acquire pairs with cleanup's release bump: after it, re-initializing
    // the fields cannot race with any reader of the closed epoch.
    return e.housing_block->epoch_acquire() > e.housing_epoch;
  }

  void record_housing(Item* item, Block* block) {
    assert(pending_entry_ != nullptr && pending_entry_->item.get() == item);
    (void)item;
    pending_entry_->housing_block = block;
    // Stable during the put: this place is registered for every block at or
    // ahead of its head, so the epoch cannot close under us.
    pending_entry_->housing_epoch = block->epoch_relaxed();
    pending_entry_ = nullptr;
  }

  Storage* storage_;
  std::uint32_t id_;
  std::size_t block_size_;
  std::size_t tests_;
  bool fenced_;
  CounterRng rng_;

  std::size_t head_ = 0;
  Block* head_block_;
  Block* tail_block_;
  StrategyHeap<T, O> heap_;
  std::vector<PoolEntry> item_pool_;
  PoolEntry* pending_entry_ = nullptr;
  std::size_t item_cursor_ = 0;
  std::vector<std::unique_ptr<Block>> block_pool_;
  PerformanceCounters counters_;
};

}  // namespace centralk
