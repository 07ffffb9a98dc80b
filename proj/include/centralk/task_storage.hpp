#pragma once

#include <atomic>
#include <cassert>
#include <cstddef>
#include <memory>

#include "centralk/config.hpp"
#include "centralk/data_block.hpp"

namespace centralk {

/// The shared singleton: the global tail index plus the entry block of the
/// linked-list array. tail is monotone; every index below it resolves to a
/// published item (the fill guarantee).
///
/// Indices are 64-bit counters and are never reused; wraparound is out of
/// scope for desk-scale runs (guarded by an assertion well below the limit).
template <typename T, typename O>
class TaskStorage {
 public:
  using Block = DataBlock<T, O>;

  TaskStorage(std::size_t num_places, const Config& cfg)
      : num_places_(num_places),
        config_(cfg),
        start_block_(std::make_unique<Block>(cfg.block_size)) {
    cfg.validate();
    start_block_->init_as_start_block(num_places);
  }

  std::size_t num_places() const { return num_places_; }
  const Config& config() const { return config_; }
  Block* start_block() const { return start_block_.get(); }

  /// Raise tail to cur_tail unless it is already there or past it. The
  /// signed-difference guard makes a lagging caller a no-op, preserving
  /// monotonicity. Weak CAS suffices: the loop runs until this or some other
  /// thread has covered cur_tail. The release pairs with observe_tail's
  /// acquire so slot contents below tail are visible to consumers.
  void advance_tail(std::size_t cur_tail) {
    assert(cur_tail < kIndexWrapGuard && "global index approaching wraparound");
    std::size_t observed = tail_.load(O::relaxed);
    auto diff = static_cast<std::ptrdiff_t>(cur_tail) -
                static_cast<std::ptrdiff_t>(observed);
    while (diff > 0) {
      O::interleave_point();
      assert(cur_tail > observed);
      if (tail_.compare_exchange_weak(observed, cur_tail, O::release,
                                      O::relaxed)) {
        break;
      }
      diff = static_cast<std::ptrdiff_t>(cur_tail) -
             static_cast<std::ptrdiff_t>(observed);
    }
  }

  /// Consumer-side read. Synchronizes with advance_tail: for the returned t,
  /// every slot below t is published and the items behind those slots have
  /// fully visible immutable fields.
  std::size_t observe_tail() const { return tail_.load(O::acquire); }

  /// Push-side read; may lag, which only widens the region a put traverses.
  std::size_t tail_relaxed() const { return tail_.load(O::relaxed); }

  static constexpr std::size_t kIndexWrapGuard = std::size_t{1} << 62;

 private:
  alignas(64) std::atomic<std::size_t> tail_{0};
  std::size_t num_places_;
  Config config_;
  std::unique_ptr<Block> start_block_;
};

}  // namespace centralk
