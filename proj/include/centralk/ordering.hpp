#pragma once

#include <atomic>

// ThreadSanitizer does not model atomic_thread_fence; fence-based
// synchronization raises false positives under it. Detector builds swap the
// fences for equivalent-or-stronger per-object orderings (see call sites).
#if defined(__SANITIZE_THREAD__)
#define CENTRALK_TSAN 1
#elif defined(__has_feature)
#if __has_feature(thread_sanitizer)
#define CENTRALK_TSAN 1
#endif
#endif

namespace centralk {

/// Memory-ordering policy threaded through every atomic access of the task
/// storage. The algorithm body is shared; only the constants differ.
///
/// RelaxedOrdering is the acquire/release scheme the structure is designed
/// around. Per-access ledger:
///
///   item.position            all accesses relaxed
///   slot (block data cell)   probe load relaxed; publish CAS strong,
///                            release on success / relaxed on failure;
///                            consumer load acquire; cleanup store relaxed
///   storage.tail             push-side load relaxed; advance CAS weak,
///                            release/relaxed; consumer load acquire
///   block.next               link CAS weak, release/relaxed; walk loads in
///                            push/update_heap/deregister_old_blocks acquire;
///                            cleanup store relaxed
///   block.active             is_reusable load relaxed (fence variant adds an
///                            acquire fence on false); add_block load acquire
///                            (value ignored, pairs with cleanup's release),
///                            stores relaxed; cleanup store release
///   block.active_threads     store relaxed; fetch_sub relaxed
///
/// StrictOrdering upgrades every access to seq_cst and re-adds the explicit
/// fence between the cleanup stores, emulating the pre-C++11-style build for
/// differential testing.
struct RelaxedOrdering {
  static constexpr const char* name = "relaxed";
  static constexpr std::memory_order relaxed = std::memory_order_relaxed;
  static constexpr std::memory_order acquire = std::memory_order_acquire;
  static constexpr std::memory_order release = std::memory_order_release;
  static constexpr bool seq_cst_cleanup_fence = false;

  // Hook for schedule-perturbing test policies; a no-op here, so production
  // instantiations compile to nothing.
  static void interleave_point() noexcept {}
};

struct StrictOrdering {
  static constexpr const char* name = "strict";
  static constexpr std::memory_order relaxed = std::memory_order_seq_cst;
  static constexpr std::memory_order acquire = std::memory_order_seq_cst;
  static constexpr std::memory_order release = std::memory_order_seq_cst;
  static constexpr bool seq_cst_cleanup_fence = true;

  static void interleave_point() noexcept {}
};

}  // namespace centralk
