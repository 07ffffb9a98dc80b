#include "centralk/place.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "centralk/ordering.hpp"
#include "centralk/task_storage.hpp"

namespace {

using centralk::Config;
using centralk::RelaxedOrdering;
using centralk::Strategy;
using Storage = centralk::TaskStorage<std::uint64_t, RelaxedOrdering>;
using Place = centralk::Place<std::uint64_t, RelaxedOrdering>;

Config config_with(std::size_t block_size) {
  Config cfg;
  cfg.block_size = block_size;
  return cfg;
}

TEST(StrategyHeap, PopOrderMatchesSortReference) {
  centralk::StrategyHeap<std::uint64_t, RelaxedOrdering> heap;
  centralk::CounterRng rng(5, 5);
  struct Ref {
    std::int64_t priority;
    std::uint64_t payload;
    std::uint64_t seq;
  };
  std::vector<Ref> ref;
  for (std::uint64_t seq = 0; seq < 300; ++seq) {
    const auto priority = static_cast<std::int64_t>(rng.uniform_below(10)) - 5;
    const std::uint64_t payload = rng.uniform_below(5);
    heap.push(priority, nullptr, 0, payload);
    ref.push_back({priority, payload, seq});
  }
  std::sort(ref.begin(), ref.end(), [](const Ref& a, const Ref& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    if (a.payload != b.payload) return a.payload < b.payload;
    return a.seq < b.seq;
  });
  for (const Ref& want : ref) {
    ASSERT_FALSE(heap.empty());
    const auto got = heap.pop_top();
    ASSERT_EQ(got.priority, want.priority);
    ASSERT_EQ(got.payload, want.payload);
    ASSERT_EQ(got.seq, want.seq);
  }
  EXPECT_TRUE(heap.empty());
}

TEST(PlacePush, PlacementStaysWithinRelaxationWindow) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (std::size_t k : {std::size_t{0}, std::size_t{1}, std::size_t{3},
                          std::size_t{100}}) {
      Config cfg = config_with(8);
      cfg.seed = seed;
      Storage storage(1, cfg);
      Place place(storage, 0);
      place.push(Strategy{0, k}, 7);
      auto* item =
          storage.start_block()->slot(0).load(std::memory_order_relaxed);
      std::size_t pos = 0;
      for (std::size_t i = 0; i < 8; ++i) {
        if (auto* it = storage.start_block()->slot(i).load(
                std::memory_order_relaxed)) {
          item = it;
          pos = i;
        }
      }
      ASSERT_NE(item, nullptr);
      // First push probes the window based at 0, clipped to the block.
      EXPECT_LE(pos, std::min(k, std::size_t{7}))
          << "seed " << seed << " k " << k;
      EXPECT_EQ(item->orig_position, pos);
    }
  }
}

TEST(PlacePush, FirstStrictPushLandsAtIndexZero) {
  Storage storage(1, config_with(4));
  Place place(storage, 0);
  place.push(Strategy{7, 0}, 111);

  auto* item = storage.start_block()->slot(0).load(std::memory_order_relaxed);
  ASSERT_NE(item, nullptr);
  EXPECT_EQ(item->payload, 111u);
  EXPECT_EQ(item->orig_position, 0u);
  EXPECT_EQ(place.heap_size(), 1u) << "pusher sees its own task";
  // tail stays at the window base; the pushed item is visible to its pusher
  // through the heap even though it sits at the tail itself.
  EXPECT_EQ(storage.observe_tail(), 0u);
}

TEST(PlacePush, FullBlockLinksSuccessorWithNextOffset) {
  Storage storage(1, config_with(2));
  Place place(storage, 0);
  for (int i = 0; i < 3; ++i) place.push(Strategy{0, 0}, i);

  auto* b0 = storage.start_block();
  auto* b1 = b0->next_relaxed();
  ASSERT_NE(b1, nullptr);
  EXPECT_EQ(b1->offset(), 2u);
  auto* item = b1->slot(0).load(std::memory_order_relaxed);
  ASSERT_NE(item, nullptr);
  EXPECT_EQ(item->payload, 2u);
  EXPECT_EQ(snapshot(place.counters()).blocks_linked, 1u);
  EXPECT_EQ(place.tail_block(), b1);
}

TEST(PlacePop, SinglePlaceDrainsOwnPushesByPriority) {
  Storage storage(1, config_with(8));
  Place place(storage, 0);
  const std::int64_t priorities[] = {1, 5, 3, 2, 4};
  for (std::int64_t p : priorities)
    place.push(Strategy{p, 4}, static_cast<std::uint64_t>(p));

  std::vector<std::uint64_t> order;
  while (auto payload = place.pop()) order.push_back(*payload);
  EXPECT_EQ(order, (std::vector<std::uint64_t>{5, 4, 3, 2, 1}));
  EXPECT_TRUE(place.pop() == std::nullopt) << "drained place signals empty";
  EXPECT_EQ(snapshot(place.counters()).pop_empties, 2u);
}

TEST(PlaceUpdateHeap, NoopWhenHeadEqualsTail) {
  Storage storage(2, config_with(4));
  Place a(storage, 0), b(storage, 1);
  b.update_heap();
  EXPECT_EQ(b.heap_size(), 0u);
  EXPECT_EQ(b.head(), 0u);
}

TEST(PlaceUpdateHeap, GainsForeignUntakenItemsBelowTail) {
  Storage storage(2, config_with(8));
  Place a(storage, 0), b(storage, 1);
  // k=0 pushes: after 4 pushes tail is 3, exposing the first 3 items.
  for (int i = 0; i < 4; ++i) a.push(Strategy{1, 0}, 10 + i);

  b.update_heap();
  EXPECT_EQ(b.heap_size(), 3u);
  EXPECT_EQ(b.head(), 3u);
}

TEST(PlaceUpdateHeap, SkipsTakenForeignItemsButAdvancesHead) {
  Storage storage(2, config_with(8));
  Place a(storage, 0), b(storage, 1);
  a.push(Strategy{10, 0}, 100);  // highest priority, taken below
  a.push(Strategy{1, 0}, 101);
  a.push(Strategy{1, 0}, 102);
  a.push(Strategy{1, 0}, 103);
  ASSERT_EQ(a.pop(), std::optional<std::uint64_t>(100));

  b.update_heap();
  EXPECT_EQ(b.heap_size(), 2u) << "taken item skipped";
  EXPECT_EQ(b.head(), 3u) << "head advances past taken items";
}

TEST(PlaceUpdateHeap, OwnItemsAreNotReinserted) {
  Storage storage(1, config_with(8));
  Place a(storage, 0);
  for (int i = 0; i < 4; ++i) a.push(Strategy{1, 0}, i);
  ASSERT_EQ(a.heap_size(), 4u);
  a.update_heap();  // walks head over own items
  EXPECT_EQ(a.heap_size(), 4u);
  EXPECT_EQ(a.head(), 3u);
}

TEST(PlacePop, DiscardsEntriesTakenByAnotherPlace) {
  Storage storage(2, config_with(8));
  Place a(storage, 0), b(storage, 1);
  a.push(Strategy{10, 0}, 200);
  a.push(Strategy{1, 0}, 201);
  a.push(Strategy{1, 0}, 202);
  a.push(Strategy{1, 0}, 203);

  b.update_heap();
  ASSERT_EQ(b.heap_size(), 3u);
  // A (the owner) takes the top item first.
  ASSERT_EQ(a.pop(), std::optional<std::uint64_t>(200));
  // B's heap head is now stale; pop discards it and returns the next one.
  EXPECT_EQ(b.pop(), std::optional<std::uint64_t>(201));
  EXPECT_EQ(snapshot(b.counters()).heap_discards, 1u);
}

TEST(PlacePop, TwoPlacesConsumeEachItemExactlyOnce) {
  Storage storage(2, config_with(4));
  Place a(storage, 0), b(storage, 1);
  for (int i = 0; i < 8; ++i) a.push(Strategy{i, 2}, 1000 + i);

  std::multiset<std::uint64_t> popped;
  for (;;) {
    auto pa = a.pop();
    if (pa) popped.insert(*pa);
    auto pb = b.pop();
    if (pb) popped.insert(*pb);
    if (!pa && !pb) break;
  }
  std::multiset<std::uint64_t> expected;
  for (int i = 0; i < 8; ++i) expected.insert(1000 + i);
  EXPECT_EQ(popped, expected);
}

TEST(PlaceDeregister, CrossingOneBlockDeregistersItOnce) {
  Storage storage(2, config_with(2));
  Place a(storage, 0), b(storage, 1);
  for (int i = 0; i < 3; ++i) a.push(Strategy{0, 0}, i);  // tail = 2

  auto* b0 = storage.start_block();
  ASSERT_EQ(b0->active_threads_relaxed(), 2u);
  b.update_heap();  // head 0 -> 2, leaves block 0
  EXPECT_EQ(b.head(), 2u);
  EXPECT_EQ(b0->active_threads_relaxed(), 1u);
  EXPECT_EQ(b.head_block()->offset(), 2u);
  b.update_heap();  // no boundary crossed again
  EXPECT_EQ(b0->active_threads_relaxed(), 1u);
}

TEST(PlaceDeregister, HeadJumpingTwoBlocksDeregistersBoth) {
  Storage storage(2, config_with(2));
  Place a(storage, 0), b(storage, 1);
  for (int i = 0; i < 5; ++i) a.push(Strategy{0, 0}, i);  // tail = 4

  auto* b0 = storage.start_block();
  auto* b1 = b0->next_relaxed();
  ASSERT_NE(b1, nullptr);
  b.update_heap();  // head 0 -> 4 in one call
  EXPECT_EQ(b.head(), 4u);
  EXPECT_EQ(b0->active_threads_relaxed(), 1u);
  EXPECT_EQ(b1->active_threads_relaxed(), 1u);
  EXPECT_EQ(b.head_block()->offset(), 4u);
}

TEST(PlaceDeregister, NoBoundaryNoDeregister) {
  Storage storage(2, config_with(4));
  Place a(storage, 0), b(storage, 1);
  a.push(Strategy{0, 0}, 1);
  b.update_heap();
  EXPECT_EQ(storage.start_block()->active_threads_relaxed(), 2u);
}

TEST(PlaceBlockPool, AllocatesWhenEmptyOrAllActive) {
  Storage storage(1, config_with(2));
  Place place(storage, 0);
  auto* first = place.acquire_block();
  ASSERT_NE(first, nullptr);
  EXPECT_EQ(place.block_pool_size(), 1u);

  // Activate it (link behind start); the next acquire must allocate fresh.
  ASSERT_TRUE(storage.start_block()->add_block(first, 1, false));
  auto* second = place.acquire_block();
  EXPECT_NE(second, first);
  EXPECT_EQ(place.block_pool_size(), 2u);
  const auto counters = snapshot(place.counters());
  EXPECT_EQ(counters.blocks_allocated, 2u);
  EXPECT_EQ(counters.blocks_reused, 0u);
}

TEST(PlaceBlockPool, ReusesDeregisteredBlock) {
  Storage storage(1, config_with(2));
  Place place(storage, 0);
  // Drive a full cycle: fill two blocks and consume past them.
  for (int i = 0; i < 5; ++i) place.push(Strategy{0, 0}, i);
  while (place.pop()) {
  }
  // Blocks fully behind head are cleaned; the pool must hand one back.
  const auto before = snapshot(place.counters());
  ASSERT_GE(place.block_pool_size(), 1u);
  auto* reused = place.acquire_block();
  ASSERT_NE(reused, nullptr);
  const auto after = snapshot(place.counters());
  EXPECT_EQ(after.blocks_reused, before.blocks_reused + 1);
  EXPECT_EQ(after.blocks_allocated, before.blocks_allocated);
}

TEST(PlaceItemPool, FreshAllocationThenLifecycleReuse) {
  Storage storage(1, config_with(2));
  Place place(storage, 0);
  EXPECT_EQ(place.item_pool_size(), 0u);

  // Push/pop past the first block so its epoch closes.
  for (int i = 0; i < 3; ++i) place.push(Strategy{0, 0}, i);
  while (place.pop()) {
  }
  ASSERT_EQ(storage.start_block()->epoch_relaxed(), 1u);

  const auto before = snapshot(place.counters());
  const std::size_t pool_before = place.item_pool_size();
  place.push(Strategy{0, 0}, 99);
  const auto after = snapshot(place.counters());
  EXPECT_EQ(after.items_reused, before.items_reused + 1)
      << "taken item from a closed epoch must be reused";
  EXPECT_EQ(place.item_pool_size(), pool_before);
}

TEST(PlaceItemPool, LaggingForeignPlaceBlocksReuse) {
  Storage storage(2, config_with(2));
  Place a(storage, 0), b(storage, 1);  // b never consumes
  for (int i = 0; i < 3; ++i) a.push(Strategy{0, 0}, i);
  while (a.pop()) {
  }
  // a deregistered the first block but b did not: no cleanup, no reuse.
  ASSERT_EQ(storage.start_block()->epoch_relaxed(), 0u);
  const auto before = snapshot(a.counters());
  a.push(Strategy{0, 0}, 99);
  const auto after = snapshot(a.counters());
  EXPECT_EQ(after.items_reused, before.items_reused);
  EXPECT_EQ(after.items_allocated, before.items_allocated + 1);
}

}  // namespace
