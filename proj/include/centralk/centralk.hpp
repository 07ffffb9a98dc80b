#pragma once

// k-relaxed central task storage: a global block-list array shared by all
// threads plus per-thread places with local priority heaps, built entirely on
// acquire/release and relaxed atomics.

#include "centralk/config.hpp"
#include "centralk/counters.hpp"
#include "centralk/data_block.hpp"
#include "centralk/item.hpp"
#include "centralk/ordering.hpp"
#include "centralk/place.hpp"
#include "centralk/rng.hpp"
#include "centralk/scheduler.hpp"
#include "centralk/strategy.hpp"
#include "centralk/task_storage.hpp"
