#pragma once

#include <cstdint>
#include <cstddef>

namespace centralk {

/// Per-task scheduling metadata: a priority key (higher runs earlier) and the
/// relaxation bound k, the number of newest tasks a consumer may miss on
/// account of this task. Both are fixed when the task is pushed.
struct Strategy {
  std::int64_t priority = 0;
  std::size_t k = 0;
};

}  // namespace centralk
