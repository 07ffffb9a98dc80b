#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace centralk {

/// How a place establishes the happens-before edge between a block's cleanup
/// and its re-link:
///   acquire_load: add_block starts with an acquire load of the active flag
///                  (value ignored; it synchronizes with cleanup's release).
///   fence:        is_reusable issues an acquire fence when it observes the
///                  flag false, and add_block skips the extra load.
enum class Handshake { acquire_load, fence };

inline const char* to_string(Handshake h) {
  return h == Handshake::acquire_load ? "acquire" : "fence";
}

struct Config {
  /// Slots per block. Power of two recommended; must be >= 2.
  std::size_t block_size = 128;
  /// Probe budget per put window; 0 means block_size. Values below the
  /// largest window (block_size) let put skip windows that still contain
  /// empty slots, which voids the fill guarantee; experimentation only.
  std::size_t tests = 0;
  Handshake handshake = Handshake::acquire_load;
  /// Base seed for the per-place probe-draw streams.
  std::uint64_t seed = 0xC0FFEE;
  /// Scheduler: abort with a diagnostic dump if no pop succeeds anywhere for
  /// this long while tasks are outstanding. 0 disables the watchdog.
  std::uint32_t watchdog_ms = 30000;
  /// Scheduler: cap on the empty-pop backoff sleep.
  std::uint32_t backoff_cap_us = 500;

  std::size_t resolved_tests() const { return tests == 0 ? block_size : tests; }

  void validate() const {
    if (block_size < 2) throw std::invalid_argument("block_size must be >= 2");
  }
};

}  // namespace centralk
