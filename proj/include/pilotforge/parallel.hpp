#pragma once

#include <cstdint>
#include <random>

namespace pilotforge {

/// Thread cap from PILOTFORGE_THREADS, or the hardware count when unset/invalid.
int configured_threads();

/// Applies configured_threads() to the OpenMP runtime (no-op without OpenMP).
void apply_thread_limit();

/// Sets the OpenMP thread count directly (no-op without OpenMP).
void set_threads(int threads);
int max_threads();

/// Independent RNG stream for work item `index` under `seed`. The stream
/// depends only on the pair, never on which thread consumes it.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x70696c6fu};
  return std::mt19937_64(seq);
}

}  // namespace pilotforge
