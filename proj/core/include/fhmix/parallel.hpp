#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace fhmix {

/// Samples are produced in fixed-size chunks; each chunk owns an engine
/// seeded from (stream seed, chunk index), so output never depends on how
/// chunks are spread over threads.
inline constexpr std::size_t kChunkSize = 4096;

/// Engine used for every chunk.
using Engine = std::mt19937_64;

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Child seed for `index` under `seed`: mix64(seed ^ mix64(index)).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

struct Parallelism {
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;

  unsigned resolved() const;
};

/// Runs body(chunk) for chunk in [0, chunks) on up to `par.resolved()`
/// threads. The first exception thrown by any chunk is rethrown.
void parallel_for_chunks(std::size_t chunks, Parallelism par,
                         const std::function<void(std::size_t)>& body);

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

}  // namespace fhmix
