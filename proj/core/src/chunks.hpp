#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "fhmix/parallel.hpp"

namespace fhmix::detail {

// Runs body(engine, normal, begin, end, acc) over the fixed chunk grid of n
// rows and sums the per-chunk accumulators in chunk order.
template <class Acc, class Body>
Acc reduce_chunks(std::size_t n, std::uint64_t seed, Parallelism par, Body&& body) {
  const std::size_t chunks = chunk_count(n);
  std::vector<Acc> partial(chunks);
  parallel_for_chunks(chunks, par, [&](std::size_t c) {
    Engine engine(split_seed(seed, c));
    std::normal_distribution<double> normal;
    const std::size_t begin = c * kChunkSize;
    const std::size_t end = std::min(n, begin + kChunkSize);
    body(engine, normal, begin, end, partial[c]);
  });
  Acc total{};
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace fhmix::detail
