#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace concomitant {

/// Runs body(i) for i in [0, count) on up to `threads` worker threads.
/// The first exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

/// Seed for an independent substream, derived from (master, stream) through
/// std::seed_seq so that neighbouring stream indices give unrelated generators.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace concomitant
