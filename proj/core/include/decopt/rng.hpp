#pragma once

#include <cstdint>
#include <random>

namespace decopt {

/// Purposes for which independent random substreams are drawn.
enum class StreamPurpose : std::uint64_t {
  kBatch = 1,
  kSnapshotCoin = 2,
  kRestartCoin = 3,
  kGraph = 4,
  kPartition = 5,
  kProbe = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based substream keyed by (seed, step, node, purpose). The same key
/// always yields the same engine state, so evaluation order across nodes
/// cannot change results.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t step,
                          std::uint64_t node, StreamPurpose purpose);

/// Node id used for draws shared by all nodes.
inline constexpr std::uint64_t kSharedNode = ~std::uint64_t{0};

/// Uniform double in [0, 1) from the top 53 bits; unlike
/// std::uniform_real_distribution this is identical across standard libraries.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace decopt
