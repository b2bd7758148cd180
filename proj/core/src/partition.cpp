#include <numeric>
#include <string>
#include <vector>

#include "decopt/errors.hpp"
#include "decopt/harness.hpp"
#include "decopt/rng.hpp"

namespace decopt {

std::vector<DatasetShard> partition_dataset(const Dataset& data, int nodes, int components,
                                            std::uint64_t seed, bool allow_empty) {
  if (nodes < 1 || components < 1) throw InvalidArgument("m and n must be positive");
  const auto rows = static_cast<std::int64_t>(data.rows());
  if (data.labels.size() != data.rows()) throw InvalidArgument("label count mismatch");
  if (static_cast<std::int64_t>(nodes) * components > rows && !allow_empty) {
    throw InvalidArgument("m * n = " + std::to_string(static_cast<std::int64_t>(nodes) * components) +
                          " exceeds the " + std::to_string(rows) + " dataset rows");
  }

  // Fisher-Yates with uniform01 keeps the permutation library independent.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto gen = substream(seed, 0, kSharedNode, StreamPurpose::kPartition);
  for (std::int64_t i = rows - 1; i > 0; --i) {
    auto j = static_cast<std::int64_t>(uniform01(gen) * static_cast<double>(i + 1));
    if (j > i) j = i;
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  std::vector<DatasetShard> shards(static_cast<std::size_t>(nodes));
  const std::int64_t base = rows / nodes;
  const std::int64_t extra = rows % nodes;
  std::int64_t offset = 0;
  for (int i = 0; i < nodes; ++i) {
    const std::int64_t count = base + (i < extra ? 1 : 0);
    auto& shard = shards[static_cast<std::size_t>(i)];
    shard.node = i;
    shard.blocks.resize(static_cast<std::size_t>(components));
    for (int j = 0; j < components; ++j) {
      const std::int64_t size = count / components + (j < count % components ? 1 : 0);
      auto& block = shard.blocks[static_cast<std::size_t>(j)];
      block.features.resize(size, data.dim());
      block.labels.resize(size);
    }
    for (std::int64_t t = 0; t < count; ++t) {
      const Eigen::Index src = order[static_cast<std::size_t>(offset + t)];
      auto& block = shard.blocks[static_cast<std::size_t>(t % components)];
      const Eigen::Index dst = t / components;
      block.features.row(dst) = data.features.row(src);
      block.labels(dst) = data.labels(src);
    }
    offset += count;
  }
  return shards;
}

}  // namespace decopt
