#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gpuport/coop/subwarp.hpp"
#include "gpuport/error.hpp"
#include "gpuport/simt/simulator.hpp"

namespace gpuport::kernels {

struct ReduceStats {
  std::uint32_t shuffle_ops = 0;  // shuffles issued by each lane
};

template <class T>
struct ReduceResult {
  T value;
  ReduceStats stats;
};

/// Butterfly reduction: shfl_xor with bitmask size/2, size/4, ..., 1. Every
/// lane of the subwarp ends up with the fold of all values after exactly
/// log2(size) shuffles.
template <coop::ShuffleScalar T, class Op = std::plus<>>
simt::Task<ReduceResult<T>> reduce_subwarp(coop::SubwarpGroup group, T value, Op op = {}) {
  ReduceStats stats;
  for (std::uint32_t bitmask = group.size() / 2; bitmask > 0; bitmask /= 2) {
    value = op(value, co_await group.shfl_xor(value, bitmask));
    ++stats.shuffle_ops;
  }
  co_return ReduceResult<T>{value, stats};
}

struct ReduceBenchResult {
  std::vector<double> subwarp_results;  // rank-0 value of each subwarp
  std::uint32_t shuffle_ops_per_lane = 0;
  std::uint32_t subwarps = 0;
};

/// Local reduction microbenchmark: one block with a lane per input value, in
/// which every subwarp of `subwarp_size` lanes performs `inner_loops`
/// averaging reductions of its lanes' values.
inline ReduceBenchResult reduce_microbench(simt::Simulator& sim, std::uint32_t subwarp_size,
                                           std::uint32_t inner_loops,
                                           std::span<const double> input) {
  const auto active = static_cast<std::uint32_t>(input.size());
  coop::check_group_size(subwarp_size, sim.config().warp_size());
  if (active % subwarp_size != 0) {
    throw InvalidConfig("reduce input length " + std::to_string(active) +
                        " is not a multiple of the subwarp size");
  }
  // Pad to whole warps; the padding lanes exit before the first collective.
  const auto warp = static_cast<std::uint32_t>(sim.config().warp_size());
  const std::uint32_t block = std::max(warp, (active + warp - 1) / warp * warp);
  ReduceBenchResult result;
  result.subwarps = active / subwarp_size;
  result.subwarp_results.assign(result.subwarps, 0.0);
  std::vector<std::uint32_t> ops(block, 0);
  std::span<double> out(result.subwarp_results);
  std::span<std::uint32_t> ops_out(ops);
  const double scale = 1.0 / subwarp_size;
  sim.launch_block(block, [&](simt::Lane& lane) -> simt::LaneTask {
    if (lane.tid() >= active) co_return;
    auto group = coop::tiled_partition(lane, subwarp_size);
    double value = lane.load(input, lane.tid());
    std::uint32_t shuffles = 0;
    for (std::uint32_t i = 0; i < inner_loops; ++i) {
      auto reduced = co_await reduce_subwarp(group, value);
      value = reduced.value * scale;
      shuffles += reduced.stats.shuffle_ops;
    }
    lane.store(ops_out, lane.tid(), shuffles);
    if (group.rank() == 0) lane.store(out, lane.tid() / subwarp_size, value);
  });
  result.shuffle_ops_per_lane = ops[0];
  return result;
}

}  // namespace gpuport::kernels
