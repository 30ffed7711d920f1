#include <gtest/gtest.h>

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "gpuport/coop/subwarp.hpp"

namespace gpuport::coop {
namespace {

using simt::Lane;
using simt::LaneTask;
using simt::Simulator;
using simt::WarpConfig;

WarpConfig config_for(int warp_size) {
  return warp_size == 32 ? WarpConfig::warp32() : WarpConfig::warp64();
}

TEST(Geometry, WorkedExamples) {
  auto g = subwarp_geometry(13, 32, 8);
  EXPECT_EQ(g.rank, 5u);
  EXPECT_EQ(g.lane_offset, 8u);
  EXPECT_EQ(g.mask.bits(), 0x0000FF00u);

  g = subwarp_geometry(5, 64, 4);
  EXPECT_EQ(g.rank, 1u);
  EXPECT_EQ(g.lane_offset, 4u);
  EXPECT_EQ(g.mask.bits(), 0xF0u);

  for (std::uint32_t tid = 0; tid < 32; ++tid) {
    g = subwarp_geometry(tid, 32, 32);
    EXPECT_EQ(g.lane_offset, 0u);
    EXPECT_EQ(g.mask.bits(), 0xFFFFFFFFu);
  }
}

TEST(Geometry, RejectsInvalidSizes) {
  EXPECT_THROW(subwarp_geometry(0, 32, 3), InvalidGroupSize);
  EXPECT_THROW(subwarp_geometry(0, 32, 0), InvalidGroupSize);
  EXPECT_THROW(subwarp_geometry(0, 32, 64), InvalidGroupSize);
  EXPECT_NO_THROW(subwarp_geometry(0, 64, 64));
}

// Mask built bit by bit from the lanes that share this lane's tile.
std::uint64_t oracle_mask(std::uint32_t tid, std::uint32_t warp, std::uint32_t size) {
  const std::uint32_t lane = tid % warp;
  std::uint64_t mask = 0;
  for (std::uint32_t other = 0; other < warp; ++other) {
    if (other / size == lane / size) mask |= std::uint64_t{1} << other;
  }
  return mask;
}

TEST(Geometry, AlgebraHoldsForEveryLane) {
  for (std::uint32_t warp : {32u, 64u}) {
    for (std::uint32_t size = 1; size <= warp; size *= 2) {
      for (std::uint32_t tid = 0; tid < 1024; ++tid) {
        const auto g = subwarp_geometry(tid, static_cast<int>(warp), size);
        ASSERT_EQ(g.lane_offset + g.rank, tid % warp);
        ASSERT_EQ(g.rank, tid % size);
        ASSERT_EQ(g.mask.count(), static_cast<int>(size));
        ASSERT_EQ(g.mask.bits(), oracle_mask(tid, warp, size));
      }
      // Tiles of one warp partition its lanes.
      std::uint64_t seen = 0;
      for (std::uint32_t first = 0; first < warp; first += size) {
        const auto bits = subwarp_geometry(first, static_cast<int>(warp), size).mask.bits();
        ASSERT_EQ(seen & bits, 0u);
        seen |= bits;
      }
      ASSERT_EQ(seen, warp == 64 ? ~std::uint64_t{0} : 0xFFFFFFFFull);
    }
  }
}

TEST(Popcnt, Overloads) {
  EXPECT_EQ(popcnt(std::uint32_t{0xF0}), 4);
  EXPECT_EQ(popcnt(std::uint32_t{0}), 0);
  EXPECT_EQ(popcnt(std::uint64_t{0xFFFFFFFFFFFFFFFFull}), 64);
  static_assert(std::is_same_v<lane_mask_type<32>, std::uint32_t>);
  static_assert(std::is_same_v<lane_mask_type<64>, std::uint64_t>);
}

// Runs one warp; each lane computes `body(group)` and stores the result.
template <class T, class Body>
std::vector<T> run_group(int warp_size, std::uint32_t size, Body body) {
  Simulator sim(config_for(warp_size));
  const auto n = static_cast<std::size_t>(warp_size);
  auto storage = std::make_unique<T[]>(n);  // vector<bool> has no span
  std::span<T> o(storage.get(), n);
  sim.launch_block(static_cast<std::uint32_t>(warp_size), [&](Lane& lane) -> LaneTask {
    auto group = tiled_partition(lane, size);
    T value = co_await body(group);
    lane.store(o, lane.tid(), value);
  });
  return std::vector<T>(o.begin(), o.end());
}

TEST(Shfl, BroadcastsFromSourceRank) {
  const std::vector<int> data{10, 20, 30, 40};
  auto from0 = run_group<std::int32_t>(32, 4, [&](SubwarpGroup& g) {
    return g.shfl(std::int32_t{data[g.rank()]}, 0);
  });
  auto from3 = run_group<std::int32_t>(32, 4, [&](SubwarpGroup& g) {
    return g.shfl(std::int32_t{data[g.rank()]}, 3);
  });
  for (int lane = 0; lane < 32; ++lane) {
    EXPECT_EQ(from0[lane], 10);
    EXPECT_EQ(from3[lane], 40);
  }
  auto single = run_group<double>(32, 1, [](SubwarpGroup& g) {
    return g.shfl(static_cast<double>(g.lane().tid()), 0);
  });
  for (int lane = 0; lane < 32; ++lane) EXPECT_EQ(single[lane], lane);
}

TEST(Shfl, RejectsSourceOutsideGroup) {
  Simulator sim(WarpConfig::warp32());
  EXPECT_THROW(sim.launch_block(32, [](Lane& lane) -> LaneTask {
    auto g = tiled_partition(lane, 4);
    co_await g.shfl(1.0, 4);
  }), InvalidSourceRank);
}

TEST(ShflXor, ExchangesByRankXorMask) {
  const std::vector<int> data{10, 20, 30, 40};
  auto swapped = run_group<std::int32_t>(32, 4, [&](SubwarpGroup& g) {
    return g.shfl_xor(std::int32_t{data[g.rank()]}, 1);
  });
  const std::vector<int> expected{20, 10, 40, 30};
  for (int lane = 0; lane < 32; ++lane) EXPECT_EQ(swapped[lane], expected[lane % 4]);

  auto same = run_group<std::int32_t>(32, 4, [&](SubwarpGroup& g) {
    return g.shfl_xor(std::int32_t{data[g.rank()]}, 0);
  });
  for (int lane = 0; lane < 32; ++lane) EXPECT_EQ(same[lane], data[lane % 4]);

  auto halves = run_group<std::uint32_t>(64, 8, [](SubwarpGroup& g) {
    return g.shfl_xor(g.rank(), 4);
  });
  for (std::uint32_t lane = 0; lane < 64; ++lane) {
    const std::uint32_t r = lane % 8;
    EXPECT_EQ(halves[lane], r < 4 ? r + 4 : r - 4);
  }
}

TEST(ShflXor, TwiceIsIdentity) {
  for (int warp : {32, 64}) {
    for (std::uint32_t size = 1; size <= static_cast<std::uint32_t>(warp); size *= 2) {
      for (std::uint32_t mask = 0; mask < size; ++mask) {
        Simulator sim(config_for(warp));
        std::vector<double> out(warp);
        std::span<double> o(out);
        sim.launch_block(warp, [&](Lane& lane) -> LaneTask {
          auto g = tiled_partition(lane, size);
          const double v = 1.5 * lane.tid();
          const double once = co_await g.shfl_xor(v, mask);
          lane.store(o, lane.tid(), co_await g.shfl_xor(once, mask));
        });
        for (int lane = 0; lane < warp; ++lane) ASSERT_EQ(out[lane], 1.5 * lane);
      }
    }
  }
}

TEST(Shfl, SupportsEveryScalarWidth) {
  auto i64 = run_group<std::int64_t>(64, 64, [](SubwarpGroup& g) {
    return g.shfl(std::int64_t{-(1ll << 40)} - g.rank(), 63);
  });
  EXPECT_EQ(i64[0], -(1ll << 40) - 63);
  auto f32 = run_group<float>(32, 16, [](SubwarpGroup& g) {
    return g.shfl_xor(0.25f * static_cast<float>(g.rank()), 15);
  });
  EXPECT_EQ(f32[0], 0.25f * 15);
  auto c64 = run_group<std::complex<float>>(32, 2, [](SubwarpGroup& g) {
    return g.shfl_xor(std::complex<float>(1.0f * g.rank(), -2.0f), 1);
  });
  EXPECT_EQ(c64[0], std::complex<float>(1.0f, -2.0f));
  auto c128 = run_group<std::complex<double>>(32, 4, [](SubwarpGroup& g) {
    return g.shfl(std::complex<double>(g.rank() + 0.5, -1.0 * g.rank()), 2);
  });
  EXPECT_EQ(c128[7], std::complex<double>(2.5, -2.0));
}

TEST(Ballot, MasksAndShiftsTheWarpBallot) {
  // Subwarp on lanes 4-7 with predicates 1,0,1,1 by rank.
  const std::vector<bool> preds{true, false, true, true};
  auto bits = run_group<std::uint64_t>(32, 4, [&](SubwarpGroup& g) {
    return g.ballot(preds[g.rank()]);
  });
  EXPECT_EQ(bits[4], 13u);
  EXPECT_EQ(bits[7], 13u);

  auto none = run_group<std::uint64_t>(32, 4, [](SubwarpGroup& g) { return g.ballot(false); });
  auto all8 = run_group<std::uint64_t>(64, 8, [](SubwarpGroup& g) { return g.ballot(true); });
  for (int lane = 0; lane < 32; ++lane) EXPECT_EQ(none[lane], 0u);
  for (int lane = 0; lane < 64; ++lane) EXPECT_EQ(all8[lane], 0xFFu);
}

TEST(AnyAll, DerivedFromBallot) {
  const std::vector<bool> preds{true, false, true, true};
  auto any = run_group<bool>(32, 4, [&](SubwarpGroup& g) { return g.any(preds[g.rank()]); });
  auto all = run_group<bool>(32, 4, [&](SubwarpGroup& g) { return g.all(preds[g.rank()]); });
  EXPECT_TRUE(any[0]);
  EXPECT_FALSE(all[0]);
  auto any_f = run_group<bool>(32, 4, [](SubwarpGroup& g) { return g.any(false); });
  auto all_f = run_group<bool>(32, 4, [](SubwarpGroup& g) { return g.all(false); });
  auto any_t = run_group<bool>(64, 64, [](SubwarpGroup& g) { return g.any(true); });
  auto all_t = run_group<bool>(64, 64, [](SubwarpGroup& g) { return g.all(true); });
  EXPECT_FALSE(any_f[0]);
  EXPECT_FALSE(all_f[0]);
  EXPECT_TRUE(any_t[63]);
  EXPECT_TRUE(all_t[63]);
}

// Per-rank outputs of a mixed collective sequence, for warp-size comparisons.
std::vector<double> collective_trace(int warp, std::uint32_t size) {
  Simulator sim(config_for(warp));
  std::vector<double> out(static_cast<std::size_t>(warp) * 4);
  std::span<double> o(out);
  sim.launch_block(warp, [&](Lane& lane) -> LaneTask {
    auto g = tiled_partition(lane, size);
    const double v = 3.0 * g.rank() + 1.0;
    const bool pred = g.rank() % 3 == 0;
    lane.store(o, 4 * lane.tid(), co_await g.shfl(v, size - 1));
    lane.store(o, 4 * lane.tid() + 1, co_await g.shfl_xor(v, size / 2));
    lane.store(o, 4 * lane.tid() + 2, static_cast<double>(co_await g.ballot(pred)));
    lane.store(o, 4 * lane.tid() + 3, (co_await g.any(pred)) + 2.0 * (co_await g.all(pred)));
  });
  out.resize(4 * size);  // first subwarp's ranks
  return out;
}

TEST(WarpSizeAgnosticism, SameSubwarpSameOutputs) {
  for (std::uint32_t size = 1; size <= 32; size *= 2) {
    EXPECT_EQ(collective_trace(32, size), collective_trace(64, size)) << size;
  }
}

TEST(Instrumentation, CountsSubwarpInstructions) {
  Simulator sim(WarpConfig::warp32());
  sim.launch_block(32, [](Lane& lane) -> LaneTask {
    auto g = tiled_partition(lane, 8);
    co_await g.shfl_xor(1.0, 1);
    co_await g.ballot(true);
  });
  EXPECT_EQ(sim.counters().shuffles, 4u);  // one per subwarp
  EXPECT_EQ(sim.counters().lane_shuffles, 32u);
  EXPECT_EQ(sim.counters().ballots, 4u);
  EXPECT_EQ(sim.counters().lane_ballots, 32u);
}

}  // namespace
}  // namespace gpuport::coop
