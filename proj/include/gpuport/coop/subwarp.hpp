#pragma once

// Cross-platform subwarp cooperative groups.
//
// A subwarp is a contiguous power-of-two tile of a warp. For local thread id
// `tid` and warp size `W`:
//
//   Rank       = tid % Size
//   LaneOffset = floor((tid % W) / Size) * Size
//   Mask       = (~0 >> (W - Size)) << LaneOffset     (~0 is W bits wide)
//
// ballot/any/all are derived from the warp-wide ballot by masking with Mask
// and shifting by LaneOffset, so the same code serves 32- and 64-lane warps.

#include <bit>
#include <complex>
#include <concepts>
#include <cstdint>
#include <source_location>
#include <string>
#include <type_traits>

#include "gpuport/error.hpp"
#include "gpuport/simt/simulator.hpp"
#include "gpuport/simt/warp_config.hpp"

namespace gpuport::coop {

/// Geometry of the subwarp that contains one lane.
struct SubwarpGeometry {
  std::uint32_t size = 1;
  std::uint32_t rank = 0;
  std::uint32_t lane_offset = 0;
  simt::LaneMask mask;
  std::uint32_t warp_size = 32;

  friend bool operator==(const SubwarpGeometry&, const SubwarpGeometry&) = default;
};

inline void check_group_size(std::uint32_t size, int warp_size) {
  if (!is_power_of_two(size) || size > static_cast<std::uint32_t>(warp_size)) {
    throw InvalidGroupSize("subwarp size " + std::to_string(size) +
                           " must be a power of two no larger than the warp size " +
                           std::to_string(warp_size));
  }
}

inline SubwarpGeometry subwarp_geometry(std::uint32_t tid, int warp_size,
                                        std::uint32_t size) {
  check_group_size(size, warp_size);
  const auto warp = static_cast<std::uint32_t>(warp_size);
  const std::uint64_t all_ones =
      warp == 64 ? ~std::uint64_t{0} : std::uint64_t{0xFFFFFFFFu};
  SubwarpGeometry g;
  g.size = size;
  g.rank = tid % size;
  g.lane_offset = (tid % warp) / size * size;
  g.mask = simt::LaneMask((all_ones >> (warp - size)) << g.lane_offset, warp_size);
  g.warp_size = warp;
  return g;
}

/// Scalars that fit one shuffle. Two-component types travel as an element
/// pair within the same rendezvous.
template <class T>
concept ShuffleScalar =
    std::same_as<T, std::int32_t> || std::same_as<T, std::uint32_t> ||
    std::same_as<T, std::int64_t> || std::same_as<T, std::uint64_t> ||
    std::same_as<T, float> || std::same_as<T, double> ||
    std::same_as<T, std::complex<float>> || std::same_as<T, std::complex<double>>;

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class T>
std::uint64_t to_bits(T value) {
  if constexpr (sizeof(T) == 4) {
    return std::bit_cast<std::uint32_t>(value);
  } else {
    return std::bit_cast<std::uint64_t>(value);
  }
}

template <class T>
T from_bits(std::uint64_t bits) {
  if constexpr (sizeof(T) == 4) {
    return std::bit_cast<T>(static_cast<std::uint32_t>(bits));
  } else {
    return std::bit_cast<T>(bits);
  }
}

// complex<float> packs into one word; complex<double> needs two.
template <class T>
constexpr bool needs_pair = std::same_as<T, std::complex<double>>;

template <class T>
std::uint64_t encode(T value) {
  if constexpr (std::same_as<T, std::complex<float>>) {
    return to_bits(value.real()) | (to_bits(value.imag()) << 32);
  } else if constexpr (std::same_as<T, std::complex<double>>) {
    return to_bits(value.real());
  } else {
    return to_bits(value);
  }
}

template <class T>
T decode(std::uint64_t word, std::uint64_t word2) {
  if constexpr (std::same_as<T, std::complex<float>>) {
    return {from_bits<float>(word & 0xFFFFFFFFu), from_bits<float>(word >> 32)};
  } else if constexpr (std::same_as<T, std::complex<double>>) {
    return {from_bits<double>(word), from_bits<double>(word2)};
  } else {
    return from_bits<T>(word);
  }
}

}  // namespace detail

/// Awaitable result of a subwarp collective.
template <class Result, class Finish>
struct GroupAwaiter {
  simt::Lane::CollectiveAwaiter inner;
  Finish finish;

  bool await_ready() const noexcept { return false; }
  void await_suspend(std::coroutine_handle<> h) noexcept { inner.await_suspend(h); }
  Result await_resume() const { return finish(inner.await_resume()); }
};

/// A lane's handle on its subwarp. Collectives must be `co_await`ed by every
/// active lane of the subwarp at the same call site.
class SubwarpGroup {
 public:
  SubwarpGroup(simt::Lane& lane, SubwarpGeometry geometry)
      : lane_(&lane), geometry_(geometry) {}

  std::uint32_t size() const noexcept { return geometry_.size; }
  std::uint32_t rank() const noexcept { return geometry_.rank; }
  std::uint32_t thread_rank() const noexcept { return geometry_.rank; }
  std::uint32_t lane_offset() const noexcept { return geometry_.lane_offset; }
  simt::LaneMask mask() const noexcept { return geometry_.mask; }
  std::uint32_t warp_size() const noexcept { return geometry_.warp_size; }
  const SubwarpGeometry& geometry() const noexcept { return geometry_; }
  simt::Lane& lane() const noexcept { return *lane_; }

  /// Every lane receives `data` of the lane with rank `src_rank`.
  template <ShuffleScalar T>
  auto shfl(T data, std::uint32_t src_rank,
            std::source_location loc = std::source_location::current()) {
    if (src_rank >= size()) {
      throw InvalidSourceRank("shfl source rank " + std::to_string(src_rank) +
                              " outside subwarp of size " + std::to_string(size()));
    }
    return shuffle<T>(simt::CollectiveKind::shfl, data, src_rank, loc);
  }

  /// Lane of rank r receives `data` of rank r ^ bitmask.
  template <ShuffleScalar T>
  auto shfl_xor(T data, std::uint32_t bitmask,
                std::source_location loc = std::source_location::current()) {
    if (bitmask >= size()) {
      throw InvalidSourceRank("shfl_xor bitmask " + std::to_string(bitmask) +
                              " outside subwarp of size " + std::to_string(size()));
    }
    return shuffle<T>(simt::CollectiveKind::shfl_xor, data, bitmask, loc);
  }

  /// Bit i of the result is the predicate of rank i.
  auto ballot(bool predicate,
              std::source_location loc = std::source_location::current()) {
    const std::uint64_t mask = geometry_.mask.bits();
    const std::uint32_t offset = geometry_.lane_offset;
    auto finish = [mask, offset](std::uint64_t warp_ballot) {
      return (warp_ballot & mask) >> offset;
    };
    return GroupAwaiter<std::uint64_t, decltype(finish)>{vote(predicate, loc), finish};
  }

  auto any(bool predicate, std::source_location loc = std::source_location::current()) {
    const std::uint64_t mask = geometry_.mask.bits();
    auto finish = [mask](std::uint64_t warp_ballot) { return (warp_ballot & mask) != 0; };
    return GroupAwaiter<bool, decltype(finish)>{vote(predicate, loc), finish};
  }

  auto all(bool predicate, std::source_location loc = std::source_location::current()) {
    const std::uint64_t mask = geometry_.mask.bits();
    auto finish = [mask](std::uint64_t warp_ballot) {
      return (warp_ballot & mask) == mask;
    };
    return GroupAwaiter<bool, decltype(finish)>{vote(predicate, loc), finish};
  }

 private:
  simt::CollectiveRequest request(simt::CollectiveKind kind,
                                  const std::source_location& loc) const {
    simt::CollectiveRequest r;
    r.kind = kind;
    r.group_offset = geometry_.lane_offset;
    r.group_size = geometry_.size;
    r.site = simt::CallSite::from(loc);
    return r;
  }

  simt::Lane::CollectiveAwaiter vote(bool predicate, const std::source_location& loc) {
    auto r = request(simt::CollectiveKind::ballot, loc);
    r.predicate = predicate;
    return lane_->collective(r);
  }

  template <class T>
  auto shuffle(simt::CollectiveKind kind, T data, std::uint32_t arg,
               const std::source_location& loc) {
    auto r = request(kind, loc);
    r.payload = detail::encode(data);
    r.arg = arg;
    if constexpr (detail::needs_pair<T>) {
      r.payload2 = detail::to_bits(data.imag());
      r.words = 2;
    }
    auto finish = [lane = lane_](std::uint64_t word) {
      return detail::decode<T>(word, lane->collective_result2());
    };
    return GroupAwaiter<T, decltype(finish)>{lane_->collective(r), finish};
  }

  simt::Lane* lane_;
  SubwarpGeometry geometry_;
};

/// Partitions the lane's warp into contiguous tiles of `size` lanes and
/// returns the tile containing `lane`.
inline SubwarpGroup tiled_partition(simt::Lane& lane, std::uint32_t size) {
  if (!lane.active()) {
    throw InvalidConfig("tiled_partition called from an inactive lane");
  }
  return SubwarpGroup(lane, subwarp_geometry(lane.tid(), lane.config().warp_size(), size));
}

}  // namespace gpuport::coop
