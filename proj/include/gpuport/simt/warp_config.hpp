#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <type_traits>

#include "gpuport/error.hpp"

namespace gpuport {

/// Number of set bits; one overload per native lane-mask width.
constexpr int popcnt(std::uint32_t mask) noexcept { return std::popcount(mask); }
constexpr int popcnt(std::uint64_t mask) noexcept { return std::popcount(mask); }

/// Unsigned integer type wide enough for one bit per lane.
template <int WarpSize>
using lane_mask_type =
    std::conditional_t<(WarpSize > 32), std::uint64_t, std::uint32_t>;

constexpr bool is_power_of_two(std::uint64_t v) noexcept {
  return v != 0 && (v & (v - 1)) == 0;
}

constexpr int log2_exact(std::uint64_t v) noexcept {
  return std::countr_zero(v);
}

namespace simt {

/// Lane bitfield whose width equals the warp size of the config that made it.
class LaneMask {
 public:
  constexpr LaneMask() = default;
  constexpr LaneMask(std::uint64_t bits, int width) : bits_(bits), width_(width) {
    if (width != 32 && width != 64) {
      throw InvalidConfig("lane mask width must be 32 or 64");
    }
    if (width == 32 && (bits >> 32) != 0) {
      throw InvalidConfig("lane mask has bits above its width");
    }
  }

  constexpr std::uint64_t bits() const noexcept { return bits_; }
  constexpr int width() const noexcept { return width_; }
  constexpr int count() const noexcept { return std::popcount(bits_); }
  constexpr bool test(int lane) const noexcept { return (bits_ >> lane) & 1u; }

  friend constexpr bool operator==(const LaneMask&, const LaneMask&) = default;

 private:
  std::uint64_t bits_ = 0;
  int width_ = 32;
};

/// Per-backend kernel parameters. Every value is a power of two <= 1024.
struct Tuning {
  std::uint32_t block_size = 256;
  std::uint32_t subwarps_per_block = 8;
  std::uint32_t csr_subwarp_size = 8;

  friend bool operator==(const Tuning&, const Tuning&) = default;
};

/// Hardware-specific launch parameters: warp size and the tuning table a
/// backend sets for the shared kernel bodies.
class WarpConfig {
 public:
  WarpConfig(int warp_size, Tuning tuning) : warp_size_(warp_size), tuning_(tuning) {
    if (warp_size != 32 && warp_size != 64) {
      throw InvalidConfig("warp size must be 32 or 64, got " +
                          std::to_string(warp_size));
    }
    check_tuning("block_size", tuning.block_size);
    check_tuning("subwarps_per_block", tuning.subwarps_per_block);
    check_tuning("csr_subwarp_size", tuning.csr_subwarp_size);
    if (tuning.block_size % static_cast<std::uint32_t>(warp_size) != 0) {
      throw InvalidConfig("block_size must be a multiple of the warp size");
    }
    if (tuning.csr_subwarp_size > static_cast<std::uint32_t>(warp_size)) {
      throw InvalidConfig("csr_subwarp_size exceeds the warp size");
    }
  }

  /// NVIDIA-like warp of 32 lanes.
  static WarpConfig warp32() { return WarpConfig(32, Tuning{256, 8, 8}); }
  /// AMD-like wavefront of 64 lanes.
  static WarpConfig warp64() { return WarpConfig(64, Tuning{512, 8, 16}); }

  int warp_size() const noexcept { return warp_size_; }
  int lane_mask_width() const noexcept { return warp_size_; }
  const Tuning& tuning() const noexcept { return tuning_; }

  friend bool operator==(const WarpConfig&, const WarpConfig&) = default;

 private:
  static void check_tuning(const char* name, std::uint32_t value) {
    if (!is_power_of_two(value) || value > 1024) {
      throw InvalidConfig(std::string("tuning value ") + name +
                          " must be a power of two <= 1024");
    }
  }

  int warp_size_;
  Tuning tuning_;
};

/// All lanes of the warp set (`~0` of lane-mask width).
inline LaneMask full_mask(const WarpConfig& config) {
  const int width = config.lane_mask_width();
  const std::uint64_t bits = width == 64 ? ~std::uint64_t{0}
                                         : std::uint64_t{0xFFFFFFFFu};
  return LaneMask(bits, width);
}

}  // namespace simt
}  // namespace gpuport
