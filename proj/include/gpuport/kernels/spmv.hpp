#pragma once

// SpMV kernels written once against the subwarp layer. Launch geometry and
// subwarp sizes come only from the simulator's WarpConfig.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "gpuport/coop/subwarp.hpp"
#include "gpuport/kernels/reduce.hpp"
#include "gpuport/simt/simulator.hpp"
#include "gpuport/sparse/matrix.hpp"
#include "gpuport/sparse/reference.hpp"

namespace gpuport::kernels {

using sparse::DenseVector;
using sparse::index_type;

namespace detail {

inline std::uint32_t ceil_div(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint32_t>((a + b - 1) / b);
}

}  // namespace detail

/// Coo: each warp owns a contiguous run of nonzeros, processed warp_size
/// entries at a time. A segmented scan keyed by row combines products of the
/// same row; the last lane of every row segment flushes with atomic_add.
inline DenseVector spmv_coo(simt::Simulator& sim, const sparse::CooMatrix& m,
                            const DenseVector& x) {
  sparse::detail::check_spmv_dims(m.ncols(), x.size());
  DenseVector y(static_cast<std::size_t>(m.nrows()), 0.0);
  if (m.nnz() == 0) return y;

  const auto& config = sim.config();
  const std::uint32_t warp = static_cast<std::uint32_t>(config.warp_size());
  const std::uint32_t warps_per_block = config.tuning().subwarps_per_block;
  constexpr std::uint32_t chunks_per_warp = 4;
  const std::uint64_t per_warp = std::uint64_t{warp} * chunks_per_warp;
  const std::uint32_t warps = detail::ceil_div(m.nnz(), per_warp);
  const std::uint32_t blocks = detail::ceil_div(warps, warps_per_block);

  std::span<const index_type> rows(m.row_idx());
  std::span<const index_type> cols(m.col_idx());
  std::span<const double> vals(m.values());
  std::span<const double> xs(x);
  std::span<double> ys(y);
  const std::uint64_t nnz = m.nnz();

  sim.launch(blocks, warps_per_block * warp, [&](simt::Lane& lane) -> simt::LaneTask {
    auto group = coop::tiled_partition(lane, warp);
    const std::uint64_t warp_index = lane.global_id() / warp;
    const std::uint64_t begin = warp_index * per_warp;
    const std::uint64_t end = std::min(nnz, begin + per_warp);
    for (std::uint64_t chunk = begin; chunk < end; chunk += warp) {
      const std::uint64_t k = chunk + group.rank();
      double value = 0.0;
      std::int32_t row = -1;
      if (k < end) {
        row = lane.load(rows, k);
        value = lane.load(vals, k) * lane.load(xs, lane.load(cols, k));
      }
      for (std::uint32_t offset = 1; offset < warp; offset *= 2) {
        const std::uint32_t src = group.rank() >= offset ? group.rank() - offset : 0;
        const double other = co_await group.shfl(value, src);
        const std::int32_t other_row = co_await group.shfl(row, src);
        if (group.rank() >= offset && other_row == row) value += other;
      }
      const std::uint32_t next = std::min(group.rank() + 1, warp - 1);
      const std::int32_t next_row = co_await group.shfl(row, next);
      const bool segment_end = group.rank() == warp - 1 || next_row != row;
      if (segment_end && row >= 0) lane.atomic_add(ys, static_cast<std::size_t>(row), value);
    }
  });
  return y;
}

/// Csr: one subwarp of `csr_subwarp_size` lanes per row. Lanes stride the
/// row, then a butterfly reduction combines their partial sums.
inline DenseVector spmv_csr(simt::Simulator& sim, const sparse::CsrMatrix& m,
                            const DenseVector& x) {
  sparse::detail::check_spmv_dims(m.ncols(), x.size());
  DenseVector y(static_cast<std::size_t>(m.nrows()), 0.0);
  if (m.nrows() == 0) return y;

  const auto& config = sim.config();
  const std::uint32_t block = config.tuning().block_size;
  const std::uint32_t subwarp = config.tuning().csr_subwarp_size;
  const std::uint32_t rows_per_block = block / subwarp;
  const std::uint32_t blocks = detail::ceil_div(static_cast<std::uint64_t>(m.nrows()),
                                                rows_per_block);

  std::span<const index_type> ptrs(m.row_ptrs());
  std::span<const index_type> cols(m.col_idx());
  std::span<const double> vals(m.values());
  std::span<const double> xs(x);
  std::span<double> ys(y);
  const auto nrows = static_cast<std::uint64_t>(m.nrows());

  sim.launch(blocks, block, [&](simt::Lane& lane) -> simt::LaneTask {
    auto group = coop::tiled_partition(lane, subwarp);
    const std::uint64_t row =
        std::uint64_t{lane.block_idx()} * rows_per_block + lane.tid() / subwarp;
    if (row >= nrows) co_return;  // whole subwarp leaves together
    double sum = 0.0;
    const index_type end = lane.load(ptrs, row + 1);
    for (index_type k = lane.load(ptrs, row) + static_cast<index_type>(group.rank()); k < end;
         k += static_cast<index_type>(subwarp)) {
      sum += lane.load(vals, k) * lane.load(xs, lane.load(cols, k));
    }
    const auto total = co_await reduce_subwarp(group, sum);
    if (group.rank() == 0) lane.store(ys, row, total.value);
  });
  return y;
}

/// Sellp: one lane per row, looping over its slice's width. No atomics.
inline DenseVector spmv_sellp(simt::Simulator& sim, const sparse::SellpMatrix& m,
                              const DenseVector& x) {
  sparse::detail::check_spmv_dims(m.ncols(), x.size());
  DenseVector y(static_cast<std::size_t>(m.nrows()), 0.0);
  if (m.nrows() == 0) return y;

  const std::uint32_t block = sim.config().tuning().block_size;
  const std::uint32_t blocks = detail::ceil_div(static_cast<std::uint64_t>(m.nrows()), block);

  std::span<const index_type> sets(m.slice_sets());
  std::span<const index_type> lengths(m.row_lengths());
  std::span<const index_type> cols(m.col_idx());
  std::span<const double> vals(m.values());
  std::span<const double> xs(x);
  std::span<double> ys(y);
  const auto nrows = static_cast<std::uint64_t>(m.nrows());
  const auto slice_size = static_cast<std::uint64_t>(m.slice_size());

  sim.launch(blocks, block, [&](simt::Lane& lane) -> simt::LaneTask {
    const std::uint64_t row = lane.global_id();
    if (row >= nrows) co_return;
    const std::uint64_t slice = row / slice_size;
    const index_type first = lane.load(sets, slice);
    const index_type width = lane.load(sets, slice + 1) - first;
    const index_type length = lane.load(lengths, row);
    double sum = 0.0;
    for (index_type k = 0; k < width; ++k) {
      if (k >= length) break;  // padding slots
      const std::uint64_t slot = (static_cast<std::uint64_t>(first) + k) * slice_size +
                                 row % slice_size;
      sum += lane.load(vals, slot) * lane.load(xs, lane.load(cols, slot));
    }
    lane.store(ys, row, sum);
  });
  return y;
}

}  // namespace gpuport::kernels
