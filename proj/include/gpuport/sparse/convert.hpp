#pragma once

#include <algorithm>
#include <vector>

#include "gpuport/sparse/matrix.hpp"

namespace gpuport::sparse {

inline CsrMatrix coo_to_csr(const CooMatrix& m) {
  std::vector<index_type> row_ptrs(static_cast<std::size_t>(m.nrows()) + 1, 0);
  for (auto r : m.row_idx()) ++row_ptrs[static_cast<std::size_t>(r) + 1];
  for (index_type r = 0; r < m.nrows(); ++r) row_ptrs[r + 1] += row_ptrs[r];
  // Coo entries are already row-major sorted, so columns stay increasing.
  return CsrMatrix(m.nrows(), m.ncols(), std::move(row_ptrs), m.col_idx(), m.values());
}

inline CooMatrix csr_to_coo(const CsrMatrix& m) {
  std::vector<index_type> rows(m.nnz());
  for (index_type r = 0; r < m.nrows(); ++r) {
    std::fill(rows.begin() + m.row_ptrs()[r], rows.begin() + m.row_ptrs()[r + 1], r);
  }
  return CooMatrix(m.nrows(), m.ncols(), std::move(rows), m.col_idx(), m.values());
}

inline SellpMatrix coo_to_sellp(const CooMatrix& m,
                                index_type slice_size = SellpMatrix::default_slice_size) {
  if (slice_size <= 0 || !is_power_of_two(static_cast<std::uint64_t>(slice_size)) ||
      slice_size > 1024) {
    throw InvalidSliceSize("slice size " + std::to_string(slice_size) +
                           " must be a power of two <= 1024");
  }
  const auto csr = coo_to_csr(m);
  const index_type nrows = m.nrows();
  const index_type slices = (nrows + slice_size - 1) / slice_size;

  std::vector<index_type> row_lengths(static_cast<std::size_t>(nrows));
  for (index_type r = 0; r < nrows; ++r) {
    row_lengths[r] = csr.row_ptrs()[r + 1] - csr.row_ptrs()[r];
  }
  std::vector<index_type> slice_sets(static_cast<std::size_t>(slices) + 1, 0);
  for (index_type s = 0; s < slices; ++s) {
    const auto first = row_lengths.begin() + s * slice_size;
    const auto last = row_lengths.begin() + std::min(nrows, (s + 1) * slice_size);
    slice_sets[s + 1] = slice_sets[s] + *std::max_element(first, last);
  }

  const std::size_t stored = static_cast<std::size_t>(slice_sets.back()) * slice_size;
  std::vector<index_type> col_idx(stored, 0);
  std::vector<double> values(stored, 0.0);
  for (index_type r = 0; r < nrows; ++r) {
    const index_type s = r / slice_size;
    for (index_type k = 0; k < row_lengths[r]; ++k) {
      const auto slot = static_cast<std::size_t>(slice_sets[s] + k) * slice_size + r % slice_size;
      col_idx[slot] = csr.col_idx()[csr.row_ptrs()[r] + k];
      values[slot] = csr.values()[csr.row_ptrs()[r] + k];
    }
  }
  return SellpMatrix(nrows, m.ncols(), slice_size, std::move(slice_sets),
                     std::move(row_lengths), std::move(col_idx), std::move(values));
}

}  // namespace gpuport::sparse
