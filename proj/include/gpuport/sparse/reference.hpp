#pragma once

// Sequential kernels of the reference backend. Every product accumulates
// y[i] = sum_j A[i,j] * x[j] from 0.0 in increasing column order, so all
// formats produce bit-identical results for the same matrix.

#include <cstdint>
#include <string>

#include "gpuport/error.hpp"
#include "gpuport/sparse/matrix.hpp"

namespace gpuport::sparse {

namespace detail {

inline void check_spmv_dims(index_type ncols, std::size_t len) {
  if (static_cast<std::size_t>(ncols) != len) {
    throw DimensionMismatch("matrix has " + std::to_string(ncols) +
                            " columns but the vector has length " + std::to_string(len));
  }
}

}  // namespace detail

inline DenseVector dense_spmv_reference(const CooMatrix& m, const DenseVector& x) {
  detail::check_spmv_dims(m.ncols(), x.size());
  DenseVector y(static_cast<std::size_t>(m.nrows()), 0.0);
  for (std::size_t k = 0; k < m.nnz(); ++k) {
    y[m.row_idx()[k]] += m.values()[k] * x[m.col_idx()[k]];
  }
  return y;
}

inline DenseVector dense_spmv_reference(const CsrMatrix& m, const DenseVector& x) {
  detail::check_spmv_dims(m.ncols(), x.size());
  DenseVector y(static_cast<std::size_t>(m.nrows()), 0.0);
  for (index_type r = 0; r < m.nrows(); ++r) {
    double sum = 0.0;
    for (index_type k = m.row_ptrs()[r]; k < m.row_ptrs()[r + 1]; ++k) {
      sum += m.values()[k] * x[m.col_idx()[k]];
    }
    y[r] = sum;
  }
  return y;
}

inline DenseVector dense_spmv_reference(const SellpMatrix& m, const DenseVector& x) {
  detail::check_spmv_dims(m.ncols(), x.size());
  DenseVector y(static_cast<std::size_t>(m.nrows()), 0.0);
  for (index_type r = 0; r < m.nrows(); ++r) {
    double sum = 0.0;
    for (index_type k = 0; k < m.row_lengths()[r]; ++k) {
      const auto slot = m.slot(r, k);
      sum += m.values()[slot] * x[m.col_idx()[slot]];
    }
    y[r] = sum;
  }
  return y;
}

inline DenseVector dense_spmv_reference(const DenseMatrix& m, const DenseVector& x) {
  detail::check_spmv_dims(m.ncols, x.size());
  DenseVector y(static_cast<std::size_t>(m.nrows), 0.0);
  for (index_type r = 0; r < m.nrows; ++r) {
    double sum = 0.0;
    for (index_type c = 0; c < m.ncols; ++c) {
      if (m(r, c) != 0.0) sum += m(r, c) * x[c];
    }
    y[r] = sum;
  }
  return y;
}

/// Memory operations of one sequential product: three loads per stored
/// entry (value, column, x) plus one store per row.
template <SparseMatrix M>
std::uint64_t reference_spmv_steps(const M& m) {
  return 3 * static_cast<std::uint64_t>(m.nnz()) + static_cast<std::uint64_t>(m.nrows());
}

}  // namespace gpuport::sparse
