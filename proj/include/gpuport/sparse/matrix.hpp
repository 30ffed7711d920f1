#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gpuport/error.hpp"
#include "gpuport/simt/warp_config.hpp"

namespace gpuport::sparse {

using index_type = std::int32_t;
using DenseVector = std::vector<double>;

/// Row-major dense copy, used by tests and the round-trip checks.
struct DenseMatrix {
  index_type nrows = 0;
  index_type ncols = 0;
  std::vector<double> values;

  double operator()(index_type r, index_type c) const {
    return values[static_cast<std::size_t>(r) * ncols + c];
  }
  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;
};

struct Triplet {
  index_type row;
  index_type col;
  double value;
};

namespace detail {

inline void check_dims(index_type nrows, index_type ncols) {
  if (nrows < 0 || ncols < 0) {
    throw InvalidMatrix("negative matrix dimensions");
  }
}

inline DenseMatrix zero_dense(index_type nrows, index_type ncols) {
  return DenseMatrix{nrows, ncols,
                     std::vector<double>(static_cast<std::size_t>(nrows) * ncols, 0.0)};
}

}  // namespace detail

/// Coordinate storage: entries sorted by (row, col), no duplicates.
class CooMatrix {
 public:
  CooMatrix() = default;

  CooMatrix(index_type nrows, index_type ncols, std::vector<index_type> row_idx,
            std::vector<index_type> col_idx, std::vector<double> values)
      : nrows_(nrows),
        ncols_(ncols),
        row_idx_(std::move(row_idx)),
        col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    validate();
  }

  /// Sorts the entries and sums duplicates.
  static CooMatrix from_triplets(index_type nrows, index_type ncols,
                                 std::vector<Triplet> entries) {
    detail::check_dims(nrows, ncols);
    for (const auto& t : entries) {
      if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols) {
        throw InvalidMatrix("entry (" + std::to_string(t.row) + ", " +
                            std::to_string(t.col) + ") out of bounds");
      }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    std::vector<index_type> rows;
    std::vector<index_type> cols;
    std::vector<double> vals;
    for (const auto& t : entries) {
      if (!rows.empty() && rows.back() == t.row && cols.back() == t.col) {
        vals.back() += t.value;
      } else {
        rows.push_back(t.row);
        cols.push_back(t.col);
        vals.push_back(t.value);
      }
    }
    return CooMatrix(nrows, ncols, std::move(rows), std::move(cols), std::move(vals));
  }

  static CooMatrix from_dense(const DenseMatrix& dense) {
    std::vector<Triplet> entries;
    for (index_type r = 0; r < dense.nrows; ++r) {
      for (index_type c = 0; c < dense.ncols; ++c) {
        if (dense(r, c) != 0.0) entries.push_back({r, c, dense(r, c)});
      }
    }
    return from_triplets(dense.nrows, dense.ncols, std::move(entries));
  }

  index_type nrows() const noexcept { return nrows_; }
  index_type ncols() const noexcept { return ncols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  const std::vector<index_type>& row_idx() const noexcept { return row_idx_; }
  const std::vector<index_type>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  DenseMatrix dense() const {
    auto d = detail::zero_dense(nrows_, ncols_);
    for (std::size_t k = 0; k < nnz(); ++k) {
      d.values[static_cast<std::size_t>(row_idx_[k]) * ncols_ + col_idx_[k]] = values_[k];
    }
    return d;
  }

  friend bool operator==(const CooMatrix&, const CooMatrix&) = default;

 private:
  void validate() const {
    detail::check_dims(nrows_, ncols_);
    if (row_idx_.size() != values_.size() || col_idx_.size() != values_.size()) {
      throw InvalidMatrix("coo index and value arrays differ in length");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (row_idx_[k] < 0 || row_idx_[k] >= nrows_ || col_idx_[k] < 0 ||
          col_idx_[k] >= ncols_) {
        throw InvalidMatrix("coo entry " + std::to_string(k) + " out of bounds");
      }
      if (k > 0 && std::tie(row_idx_[k - 1], col_idx_[k - 1]) >=
                       std::tie(row_idx_[k], col_idx_[k])) {
        throw InvalidMatrix("coo entries must be sorted by (row, col) without duplicates");
      }
    }
  }

  index_type nrows_ = 0;
  index_type ncols_ = 0;
  std::vector<index_type> row_idx_;
  std::vector<index_type> col_idx_;
  std::vector<double> values_;
};

/// Compressed sparse rows; column indices strictly increase within a row.
class CsrMatrix {
 public:
  CsrMatrix() : row_ptrs_{0} {}

  CsrMatrix(index_type nrows, index_type ncols, std::vector<index_type> row_ptrs,
            std::vector<index_type> col_idx, std::vector<double> values)
      : nrows_(nrows),
        ncols_(ncols),
        row_ptrs_(std::move(row_ptrs)),
        col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    validate();
  }

  index_type nrows() const noexcept { return nrows_; }
  index_type ncols() const noexcept { return ncols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  const std::vector<index_type>& row_ptrs() const noexcept { return row_ptrs_; }
  const std::vector<index_type>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  DenseMatrix dense() const {
    auto d = detail::zero_dense(nrows_, ncols_);
    for (index_type r = 0; r < nrows_; ++r) {
      for (index_type k = row_ptrs_[r]; k < row_ptrs_[r + 1]; ++k) {
        d.values[static_cast<std::size_t>(r) * ncols_ + col_idx_[k]] = values_[k];
      }
    }
    return d;
  }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  void validate() const {
    detail::check_dims(nrows_, ncols_);
    if (row_ptrs_.size() != static_cast<std::size_t>(nrows_) + 1 || row_ptrs_.front() != 0 ||
        static_cast<std::size_t>(row_ptrs_.back()) != values_.size() ||
        col_idx_.size() != values_.size()) {
      throw InvalidMatrix("csr row pointers inconsistent with nnz");
    }
    for (index_type r = 0; r < nrows_; ++r) {
      if (row_ptrs_[r] > row_ptrs_[r + 1]) {
        throw InvalidMatrix("csr row pointers must be nondecreasing");
      }
      for (index_type k = row_ptrs_[r]; k < row_ptrs_[r + 1]; ++k) {
        if (col_idx_[k] < 0 || col_idx_[k] >= ncols_) {
          throw InvalidMatrix("csr column index out of bounds");
        }
        if (k > row_ptrs_[r] && col_idx_[k - 1] >= col_idx_[k]) {
          throw InvalidMatrix("csr column indices must strictly increase within a row");
        }
      }
    }
  }

  index_type nrows_ = 0;
  index_type ncols_ = 0;
  std::vector<index_type> row_ptrs_;
  std::vector<index_type> col_idx_;
  std::vector<double> values_;
};

/// Sliced ELLPACK. Rows are grouped into slices of `slice_size`; each slice is
/// padded to its longest row and stored column-major with stride
/// `slice_size`. Entry k of row r in slice s lives at
/// `(slice_sets[s] + k) * slice_size + r % slice_size`. Padding slots hold
/// column 0 and value 0 and are recognised through `row_lengths`.
class SellpMatrix {
 public:
  static constexpr index_type default_slice_size = 64;

  SellpMatrix() : slice_sets_{0} {}

  SellpMatrix(index_type nrows, index_type ncols, index_type slice_size,
              std::vector<index_type> slice_sets, std::vector<index_type> row_lengths,
              std::vector<index_type> col_idx, std::vector<double> values)
      : nrows_(nrows),
        ncols_(ncols),
        slice_size_(slice_size),
        slice_sets_(std::move(slice_sets)),
        row_lengths_(std::move(row_lengths)),
        col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    validate();
  }

  index_type nrows() const noexcept { return nrows_; }
  index_type ncols() const noexcept { return ncols_; }
  index_type slice_size() const noexcept { return slice_size_; }
  index_type num_slices() const noexcept {
    return static_cast<index_type>(slice_sets_.size()) - 1;
  }
  index_type slice_width(index_type s) const { return slice_sets_[s + 1] - slice_sets_[s]; }
  const std::vector<index_type>& slice_sets() const noexcept { return slice_sets_; }
  const std::vector<index_type>& row_lengths() const noexcept { return row_lengths_; }
  const std::vector<index_type>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Stored slots including padding.
  std::size_t stored_entries() const noexcept { return values_.size(); }
  std::size_t nnz() const noexcept {
    std::size_t total = 0;
    for (auto len : row_lengths_) total += static_cast<std::size_t>(len);
    return total;
  }

  std::size_t slot(index_type row, index_type k) const noexcept {
    const index_type s = row / slice_size_;
    return static_cast<std::size_t>(slice_sets_[s] + k) * slice_size_ + row % slice_size_;
  }

  DenseMatrix dense() const {
    auto d = detail::zero_dense(nrows_, ncols_);
    for (index_type r = 0; r < nrows_; ++r) {
      for (index_type k = 0; k < row_lengths_[r]; ++k) {
        d.values[static_cast<std::size_t>(r) * ncols_ + col_idx_[slot(r, k)]] =
            values_[slot(r, k)];
      }
    }
    return d;
  }

  friend bool operator==(const SellpMatrix&, const SellpMatrix&) = default;

 private:
  void validate() const {
    detail::check_dims(nrows_, ncols_);
    if (!is_power_of_two(static_cast<std::uint64_t>(std::max<index_type>(slice_size_, 0))) ||
        slice_size_ > 1024) {
      throw InvalidSliceSize("slice size must be a power of two <= 1024");
    }
    const index_type slices = (nrows_ + slice_size_ - 1) / slice_size_;
    if (slice_sets_.size() != static_cast<std::size_t>(slices) + 1 || slice_sets_[0] != 0 ||
        row_lengths_.size() != static_cast<std::size_t>(nrows_)) {
      throw InvalidMatrix("sellp slice sets or row lengths have the wrong size");
    }
    const std::size_t stored = static_cast<std::size_t>(slice_sets_.back()) * slice_size_;
    if (col_idx_.size() != stored || values_.size() != stored) {
      throw InvalidMatrix("sellp storage size disagrees with slice sets");
    }
    for (index_type s = 0; s < slices; ++s) {
      const index_type width = slice_sets_[s + 1] - slice_sets_[s];
      index_type longest = 0;
      for (index_type r = s * slice_size_; r < std::min(nrows_, (s + 1) * slice_size_); ++r) {
        if (row_lengths_[r] < 0 || row_lengths_[r] > width) {
          throw InvalidMatrix("sellp row length exceeds its slice width");
        }
        longest = std::max(longest, row_lengths_[r]);
        for (index_type k = 0; k < row_lengths_[r]; ++k) {
          const index_type c = col_idx_[slot(r, k)];
          if (c < 0 || c >= ncols_) throw InvalidMatrix("sellp column index out of bounds");
          if (k > 0 && col_idx_[slot(r, k - 1)] >= c) {
            throw InvalidMatrix("sellp column indices must strictly increase within a row");
          }
        }
      }
      if (longest != width) {
        throw InvalidMatrix("sellp slice width must equal its longest row");
      }
    }
  }

  index_type nrows_ = 0;
  index_type ncols_ = 0;
  index_type slice_size_ = default_slice_size;
  std::vector<index_type> slice_sets_;
  std::vector<index_type> row_lengths_;
  std::vector<index_type> col_idx_;
  std::vector<double> values_;
};

/// Any of the supported storage formats.
template <class M>
concept SparseMatrix = std::same_as<M, CooMatrix> || std::same_as<M, CsrMatrix> ||
                       std::same_as<M, SellpMatrix>;

}  // namespace gpuport::sparse
