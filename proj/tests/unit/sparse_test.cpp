#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "gpuport/sparse/convert.hpp"
#include "gpuport/sparse/generate.hpp"
#include "gpuport/sparse/matrix.hpp"
#include "gpuport/sparse/matrix_market.hpp"
#include "gpuport/sparse/reference.hpp"

namespace gpuport::sparse {
namespace {

CooMatrix example3x3() {
  return CooMatrix::from_dense(DenseMatrix{3, 3, {1, 0, 2, 0, 3, 0, 4, 0, 5}});
}

TEST(MatrixMarket, ReadsDiagonal) {
  const auto m = read_matrix_market(
      "%%MatrixMarket matrix coordinate real general\n"
      "% a comment\n"
      "3 3 3\n1 1 1.0\n2 2 2.0\n3 3 3.0\n");
  EXPECT_EQ(m.nrows(), 3);
  EXPECT_EQ(m.row_idx(), (std::vector<index_type>{0, 1, 2}));
  EXPECT_EQ(m.col_idx(), (std::vector<index_type>{0, 1, 2}));
  EXPECT_EQ(m.values(), (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(MatrixMarket, ExpandsSymmetricStorage) {
  const auto m = read_matrix_market(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "2 2 2\n1 1 1.0\n2 1 5.0\n");
  const auto d = m.dense();
  EXPECT_EQ(d(1, 0), 5.0);
  EXPECT_EQ(d(0, 1), 5.0);
  EXPECT_EQ(d(0, 0), 1.0);
  EXPECT_EQ(m.nnz(), 3u);
}

TEST(MatrixMarket, PatternAndIntegerFields) {
  const auto p = read_matrix_market(
      "%%MatrixMarket matrix coordinate pattern general\n2 3 2\n1 3\n2 1\n");
  EXPECT_EQ(p.values(), (std::vector<double>{1.0, 1.0}));
  const auto i = read_matrix_market(
      "%%MatrixMarket matrix coordinate integer general\n1 1 1\n1 1 -7\n");
  EXPECT_EQ(i.values(), (std::vector<double>{-7.0}));
}

TEST(MatrixMarket, SumsDuplicates) {
  const auto m = read_matrix_market(
      "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.5\n2 2 1\n1 1 2.5\n");
  EXPECT_EQ(m.nnz(), 2u);
  EXPECT_EQ(m.dense()(0, 0), 4.0);
}

TEST(MatrixMarket, Errors) {
  EXPECT_THROW(read_matrix_market("%%MatrixMarket matrix coordinate real general\n"
                                  "3 3 1\n4 1 1.0\n"),
               ParseError);
  EXPECT_THROW(read_matrix_market("%%MatrixMarket matrix coordinate complex general\n"
                                  "1 1 1\n1 1 1.0 0.0\n"),
               UnsupportedFormat);
  EXPECT_THROW(read_matrix_market("%%MatrixMarket matrix array real general\n1 1\n1.0\n"),
               UnsupportedFormat);
  EXPECT_THROW(read_matrix_market("not a header\n"), ParseError);
  EXPECT_THROW(read_matrix_market("%%MatrixMarket matrix coordinate real general\n"
                                  "2 2 2\n1 1 1.0\n"),
               ParseError);
  EXPECT_THROW(read_matrix_market("%%MatrixMarket matrix coordinate real general\n"
                                  "2 2 1\n1 1 abc\n"),
               ParseError);
  EXPECT_THROW(read_matrix_market("%%MatrixMarket matrix coordinate real general\n"
                                  "2 2 1\n1 1 1.0\n2 2 2.0\n"),
               ParseError);
  EXPECT_THROW(read_matrix_market(""), ParseError);
}

TEST(MatrixMarket, WriteReadRoundTrip) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto m = generate::random(1 + seed % 17, 1 + (seed * 7) % 23, 0.3, seed, seed % 2);
    EXPECT_EQ(read_matrix_market(to_matrix_market(m)), m);
  }
  const auto tricky = CooMatrix::from_triplets(2, 2, {{0, 1, 0.1}, {1, 0, 1.0 / 3.0}});
  EXPECT_EQ(read_matrix_market(to_matrix_market(tricky)), tricky);
}

TEST(CooToCsr, Examples) {
  const auto csr = coo_to_csr(example3x3());
  EXPECT_EQ(csr.row_ptrs(), (std::vector<index_type>{0, 2, 3, 5}));
  EXPECT_EQ(csr.col_idx(), (std::vector<index_type>{0, 2, 1, 0, 2}));

  const auto empty = coo_to_csr(CooMatrix(2, 2, {}, {}, {}));
  EXPECT_EQ(empty.row_ptrs(), (std::vector<index_type>{0, 0, 0}));

  const auto one = coo_to_csr(CooMatrix(1, 1, {0}, {0}, {7.0}));
  EXPECT_EQ(one.row_ptrs(), (std::vector<index_type>{0, 1}));
  EXPECT_EQ(one.values(), (std::vector<double>{7.0}));
}

TEST(CooToSellp, LayoutOfExample) {
  const auto s = coo_to_sellp(example3x3(), 2);
  EXPECT_EQ(s.num_slices(), 2);
  EXPECT_EQ(s.slice_width(0), 2);
  EXPECT_EQ(s.slice_width(1), 2);
  EXPECT_EQ(s.slice_sets(), (std::vector<index_type>{0, 2, 4}));
  EXPECT_EQ(s.row_lengths(), (std::vector<index_type>{2, 1, 2}));
  EXPECT_EQ(s.col_idx(), (std::vector<index_type>{0, 1, 2, 0, 0, 0, 2, 0}));
  EXPECT_EQ(s.values(), (std::vector<double>{1, 3, 2, 0, 4, 0, 5, 0}));
  EXPECT_EQ(s.dense(), example3x3().dense());
}

TEST(CooToSellp, DiagonalHasNoPadding) {
  const auto s = coo_to_sellp(generate::diagonal(4, 2.0), 2);
  EXPECT_EQ(s.slice_width(0), 1);
  EXPECT_EQ(s.slice_width(1), 1);
  EXPECT_EQ(s.stored_entries(), 4u);
  EXPECT_EQ(s.dense(), generate::diagonal(4, 2.0).dense());
}

TEST(CooToSellp, EmptyMatrixHasZeroWidthSlices) {
  const auto s = coo_to_sellp(CooMatrix(2, 2, {}, {}, {}), 2);
  EXPECT_EQ(s.num_slices(), 1);
  EXPECT_EQ(s.slice_width(0), 0);
  EXPECT_EQ(s.stored_entries(), 0u);
}

TEST(CooToSellp, RejectsInvalidSliceSize) {
  EXPECT_THROW(coo_to_sellp(example3x3(), 3), InvalidSliceSize);
  EXPECT_THROW(coo_to_sellp(example3x3(), 0), InvalidSliceSize);
  EXPECT_THROW(coo_to_sellp(example3x3(), 2048), InvalidSliceSize);
}

TEST(Conversions, DenseRoundTripAndStorageBound) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const index_type rows = 1 + static_cast<index_type>((seed * 13) % 64);
    const index_type cols = 1 + static_cast<index_type>((seed * 29) % 64);
    const double density = static_cast<double>(seed % 11) / 10.0;
    const auto coo = generate::random(rows, cols, density, seed, seed % 3 == 0);
    const auto dense = coo.dense();
    ASSERT_EQ(coo_to_csr(coo).dense(), dense);
    ASSERT_EQ(csr_to_coo(coo_to_csr(coo)), coo);
    for (index_type s = 1; s <= 64; s *= 2) {
      const auto sellp = coo_to_sellp(coo, s);
      ASSERT_EQ(sellp.dense(), dense) << "seed " << seed << " slice " << s;
      std::size_t bound = 0;
      for (index_type k = 0; k < sellp.num_slices(); ++k) {
        bound += static_cast<std::size_t>(s) * sellp.slice_width(k);
      }
      ASSERT_EQ(sellp.stored_entries(), bound);
      ASSERT_EQ(sellp.num_slices(), (rows + s - 1) / s);
      ASSERT_EQ(sellp.nnz(), coo.nnz());
    }
  }
}

TEST(Invariants, ConstructorsRejectInvalidStorage) {
  EXPECT_THROW(CooMatrix(2, 2, {1, 0}, {0, 0}, {1.0, 1.0}), InvalidMatrix);  // unsorted
  EXPECT_THROW(CooMatrix(2, 2, {0, 0}, {1, 1}, {1.0, 1.0}), InvalidMatrix);  // duplicate
  EXPECT_THROW(CooMatrix(2, 2, {0}, {2}, {1.0}), InvalidMatrix);
  EXPECT_THROW(CsrMatrix(2, 2, {0, 2, 1}, {0}, {1.0}), InvalidMatrix);
  EXPECT_THROW(CsrMatrix(1, 3, {0, 2}, {2, 1}, {1.0, 1.0}), InvalidMatrix);
  EXPECT_THROW(SellpMatrix(2, 2, 2, {0, 2}, {1, 1}, {0, 0, 0, 0}, {1, 1, 0, 0}),
               InvalidMatrix);  // width 2 but longest row 1
}

TEST(ReferenceSpmv, Examples) {
  const auto a = example3x3();
  const DenseVector ones{1, 1, 1};
  EXPECT_EQ(dense_spmv_reference(a, ones), (DenseVector{3, 3, 9}));
  EXPECT_EQ(dense_spmv_reference(coo_to_csr(a), ones), (DenseVector{3, 3, 9}));
  EXPECT_EQ(dense_spmv_reference(coo_to_sellp(a, 2), ones), (DenseVector{3, 3, 9}));
  EXPECT_EQ(dense_spmv_reference(generate::identity(3), DenseVector{5, 6, 7}),
            (DenseVector{5, 6, 7}));
  EXPECT_EQ(dense_spmv_reference(CooMatrix(3, 3, {}, {}, {}), DenseVector{5, 6, 7}),
            (DenseVector{0, 0, 0}));
  EXPECT_THROW(dense_spmv_reference(a, DenseVector{1, 1}), DimensionMismatch);
}

TEST(ReferenceSpmv, FormatsAgreeBitwise) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto coo = generate::random(40, 33, 0.2, seed, false);
    const auto x = generate::random_vector(33, seed + 1000, false);
    const auto y = dense_spmv_reference(coo, x);
    EXPECT_EQ(dense_spmv_reference(coo_to_csr(coo), x), y);
    EXPECT_EQ(dense_spmv_reference(coo_to_sellp(coo, 8), x), y);
    EXPECT_EQ(dense_spmv_reference(coo.dense(), x), y);
  }
}

TEST(Generators, Families) {
  EXPECT_EQ(generate::poisson2d(3).nnz(), 9u * 5 - 12);
  EXPECT_EQ(generate::tridiagonal(5).nnz(), 13u);
  const auto p = generate::poisson2d(4).dense();
  for (index_type r = 0; r < p.nrows; ++r) {
    for (index_type c = 0; c < p.ncols; ++c) EXPECT_EQ(p(r, c), p(c, r));
  }
}

}  // namespace
}  // namespace gpuport::sparse
