#pragma once

// Synthetic matrix families for tests and the benchmark corpus.

#include <cstdint>
#include <random>
#include <vector>

#include "gpuport/sparse/matrix.hpp"

namespace gpuport::sparse::generate {

inline CooMatrix diagonal(index_type n, double value = 1.0) {
  std::vector<Triplet> entries;
  for (index_type i = 0; i < n; ++i) entries.push_back({i, i, value});
  return CooMatrix::from_triplets(n, n, std::move(entries));
}

inline CooMatrix identity(index_type n) { return diagonal(n, 1.0); }

/// Symmetric positive definite [-1, 2, -1] stencil.
inline CooMatrix tridiagonal(index_type n) {
  std::vector<Triplet> entries;
  for (index_type i = 0; i < n; ++i) {
    if (i > 0) entries.push_back({i, i - 1, -1.0});
    entries.push_back({i, i, 2.0});
    if (i + 1 < n) entries.push_back({i, i + 1, -1.0});
  }
  return CooMatrix::from_triplets(n, n, std::move(entries));
}

/// Five-point Laplacian on a `grid` x `grid` mesh with Dirichlet boundary.
inline CooMatrix poisson2d(index_type grid) {
  const index_type n = grid * grid;
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(n) * 5);
  for (index_type i = 0; i < grid; ++i) {
    for (index_type j = 0; j < grid; ++j) {
      const index_type row = i * grid + j;
      if (i > 0) entries.push_back({row, row - grid, -1.0});
      if (j > 0) entries.push_back({row, row - 1, -1.0});
      entries.push_back({row, row, 4.0});
      if (j + 1 < grid) entries.push_back({row, row + 1, -1.0});
      if (i + 1 < grid) entries.push_back({row, row + grid, -1.0});
    }
  }
  return CooMatrix::from_triplets(n, n, std::move(entries));
}

/// Each position is nonzero with probability `density`. Integer-valued
/// matrices draw from [-9, 9] \ {0}; otherwise values are uniform in [-1, 1).
inline CooMatrix random(index_type nrows, index_type ncols, double density,
                        std::uint64_t seed, bool integer_valued) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> digit(1, 9);
  std::uniform_real_distribution<double> real(-1.0, 1.0);
  std::vector<Triplet> entries;
  for (index_type r = 0; r < nrows; ++r) {
    for (index_type c = 0; c < ncols; ++c) {
      if (coin(rng) >= density) continue;
      double v = integer_valued ? digit(rng) * (coin(rng) < 0.5 ? -1.0 : 1.0) : real(rng);
      if (v == 0.0) v = 0.5;
      entries.push_back({r, c, v});
    }
  }
  return CooMatrix::from_triplets(nrows, ncols, std::move(entries));
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed,
                                         bool integer_valued) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> digit(-9, 9);
  std::uniform_real_distribution<double> real(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = integer_valued ? digit(rng) : real(rng);
  return x;
}

}  // namespace gpuport::sparse::generate
