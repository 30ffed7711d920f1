#pragma once

// Synthetic benchmark corpus. Real collections (e.g. SuiteSparse downloads)
// can be dropped into the same directory; no network access is involved.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gpuport/error.hpp"
#include "gpuport/simt/simulator.hpp"
#include "gpuport/sparse/generate.hpp"
#include "gpuport/sparse/matrix_market.hpp"

namespace gpuport::bench {

struct CorpusEntry {
  std::string name;
  sparse::CooMatrix matrix;
};

/// Diagonal, tridiagonal and Poisson families plus `random_count` random
/// matrices (half of them symmetrized so CG has something to solve).
inline std::vector<CorpusEntry> synthetic_corpus(std::uint64_t seed, std::size_t random_count = 6) {
  namespace gen = sparse::generate;
  std::vector<CorpusEntry> out;
  for (sparse::index_type n : {16, 100}) out.push_back({"diagonal_" + std::to_string(n), gen::diagonal(n, 2.0)});
  for (sparse::index_type n : {32, 200}) out.push_back({"tridiagonal_" + std::to_string(n), gen::tridiagonal(n)});
  for (sparse::index_type g : {8, 20}) out.push_back({"poisson_" + std::to_string(g), gen::poisson2d(g)});
  for (std::size_t i = 0; i < random_count; ++i) {
    const std::uint64_t s = simt::splitmix64(seed + i);
    const auto n = static_cast<sparse::index_type>(16 + s % 49);
    auto m = gen::random(n, n, 0.05 + 0.25 * static_cast<double>((s >> 8) % 100) / 100.0, s, false);
    std::string name = "random_" + std::to_string(i);
    if (i % 2 == 1) {
      // A + A^T + 2n I is symmetric and diagonally dominant
      std::vector<sparse::Triplet> t;
      for (std::size_t k = 0; k < m.nnz(); ++k) {
        t.push_back({m.row_idx()[k], m.col_idx()[k], m.values()[k]});
        t.push_back({m.col_idx()[k], m.row_idx()[k], m.values()[k]});
      }
      for (sparse::index_type d = 0; d < n; ++d) t.push_back({d, d, 2.0 * n});
      m = sparse::CooMatrix::from_triplets(n, n, std::move(t));
      name += "_spd";
    }
    out.push_back({std::move(name), std::move(m)});
  }
  return out;
}

/// Writes `<name>.mtx` files into `dir`; returns the paths written.
inline std::vector<std::filesystem::path> write_corpus(const std::filesystem::path& dir,
                                                       const std::vector<CorpusEntry>& entries) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& e : entries) {
    const auto path = dir / (e.name + ".mtx");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    sparse::write_matrix_market(e.matrix, out);
    if (!out.flush()) throw IoError("cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace gpuport::bench
