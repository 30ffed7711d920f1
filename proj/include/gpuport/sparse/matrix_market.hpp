#pragma once

// MatrixMarket coordinate files: real, integer and pattern fields with
// general or symmetric storage.

#include <algorithm>
#include <cctype>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gpuport/error.hpp"
#include "gpuport/sparse/matrix.hpp"

namespace gpuport::sparse {

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace detail

/// Parses a coordinate MatrixMarket stream. Indices become 0-based,
/// symmetric storage is expanded, pattern entries become 1.0 and duplicate
/// entries are summed.
inline CooMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty MatrixMarket stream");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner");
  object = detail::lower(object);
  format = detail::lower(format);
  field = detail::lower(field);
  symmetry = detail::lower(symmetry);
  if (object != "matrix") throw UnsupportedFormat("object '" + object + "' is not supported");
  if (format == "array") throw UnsupportedFormat("array format is not supported");
  if (format != "coordinate") throw ParseError("unknown format '" + format + "'");
  if (field == "complex") throw UnsupportedFormat("complex matrices are not supported");
  if (field != "real" && field != "integer" && field != "pattern" && field != "double") {
    throw ParseError("unknown field '" + field + "'");
  }
  if (symmetry == "skew-symmetric" || symmetry == "hermitian") {
    throw UnsupportedFormat("symmetry '" + symmetry + "' is not supported");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw ParseError("unknown symmetry '" + symmetry + "'");
  }
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";

  std::size_t line_no = 1;
  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      if (out.empty() || out[0] == '%' || detail::blank(out)) continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) throw ParseError("missing size line");
  long long nrows = 0, ncols = 0, declared = 0;
  {
    std::istringstream size_line(line);
    std::string extra;
    if (!(size_line >> nrows >> ncols >> declared) || (size_line >> extra) || nrows < 0 ||
        ncols < 0 || declared < 0 || nrows > std::numeric_limits<index_type>::max() ||
        ncols > std::numeric_limits<index_type>::max()) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed size line");
    }
  }

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(declared) * (symmetric ? 2 : 1));
  for (long long e = 0; e < declared; ++e) {
    if (!next_data_line(line)) {
      throw ParseError("expected " + std::to_string(declared) + " entries, found " +
                       std::to_string(e));
    }
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double v = 1.0;
    std::string extra;
    if (!(entry >> i >> j) || (!pattern && !(entry >> v)) || (entry >> extra)) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed entry");
    }
    if (i < 1 || i > nrows || j < 1 || j > ncols) {
      throw ParseError("line " + std::to_string(line_no) + ": index (" + std::to_string(i) +
                       ", " + std::to_string(j) + ") outside " + std::to_string(nrows) + "x" +
                       std::to_string(ncols));
    }
    const auto r = static_cast<index_type>(i - 1);
    const auto c = static_cast<index_type>(j - 1);
    entries.push_back({r, c, v});
    if (symmetric && r != c) entries.push_back({c, r, v});
  }
  if (next_data_line(line)) {
    throw ParseError("line " + std::to_string(line_no) + ": more entries than declared");
  }
  return CooMatrix::from_triplets(static_cast<index_type>(nrows),
                                  static_cast<index_type>(ncols), std::move(entries));
}

inline CooMatrix read_matrix_market(const std::string& text) {
  std::istringstream in(text);
  return read_matrix_market(in);
}

/// Writes general real coordinate format with round-trip precision.
inline void write_matrix_market(const CooMatrix& m, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.nrows() << ' ' << m.ncols() << ' ' << m.nnz() << '\n';
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < m.nnz(); ++k) {
    out << m.row_idx()[k] + 1 << ' ' << m.col_idx()[k] + 1 << ' ' << m.values()[k] << '\n';
  }
  out.precision(old_precision);
}

inline std::string to_matrix_market(const CooMatrix& m) {
  std::ostringstream out;
  write_matrix_market(m, out);
  return out.str();
}

}  // namespace gpuport::sparse
