#pragma once

// Runs SpMV/CG over a MatrixMarket corpus on several executors and records
// correctness and instrumentation per (matrix, kernel, executor).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gpuport/dispatch/executor.hpp"
#include "gpuport/dispatch/registry.hpp"
#include "gpuport/error.hpp"
#include "gpuport/simt/simulator.hpp"
#include "gpuport/sparse/convert.hpp"
#include "gpuport/sparse/generate.hpp"
#include "gpuport/sparse/matrix_market.hpp"
#include "gpuport/sparse/reference.hpp"

namespace gpuport::bench {

namespace fs = std::filesystem;
using dispatch::ExecKind;

enum class KernelKind { coo, csr, sellp, cg };

inline constexpr KernelKind all_kernel_kinds[] = {KernelKind::coo, KernelKind::csr,
                                                  KernelKind::sellp, KernelKind::cg};

inline std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::coo: return "coo";
    case KernelKind::csr: return "csr";
    case KernelKind::sellp: return "sellp";
    case KernelKind::cg: return "cg";
  }
  return "?";
}

inline KernelKind parse_kernel_kind(std::string_view name) {
  for (auto k : all_kernel_kinds) {
    if (to_string(k) == name) return k;
  }
  throw InvalidConfig("unknown kernel '" + std::string(name) + "' (expected coo, csr, sellp or cg)");
}

struct BenchConfig {
  fs::path corpus;
  std::vector<KernelKind> kernels{all_kernel_kinds, all_kernel_kinds + 4};
  std::vector<ExecKind> execs{dispatch::all_exec_kinds, dispatch::all_exec_kinds + 3};
  std::uint32_t warmup_iters = 2;
  std::uint32_t timed_iters = 10;
  std::uint32_t inner_loops = 1000;
  std::uint64_t seed = 42;
  double tolerance = 1e-10;
  std::uint32_t cg_iterations = 1000;
  double cg_tolerance = 1e-8;

  void validate() const {
    if (timed_iters < 1) throw InvalidConfig("timed iterations must be at least 1");
    if (kernels.empty()) throw InvalidConfig("no kernels selected");
    if (execs.empty()) throw InvalidConfig("no executors selected");
    if (!(tolerance >= 0.0)) throw InvalidConfig("tolerance must be nonnegative");
  }
};

struct BenchRecord {
  std::string matrix;
  sparse::index_type nrows = 0;
  std::size_t nnz = 0;
  KernelKind kernel = KernelKind::coo;
  ExecKind exec = ExecKind::reference;
  bool correct = false;
  double max_rel_err = 0.0;
  std::uint64_t lane_steps = 0;
  std::uint64_t shuffles = 0;
  std::uint64_t atomics = 0;
  std::uint64_t wall_time_ns = 0;  // informational only
};

struct SkipEntry {
  std::string matrix;
  std::string kernel;  // empty when the whole matrix was skipped
  std::string reason;
};

struct BenchResult {
  std::vector<BenchRecord> records;
  std::vector<SkipEntry> skipped;
};

/// Matrix files below `corpus`, sorted by their path relative to it.
inline std::vector<fs::path> list_corpus(const fs::path& corpus) {
  std::error_code ec;
  if (!fs::is_directory(corpus, ec)) throw IoError("corpus is not a directory: " + corpus.string());
  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(corpus, ec); !ec && it != fs::end(it);
       it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".mtx") {
      files.push_back(it->path().lexically_relative(corpus));
    }
  }
  if (ec) throw IoError("cannot walk " + corpus.string() + ": " + ec.message());
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.generic_string() < b.generic_string();
  });
  return files;
}

/// Name used in records: relative path without the .mtx extension.
inline std::string matrix_name(const fs::path& relative) {
  auto p = relative;
  p.replace_extension();
  return p.generic_string();
}

/// Per-matrix seed so results do not depend on which other files are present.
inline std::uint64_t matrix_seed(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return simt::splitmix64(seed ^ h);
}

/// max_i |y_i - ref_i| / (max(1, nnz_i) * max(||ref||_inf, 1e-300)); nnz_i is
/// the number of products summed into row i.
inline double spmv_relative_error(const sparse::DenseVector& y, const sparse::DenseVector& ref,
                                  const std::vector<std::size_t>& row_nnz) {
  if (y.size() != ref.size()) return INFINITY;
  double scale = 0.0;
  for (double v : ref) scale = std::max(scale, std::abs(v));
  scale = std::max(scale, 1e-300);
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double n = std::max<double>(1.0, static_cast<double>(row_nnz[i]));
    const double e = std::abs(y[i] - ref[i]) / (n * scale);
    if (std::isnan(e)) return INFINITY;
    worst = std::max(worst, e);
  }
  return worst;
}

inline double vector_relative_error(const sparse::DenseVector& x, const sparse::DenseVector& ref) {
  if (x.size() != ref.size()) return INFINITY;
  double scale = 0.0;
  for (double v : ref) scale = std::max(scale, std::abs(v));
  scale = std::max(scale, 1e-300);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::abs(x[i] - ref[i]) / scale;
    if (std::isnan(e)) return INFINITY;
    worst = std::max(worst, e);
  }
  return worst;
}

inline bool is_symmetric(const sparse::CooMatrix& m) {
  if (m.nrows() != m.ncols()) return false;
  std::vector<sparse::Triplet> t;
  t.reserve(m.nnz());
  for (std::size_t k = 0; k < m.nnz(); ++k) {
    t.push_back({m.col_idx()[k], m.row_idx()[k], m.values()[k]});
  }
  return sparse::CooMatrix::from_triplets(m.ncols(), m.nrows(), t) == m;
}

namespace detail {

struct Timed {
  simt::Counters counters;
  std::uint64_t mean_ns = 0;
};

// Warm-up runs, then timed runs; counters come from the last run.
template <class Run>
Timed measure(dispatch::Executor& exec, const BenchConfig& cfg, Run run) {
  for (std::uint32_t i = 0; i < cfg.warmup_iters; ++i) run();
  std::uint64_t total = 0;
  for (std::uint32_t i = 0; i < cfg.timed_iters; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    run();
    const auto t1 = std::chrono::steady_clock::now();
    total += static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  }
  return {exec.instrumentation_report(), total / cfg.timed_iters};
}

struct CgOutcome {
  kernels::CgResult result;
  std::optional<std::uint32_t> breakdown_at;
};

inline CgOutcome run_cg(dispatch::Executor& exec, const sparse::SellpMatrix& a,
                        const sparse::DenseVector& b, const kernels::CgOptions& options) {
  CgOutcome out;
  try {
    out.result = dispatch::dispatch(dispatch::registry().cg, exec, a, b, options);
  } catch (const BreakdownError& e) {
    // The iteration index is only carried in the message.
    const std::string what = e.what();
    const auto at = what.find("at iteration ");
    out.breakdown_at = at == std::string::npos
                           ? 0u
                           : static_cast<std::uint32_t>(std::stoul(what.substr(at + 13)));
  }
  return out;
}

}  // namespace detail

/// One record per (matrix, kernel, exec) in that sort order. Unreadable
/// matrices and kernel/matrix combinations that cannot run are skipped.
inline BenchResult run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  for (auto kernel : cfg.kernels) {
    for (auto kind : cfg.execs) {
      const auto& reg = dispatch::registry();
      const bool ok = kernel == KernelKind::coo     ? reg.spmv_coo.implemented_for(kind)
                      : kernel == KernelKind::csr   ? reg.spmv_csr.implemented_for(kind)
                      : kernel == KernelKind::sellp ? reg.spmv_sellp.implemented_for(kind)
                                                    : reg.cg.implemented_for(kind);
      if (!ok) {
        throw NotImplementedForBackend(std::string(to_string(kernel)) + " on " +
                                       std::string(dispatch::long_name(kind)));
      }
    }
  }
  auto kernels = cfg.kernels;
  std::sort(kernels.begin(), kernels.end());
  kernels.erase(std::unique(kernels.begin(), kernels.end()), kernels.end());
  auto execs = cfg.execs;
  std::sort(execs.begin(), execs.end());
  execs.erase(std::unique(execs.begin(), execs.end()), execs.end());

  const auto files = list_corpus(cfg.corpus);
  if (files.empty()) throw InvalidConfig("corpus " + cfg.corpus.string() + " has no .mtx files");

  BenchResult result;
  for (const auto& rel : files) {
    const std::string name = matrix_name(rel);
    sparse::CooMatrix coo;
    try {
      std::ifstream in(cfg.corpus / rel, std::ios::binary);
      if (!in) throw IoError("cannot read " + (cfg.corpus / rel).string());
      coo = sparse::read_matrix_market(in);
    } catch (const Error& e) {
      result.skipped.push_back({name, {}, std::string(e.kind()) + ": " + e.what()});
      continue;
    }
    const std::uint64_t mseed = matrix_seed(cfg.seed, name);
    const auto x = sparse::generate::random_vector(static_cast<std::size_t>(coo.ncols()), mseed,
                                                   false);
    std::vector<std::size_t> row_nnz(static_cast<std::size_t>(coo.nrows()), 0);
    for (auto r : coo.row_idx()) ++row_nnz[static_cast<std::size_t>(r)];

    const auto csr = sparse::coo_to_csr(coo);
    const auto sellp = sparse::coo_to_sellp(coo);
    const simt::LaunchOptions launch{cfg.seed, simt::AtomicOrder::seeded, false};

    for (auto kernel : kernels) {
      if (kernel == KernelKind::cg && !is_symmetric(coo)) {
        result.skipped.push_back({name, "cg", "matrix is not symmetric"});
        continue;
      }
      auto ref_exec = dispatch::Executor::reference();
      sparse::DenseVector ref_y;
      detail::CgOutcome ref_cg;
      const kernels::CgOptions cg_options{cfg.cg_tolerance, cfg.cg_iterations, 50};
      const auto b = sparse::generate::random_vector(static_cast<std::size_t>(coo.nrows()),
                                                     simt::splitmix64(mseed), false);
      auto run_kernel = [&](dispatch::Executor& exec, sparse::DenseVector& y,
                            detail::CgOutcome& cg) {
        const auto& reg = dispatch::registry();
        switch (kernel) {
          case KernelKind::coo: y = dispatch::dispatch(reg.spmv_coo, exec, coo, x); break;
          case KernelKind::csr: y = dispatch::dispatch(reg.spmv_csr, exec, csr, x); break;
          case KernelKind::sellp: y = dispatch::dispatch(reg.spmv_sellp, exec, sellp, x); break;
          case KernelKind::cg: cg = detail::run_cg(exec, sellp, b, cg_options); break;
        }
      };
      run_kernel(ref_exec, ref_y, ref_cg);

      for (auto kind : execs) {
        auto exec = dispatch::Executor::create(kind, launch);
        sparse::DenseVector y;
        detail::CgOutcome cg;
        const auto timed = detail::measure(exec, cfg, [&] { run_kernel(exec, y, cg); });
        BenchRecord rec;
        rec.matrix = name;
        rec.nrows = coo.nrows();
        rec.nnz = coo.nnz();
        rec.kernel = kernel;
        rec.exec = kind;
        if (kernel == KernelKind::cg) {
          if (ref_cg.breakdown_at || cg.breakdown_at) {
            rec.max_rel_err = ref_cg.breakdown_at == cg.breakdown_at ? 0.0 : INFINITY;
          } else {
            rec.max_rel_err = cg.result.iterations == ref_cg.result.iterations
                                  ? vector_relative_error(cg.result.x, ref_cg.result.x)
                                  : INFINITY;
          }
        } else {
          rec.max_rel_err = spmv_relative_error(y, ref_y, row_nnz);
        }
        rec.correct = rec.max_rel_err <= cfg.tolerance;
        rec.lane_steps = timed.counters.lane_steps;
        rec.shuffles = timed.counters.shuffles;
        rec.atomics = timed.counters.atomics;
        rec.wall_time_ns = timed.mean_ns;
        result.records.push_back(std::move(rec));
      }
    }
  }
  return result;
}

/// Reduction microbenchmark differenced between `inner_loops` and twice that.
struct ReduceRecord {
  ExecKind exec = ExecKind::sim_warp32;
  std::uint32_t subwarp_size = 0;
  std::uint32_t subwarps = 0;
  std::uint32_t inner_loops = 0;
  std::uint64_t shuffles_low = 0;   // at inner_loops
  std::uint64_t shuffles_high = 0;  // at 2 * inner_loops
  std::uint64_t difference() const { return shuffles_high - shuffles_low; }
  /// Shuffles one subwarp issues per reduction.
  double per_reduction() const {
    return static_cast<double>(difference()) / (static_cast<double>(subwarps) * inner_loops);
  }
};

inline std::vector<ReduceRecord> run_reduce_microbench(const BenchConfig& cfg) {
  if (cfg.inner_loops < 1) throw InvalidConfig("inner loops must be at least 1");
  std::vector<ReduceRecord> out;
  auto execs = cfg.execs;
  std::sort(execs.begin(), execs.end());
  execs.erase(std::unique(execs.begin(), execs.end()), execs.end());
  for (auto kind : execs) {
    if (kind == ExecKind::reference) continue;
    auto exec = dispatch::Executor::create(kind, {cfg.seed, simt::AtomicOrder::seeded, false});
    const auto warp = static_cast<std::uint32_t>(exec.config().warp_size());
    const auto input = sparse::generate::random_vector(warp, cfg.seed, false);
    for (std::uint32_t size = 1; size <= warp; size *= 2) {
      ReduceRecord rec{kind, size, warp / size, cfg.inner_loops, 0, 0};
      dispatch::dispatch(dispatch::registry().reduce, exec, size, cfg.inner_loops,
                         std::span<const double>(input));
      rec.shuffles_low = exec.instrumentation_report().shuffles;
      dispatch::dispatch(dispatch::registry().reduce, exec, size, 2 * cfg.inner_loops,
                         std::span<const double>(input));
      rec.shuffles_high = exec.instrumentation_report().shuffles;
      out.push_back(rec);
    }
  }
  return out;
}

/// Ratio of per-reduction shuffle counts of two subwarp sizes on one executor.
inline double reduce_op_ratio(const std::vector<ReduceRecord>& records, ExecKind exec,
                              std::uint32_t numerator_size, std::uint32_t denominator_size) {
  const ReduceRecord* num = nullptr;
  const ReduceRecord* den = nullptr;
  for (const auto& r : records) {
    if (r.exec != exec) continue;
    if (r.subwarp_size == numerator_size) num = &r;
    if (r.subwarp_size == denominator_size) den = &r;
  }
  if (!num || !den) throw MissingPair("reduce records lack the requested subwarp sizes");
  return num->per_reduction() / den->per_reduction();
}

}  // namespace gpuport::bench
