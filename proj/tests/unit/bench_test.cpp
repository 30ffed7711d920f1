#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gpuport/bench/corpus.hpp"
#include "gpuport/bench/harness.hpp"
#include "gpuport/bench/output.hpp"
#include "gpuport/bench/stats.hpp"

namespace {

namespace fs = std::filesystem;
using namespace gpuport;
using namespace gpuport::bench;
namespace gen = gpuport::sparse::generate;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("gpuport_bench_" + name + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

BenchRecord record(const std::string& matrix, KernelKind k, ExecKind e, std::uint64_t lane_steps) {
  BenchRecord r;
  r.matrix = matrix;
  r.nrows = 10;
  r.nnz = 30;
  r.kernel = k;
  r.exec = e;
  r.correct = true;
  r.lane_steps = lane_steps;
  return r;
}

// Column-wise CSV without the trailing wall_time_ns column.
std::string drop_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

void write_three(const fs::path& dir) {
  write_corpus(dir, {{"diag", gen::diagonal(12, 3.0)},
                     {"tri", gen::tridiagonal(40)},
                     {"rand", gen::random(30, 30, 0.2, 7, false)}});
}

TEST(RatioStats, SelfRatioIsOne) {
  std::vector<BenchRecord> recs;
  for (int i = 0; i < 5; ++i) {
    recs.push_back(record("m" + std::to_string(i), KernelKind::csr, ExecKind::sim_warp32, 100 + i));
    recs.push_back(record("m" + std::to_string(i), KernelKind::csr, ExecKind::sim_warp64, 100 + i));
  }
  const auto s = compute_ratio_stats(recs, Metric::lane_steps, ExecKind::sim_warp64, ExecKind::sim_warp32);
  ASSERT_EQ(s.kernels.size(), 1u);
  for (const auto& p : s.kernels[0].points) EXPECT_EQ(p.ratio, 1.0);
  EXPECT_EQ(s.kernels[0].mean, 1.0);
  EXPECT_EQ(s.kernels[0].median, 1.0);
  EXPECT_EQ(s.kernels[0].within_3, 1.0);
  EXPECT_EQ(s.kernels[0].within_10, 1.0);
}

TEST(RatioStats, ThreePointExample) {
  std::vector<BenchRecord> recs{
      record("a", KernelKind::coo, ExecKind::sim_warp64, 90),
      record("a", KernelKind::coo, ExecKind::sim_warp32, 100),
      record("b", KernelKind::coo, ExecKind::sim_warp64, 100),
      record("b", KernelKind::coo, ExecKind::sim_warp32, 100),
      record("c", KernelKind::coo, ExecKind::sim_warp64, 110),
      record("c", KernelKind::coo, ExecKind::sim_warp32, 100),
  };
  const auto s = compute_ratio_stats(recs, Metric::lane_steps, ExecKind::sim_warp64, ExecKind::sim_warp32);
  ASSERT_EQ(s.kernels.size(), 1u);
  const auto& k = s.kernels[0];
  EXPECT_EQ(k.median, 1.0);
  EXPECT_EQ(k.within_3, 1.0 / 3.0);
  EXPECT_NEAR(k.mean, 1.0, 1e-15);
  // bands are nested around the median
  EXPECT_LE(k.p90.low, k.p50.low);
  EXPECT_LE(k.p50.low, k.median);
  EXPECT_LE(k.median, k.p50.high);
  EXPECT_LE(k.p50.high, k.p90.high);
  EXPECT_DOUBLE_EQ(k.p50.low, 0.95);
  EXPECT_DOUBLE_EQ(k.p90.high, 1.09);
}

TEST(RatioStats, TenPercentBand) {
  std::vector<BenchRecord> recs;
  const std::uint64_t a[] = {100, 105, 95, 108, 150, 40};
  for (int i = 0; i < 6; ++i) {
    recs.push_back(record("m" + std::to_string(i), KernelKind::sellp, ExecKind::sim_warp64, a[i]));
    recs.push_back(record("m" + std::to_string(i), KernelKind::sellp, ExecKind::sim_warp32, 100));
  }
  const auto s = compute_ratio_stats(recs, Metric::lane_steps, ExecKind::sim_warp64, ExecKind::sim_warp32);
  EXPECT_EQ(s.kernels[0].within_3, 1.0 / 6.0);
  EXPECT_EQ(s.kernels[0].within_10, 4.0 / 6.0);
}

TEST(RatioStats, ZeroCounts) {
  EXPECT_EQ(metric_ratio(0, 0), 1.0);
  EXPECT_TRUE(std::isinf(metric_ratio(3, 0)));
  EXPECT_EQ(metric_ratio(0, 4), 0.0);
}

TEST(RatioStats, MissingPairThrows) {
  std::vector<BenchRecord> recs{record("a", KernelKind::coo, ExecKind::sim_warp64, 1),
                                record("a", KernelKind::coo, ExecKind::sim_warp32, 1),
                                record("b", KernelKind::coo, ExecKind::sim_warp64, 1)};
  EXPECT_THROW(compute_ratio_stats(recs, Metric::lane_steps, ExecKind::sim_warp64, ExecKind::sim_warp32),
               MissingPair);
  EXPECT_THROW(compute_ratio_stats({}, Metric::shuffles, ExecKind::sim_warp64, ExecKind::sim_warp32),
               MissingPair);
}

TEST(Quantile, LinearInterpolation) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_EQ(quantile(v, 0.5), 2.5);
  EXPECT_EQ(quantile(v, 0.0), 1.0);
  EXPECT_EQ(quantile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
}

TEST(Harness, ThreeMatricesSellpNineRecords) {
  TempDir corpus("three");
  write_three(corpus.path);
  BenchConfig cfg;
  cfg.corpus = corpus.path;
  cfg.kernels = {KernelKind::sellp};
  cfg.timed_iters = 1;
  cfg.warmup_iters = 0;
  const auto result = run_benchmark(cfg);
  ASSERT_EQ(result.records.size(), 9u);
  for (const auto& r : result.records) {
    EXPECT_TRUE(r.correct) << r.matrix << " " << dispatch::short_name(r.exec);
    EXPECT_EQ(r.atomics, 0u);
  }
  EXPECT_TRUE(result.skipped.empty());
  TempDir out("three_out");
  emit_outputs(result.records, nullptr, out.path);
  const auto csv = slurp(out.path / "results.csv");
  EXPECT_EQ(count_lines(csv), 10u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), results_header);
}

TEST(Harness, RecordsSortedByMatrixKernelExec) {
  TempDir corpus("order");
  write_three(corpus.path);
  BenchConfig cfg;
  cfg.corpus = corpus.path;
  cfg.kernels = {KernelKind::sellp, KernelKind::coo};
  cfg.execs = {ExecKind::sim_warp64, ExecKind::reference};
  cfg.timed_iters = 1;
  const auto r = run_benchmark(cfg).records;
  ASSERT_EQ(r.size(), 12u);
  EXPECT_EQ(r[0].matrix, "diag");
  EXPECT_EQ(r[0].kernel, KernelKind::coo);
  EXPECT_EQ(r[0].exec, ExecKind::reference);
  EXPECT_EQ(r[1].exec, ExecKind::sim_warp64);
  EXPECT_EQ(r[2].kernel, KernelKind::sellp);
  EXPECT_EQ(r[4].matrix, "rand");
}

TEST(Harness, MalformedFileIsSkipped) {
  TempDir corpus("malformed");
  write_three(corpus.path);
  std::ofstream(corpus.path / "broken.mtx") << "%%MatrixMarket matrix coordinate real general\n3 3 2\n1 1 1.0\n";
  BenchConfig cfg;
  cfg.corpus = corpus.path;
  cfg.kernels = {KernelKind::csr};
  cfg.timed_iters = 1;
  const auto result = run_benchmark(cfg);
  EXPECT_EQ(result.records.size(), 9u);
  ASSERT_EQ(result.skipped.size(), 1u);
  EXPECT_EQ(result.skipped[0].matrix, "broken");
  EXPECT_TRUE(result.skipped[0].kernel.empty());
  EXPECT_NE(result.skipped[0].reason.find("ParseError"), std::string::npos);
  TempDir out("malformed_out");
  emit_outputs(result.records, nullptr, out.path, result.skipped);
  EXPECT_NE(slurp(out.path / "skipped.csv").find("broken"), std::string::npos);
}

TEST(Harness, AllMalformedGivesNoRecords) {
  TempDir corpus("allbad");
  std::ofstream(corpus.path / "x.mtx") << "not a matrix\n";
  BenchConfig cfg;
  cfg.corpus = corpus.path;
  cfg.timed_iters = 1;
  const auto result = run_benchmark(cfg);
  EXPECT_TRUE(result.records.empty());
  EXPECT_EQ(result.skipped.size(), 1u);
}

TEST(Harness, ConfigErrors) {
  TempDir corpus("empty");
  BenchConfig cfg;
  cfg.corpus = corpus.path;
  EXPECT_THROW(run_benchmark(cfg), InvalidConfig);
  cfg.timed_iters = 0;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  cfg.timed_iters = 1;
  cfg.corpus = corpus.path / "missing";
  EXPECT_THROW(run_benchmark(cfg), IoError);
  EXPECT_THROW(parse_kernel_kind("ell"), InvalidConfig);
}

TEST(Harness, CgSkippedForNonSymmetricAndCorrectOnPoisson) {
  TempDir corpus("cg");
  write_corpus(corpus.path, {{"poisson", gen::poisson2d(10)}, {"rand", gen::random(20, 20, 0.3, 3, false)}});
  BenchConfig cfg;
  cfg.corpus = corpus.path;
  cfg.kernels = {KernelKind::cg};
  cfg.timed_iters = 1;
  cfg.warmup_iters = 0;
  const auto result = run_benchmark(cfg);
  ASSERT_EQ(result.records.size(), 3u);
  for (const auto& r : result.records) {
    EXPECT_EQ(r.matrix, "poisson");
    EXPECT_TRUE(r.correct);
    EXPECT_EQ(r.max_rel_err, 0.0);
  }
  ASSERT_EQ(result.skipped.size(), 1u);
  EXPECT_EQ(result.skipped[0].kernel, "cg");
}

TEST(Harness, DeterministicModuloWallTime) {
  TempDir corpus("det");
  write_corpus(corpus.path, synthetic_corpus(42, 4));
  BenchConfig cfg;
  cfg.corpus = corpus.path;
  cfg.timed_iters = 1;
  cfg.warmup_iters = 1;
  const auto a = format_results_csv(run_benchmark(cfg).records);
  const auto b = format_results_csv(run_benchmark(cfg).records);
  EXPECT_EQ(drop_wall_time(a), drop_wall_time(b));
  cfg.seed = 7;
  const auto c = format_results_csv(run_benchmark(cfg).records);
  EXPECT_EQ(count_lines(c), count_lines(a));
}

TEST(Output, EmptyRecordsWriteNothing) {
  TempDir out("empty_out");
  EXPECT_THROW(emit_outputs({}, nullptr, out.path / "res"), IoError);
  EXPECT_FALSE(fs::exists(out.path / "res"));
}

TEST(Output, SvgHasOneCirclePerRatioPoint) {
  TempDir corpus("svg");
  write_corpus(corpus.path, synthetic_corpus(42, 4));
  BenchConfig cfg;
  cfg.corpus = corpus.path;
  cfg.timed_iters = 1;
  const auto result = run_benchmark(cfg);
  const auto s = compute_ratio_stats(result.records, Metric::lane_steps, ExecKind::sim_warp64,
                                     ExecKind::sim_warp32);
  std::size_t points = 0;
  for (const auto& k : s.kernels) points += k.points.size();
  std::size_t pairs = 0;
  for (const auto& r : result.records) pairs += r.exec == ExecKind::sim_warp64 ? 1 : 0;
  EXPECT_EQ(points, pairs);
  const auto svg = render_ratio_svg(s);
  EXPECT_EQ(count_of(svg, "<circle"), points);
  EXPECT_EQ(count_of(svg, "<g class=\"series\""), s.kernels.size());
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);

  TempDir out("svg_out");
  const auto files = emit_outputs(result.records, &s, out.path);
  EXPECT_EQ(files.size(), 5u);
  EXPECT_EQ(count_lines(slurp(out.path / "ratios.csv")), points + 1);
  EXPECT_EQ(count_lines(slurp(out.path / "ratio_summary.csv")), s.kernels.size() + 1);
  for (const auto& f : fs::directory_iterator(out.path)) {
    EXPECT_NE(f.path().filename().string().front(), '.');
  }
}

TEST(Output, DoubleFormattingRoundTrips) {
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(ReduceMicrobench, DifferenceFollowsLogLaw) {
  BenchConfig cfg;
  cfg.inner_loops = 1000;
  const auto recs = run_reduce_microbench(cfg);
  ASSERT_EQ(recs.size(), 6u + 7u);
  for (const auto& r : recs) {
    const auto log2size = static_cast<std::uint64_t>(std::countr_zero(r.subwarp_size));
    EXPECT_EQ(r.difference(), 1000u * log2size * r.subwarps) << r.subwarp_size;
    EXPECT_EQ(r.per_reduction(), static_cast<double>(log2size));
  }
  EXPECT_EQ(reduce_op_ratio(recs, ExecKind::sim_warp64, 4, 64), 2.0 / 6.0);
  EXPECT_EQ(reduce_op_ratio(recs, ExecKind::sim_warp32, 4, 32), 0.4);
  EXPECT_EQ(std::round(reduce_op_ratio(recs, ExecKind::sim_warp64, 4, 64) * 1000) / 1000, 0.333);
  EXPECT_THROW(reduce_op_ratio(recs, ExecKind::sim_warp32, 4, 64), MissingPair);
}

}  // namespace
