// Cross-backend SpMV/CG benchmark over a MatrixMarket corpus.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gpuport/bench/corpus.hpp"
#include "gpuport/bench/harness.hpp"
#include "gpuport/bench/output.hpp"
#include "gpuport/bench/stats.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  return out;
}

bool has(const std::vector<gpuport::dispatch::ExecKind>& v, gpuport::dispatch::ExecKind k) {
  return std::find(v.begin(), v.end(), k) != v.end();
}

}  // namespace

int main(int argc, char** argv) {
  namespace bench = gpuport::bench;
  namespace dispatch = gpuport::dispatch;

  CLI::App app{"Run SpMV/CG on the reference and simulated backends and compare them"};
  std::string corpus;
  std::string kernels = "coo,csr,sellp,cg";
  std::string execs = "ref,warp32,warp64";
  std::string out;
  std::string ratio = "warp64/warp32";
  std::string metric = "lane_steps";
  bench::BenchConfig cfg;
  bool strict = false;
  bool reduce = false;
  bool make_corpus = false;
  app.add_option("--corpus", corpus, "Directory of .mtx files");
  app.add_option("--kernels", kernels, "Comma-separated subset of coo,csr,sellp,cg")->capture_default_str();
  app.add_option("--execs", execs, "Comma-separated subset of ref,warp32,warp64")->capture_default_str();
  app.add_option("--warmup", cfg.warmup_iters, "Warm-up runs per case")->capture_default_str();
  app.add_option("--iters", cfg.timed_iters, "Timed runs per case")->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--inner-loops", cfg.inner_loops, "Reduction microbenchmark loop count")
      ->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Seed for inputs and atomic scheduling")->capture_default_str();
  app.add_option("--tolerance", cfg.tolerance, "Relative error accepted as correct")->capture_default_str();
  app.add_flag("--strict", strict, "Exit nonzero if any record is incorrect");
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--ratio", ratio, "Executor pair A/B for ratio statistics")->capture_default_str();
  app.add_option("--ratio-metric", metric, "lane_steps, shuffles or wall_time")->capture_default_str();
  app.add_flag("--reduce", reduce, "Also run the reduction microbenchmark (reduce.csv)");
  app.add_flag("--make-corpus", make_corpus, "Write the synthetic corpus into --corpus first");
  CLI11_PARSE(app, argc, argv);

  try {
    cfg.kernels.clear();
    for (const auto& k : split_list(kernels)) cfg.kernels.push_back(bench::parse_kernel_kind(k));
    cfg.execs.clear();
    for (const auto& e : split_list(execs)) cfg.execs.push_back(dispatch::parse_exec_kind(e));
    const auto slash = ratio.find('/');
    if (slash == std::string::npos) throw gpuport::InvalidConfig("--ratio expects A/B, got '" + ratio + "'");
    const std::vector<std::string> pair{ratio.substr(0, slash), ratio.substr(slash + 1)};
    const auto ra = dispatch::parse_exec_kind(pair[0]);
    const auto rb = dispatch::parse_exec_kind(pair[1]);
    const auto m = bench::parse_metric(metric);

    if (reduce) {
      const auto records = bench::run_reduce_microbench(cfg);
      bench::write_files_atomically(out, {{"reduce.csv", bench::format_reduce_csv(records)}});
      std::cout << bench::format_reduce_csv(records);
      if (corpus.empty()) return 0;
    }
    if (corpus.empty()) {
      std::cerr << "bench: --corpus is required\n";
      return 2;
    }
    cfg.corpus = corpus;
    if (make_corpus) bench::write_corpus(cfg.corpus, bench::synthetic_corpus(cfg.seed));

    const auto result = bench::run_benchmark(cfg);
    for (const auto& s : result.skipped) {
      std::cerr << "skipped " << s.matrix << (s.kernel.empty() ? "" : " [" + s.kernel + "]")
                << ": " << s.reason << "\n";
    }
    if (result.records.empty()) {
      std::cerr << "bench: no matrix could be processed\n";
      return 1;
    }

    std::optional<bench::RatioSummary> summary;
    if (has(cfg.execs, ra) && has(cfg.execs, rb) && ra != rb) {
      summary = bench::compute_ratio_stats(result.records, m, ra, rb);
    }
    bench::emit_outputs(result.records, summary ? &*summary : nullptr, out, result.skipped);

    std::size_t incorrect = 0;
    for (const auto& r : result.records) incorrect += r.correct ? 0 : 1;
    std::printf("records=%zu incorrect=%zu skipped=%zu\n", result.records.size(), incorrect,
                result.skipped.size());
    if (summary) {
      for (const auto& k : summary->kernels) {
        std::printf("%s %s %s/%s: n=%zu mean=%.6f median=%.6f within3=%.4f within10=%.4f\n",
                    std::string(bench::to_string(k.kernel)).c_str(),
                    std::string(bench::to_string(summary->metric)).c_str(),
                    std::string(dispatch::short_name(ra)).c_str(),
                    std::string(dispatch::short_name(rb)).c_str(), k.points.size(), k.mean,
                    k.median, k.within_3, k.within_10);
      }
    }
    if (strict && incorrect > 0) {
      std::cerr << "bench: " << incorrect << " incorrect record(s)\n";
      return 3;
    }
    return 0;
  } catch (const gpuport::Error& e) {
    std::cerr << "bench: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  }
}
