#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "gpuport/bench/harness.hpp"
#include "gpuport/error.hpp"

namespace gpuport::bench {

enum class Metric { lane_steps, shuffles, wall_time };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::lane_steps: return "lane_steps";
    case Metric::shuffles: return "shuffles";
    case Metric::wall_time: return "wall_time";
  }
  return "?";
}

inline Metric parse_metric(std::string_view name) {
  for (auto m : {Metric::lane_steps, Metric::shuffles, Metric::wall_time}) {
    if (to_string(m) == name) return m;
  }
  throw InvalidConfig("unknown metric '" + std::string(name) +
                      "' (expected lane_steps, shuffles or wall_time)");
}

inline double metric_value(const BenchRecord& r, Metric m) {
  switch (m) {
    case Metric::lane_steps: return static_cast<double>(r.lane_steps);
    case Metric::shuffles: return static_cast<double>(r.shuffles);
    case Metric::wall_time: return static_cast<double>(r.wall_time_ns);
  }
  return 0.0;
}

/// metric(a) / metric(b); two zero counts are treated as equal cost.
inline double metric_ratio(double a, double b) {
  if (a == 0.0 && b == 0.0) return 1.0;
  if (b == 0.0) return std::numeric_limits<double>::infinity();
  return a / b;
}

struct RatioPoint {
  std::string matrix;
  std::size_t nnz = 0;
  double ratio = 1.0;
};

struct Band {
  double low = 0.0;
  double high = 0.0;
};

struct KernelRatioSummary {
  KernelKind kernel = KernelKind::coo;
  std::vector<RatioPoint> points;  // sorted by matrix name
  double mean = 0.0;
  double median = 0.0;
  Band p50;  // [q25, q75]
  Band p90;  // [q05, q95]
  double within_3 = 0.0;   // fraction with |r - 1| <= 0.03
  double within_10 = 0.0;  // fraction with |r - 1| <= 0.10
};

struct RatioSummary {
  Metric metric = Metric::lane_steps;
  ExecKind a = ExecKind::sim_warp64;
  ExecKind b = ExecKind::sim_warp32;
  std::vector<KernelRatioSummary> kernels;  // in KernelKind order
};

/// Linear-interpolation quantile of sorted data (position q * (n - 1)).
inline double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline void summarize(KernelRatioSummary& s) {
  std::vector<double> r;
  r.reserve(s.points.size());
  for (const auto& p : s.points) r.push_back(p.ratio);
  double sum = 0.0;
  std::size_t in3 = 0;
  std::size_t in10 = 0;
  for (double v : r) {
    sum += v;
    if (std::abs(v - 1.0) <= 0.03) ++in3;
    if (std::abs(v - 1.0) <= 0.10) ++in10;
  }
  const double n = static_cast<double>(r.size());
  s.mean = sum / n;
  s.within_3 = static_cast<double>(in3) / n;
  s.within_10 = static_cast<double>(in10) / n;
  std::sort(r.begin(), r.end());
  s.median = quantile(r, 0.5);
  s.p50 = {quantile(r, 0.25), quantile(r, 0.75)};
  s.p90 = {quantile(r, 0.05), quantile(r, 0.95)};
}

/// Per-kernel distribution of metric(a) / metric(b) over matrices.
inline RatioSummary compute_ratio_stats(const std::vector<BenchRecord>& records, Metric metric,
                                        ExecKind a, ExecKind b) {
  RatioSummary summary{metric, a, b, {}};
  using Key = std::tuple<KernelKind, std::string>;
  std::map<Key, const BenchRecord*> ra;
  std::map<Key, const BenchRecord*> rb;
  for (const auto& r : records) {
    if (r.exec == a) ra[{r.kernel, r.matrix}] = &r;
    if (r.exec == b) rb[{r.kernel, r.matrix}] = &r;
  }
  for (const auto& [key, rec] : ra) {
    if (!rb.count(key)) {
      throw MissingPair(std::string(dispatch::short_name(b)) + " record missing for " +
                        std::get<1>(key) + "/" + std::string(to_string(std::get<0>(key))));
    }
  }
  for (const auto& [key, rec] : rb) {
    if (!ra.count(key)) {
      throw MissingPair(std::string(dispatch::short_name(a)) + " record missing for " +
                        std::get<1>(key) + "/" + std::string(to_string(std::get<0>(key))));
    }
  }
  if (ra.empty()) {
    throw MissingPair("no records for " + std::string(dispatch::short_name(a)) + " and " +
                      std::string(dispatch::short_name(b)));
  }
  for (const auto& [key, rec] : ra) {
    const auto kernel = std::get<0>(key);
    if (summary.kernels.empty() || summary.kernels.back().kernel != kernel) {
      summary.kernels.push_back({});
      summary.kernels.back().kernel = kernel;
    }
    const auto* other = rb.at(key);
    summary.kernels.back().points.push_back(
        {rec->matrix, rec->nnz, metric_ratio(metric_value(*rec, metric), metric_value(*other, metric))});
  }
  for (auto& k : summary.kernels) summarize(k);
  return summary;
}

}  // namespace gpuport::bench
