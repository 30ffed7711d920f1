#pragma once

// Result files: results.csv, ratios.csv (one row per ratio point),
// ratio_summary.csv, skipped.csv and ratios.svg.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gpuport/bench/harness.hpp"
#include "gpuport/bench/stats.hpp"
#include "gpuport/error.hpp"

namespace gpuport::bench {

inline constexpr std::string_view results_header =
    "matrix,nrows,nnz,kernel,exec,correct,max_rel_err,lane_steps,shuffles,atomics,wall_time_ns";

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string format_results_csv(const std::vector<BenchRecord>& records) {
  std::string out = std::string(results_header) + "\n";
  for (const auto& r : records) {
    out += detail::csv_field(r.matrix) + "," + std::to_string(r.nrows) + "," +
           std::to_string(r.nnz) + "," + std::string(to_string(r.kernel)) + "," +
           std::string(dispatch::short_name(r.exec)) + "," + (r.correct ? "true" : "false") + "," +
           format_double(r.max_rel_err) + "," + std::to_string(r.lane_steps) + "," +
           std::to_string(r.shuffles) + "," + std::to_string(r.atomics) + "," +
           std::to_string(r.wall_time_ns) + "\n";
  }
  return out;
}

inline std::string format_ratio_points_csv(const RatioSummary& s) {
  std::string out = "kernel,matrix,nnz,ratio\n";
  for (const auto& k : s.kernels) {
    for (const auto& p : k.points) {
      out += std::string(to_string(k.kernel)) + "," + detail::csv_field(p.matrix) + "," +
             std::to_string(p.nnz) + "," + format_double(p.ratio) + "\n";
    }
  }
  return out;
}

inline std::string format_ratio_summary_csv(const RatioSummary& s) {
  std::string out =
      "kernel,metric,a,b,count,mean,median,p50_low,p50_high,p90_low,p90_high,within_3,within_10\n";
  for (const auto& k : s.kernels) {
    out += std::string(to_string(k.kernel)) + "," + std::string(to_string(s.metric)) + "," +
           std::string(dispatch::short_name(s.a)) + "," + std::string(dispatch::short_name(s.b)) +
           "," + std::to_string(k.points.size()) + "," + format_double(k.mean) + "," +
           format_double(k.median) + "," + format_double(k.p50.low) + "," +
           format_double(k.p50.high) + "," + format_double(k.p90.low) + "," +
           format_double(k.p90.high) + "," + format_double(k.within_3) + "," +
           format_double(k.within_10) + "\n";
  }
  return out;
}

inline std::string format_skipped_csv(const std::vector<SkipEntry>& skipped) {
  std::string out = "matrix,kernel,reason\n";
  for (const auto& s : skipped) {
    out += detail::csv_field(s.matrix) + "," + s.kernel + "," + detail::csv_field(s.reason) + "\n";
  }
  return out;
}

/// Scatter of ratio against nnz (log x), one colour per kernel, and a
/// dashed reference line at 1.0. Every ratio point is one <circle>.
inline std::string render_ratio_svg(const RatioSummary& s) {
  constexpr double width = 720, height = 440, left = 70, right = 150, top = 40, bottom = 60;
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  static constexpr const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  double xmin = INFINITY, xmax = -INFINITY, ymin = 1.0, ymax = 1.0;
  for (const auto& k : s.kernels) {
    for (const auto& p : k.points) {
      const double lx = std::log10(std::max<double>(1.0, static_cast<double>(p.nnz)));
      xmin = std::min(xmin, lx);
      xmax = std::max(xmax, lx);
      if (std::isfinite(p.ratio)) {
        ymin = std::min(ymin, p.ratio);
        ymax = std::max(ymax, p.ratio);
      }
    }
  }
  if (!(xmin < xmax)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  const double pad = std::max(0.05, 0.1 * (ymax - ymin));
  ymin -= pad;
  ymax += pad;
  auto sx = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double r) {
    const double c = std::isfinite(r) ? r : ymax;
    return top + (ymax - c) / (ymax - ymin) * ph;
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<title>" + std::string(to_string(s.metric)) + " ratio " +
         std::string(dispatch::short_name(s.a)) + "/" + std::string(dispatch::short_name(s.b)) +
         "</title>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  // decade ticks on the log axis
  for (int d = static_cast<int>(std::ceil(xmin)); d <= static_cast<int>(std::floor(xmax)); ++d) {
    const double x = sx(d);
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(x) + "\" y2=\"" +
           num(top + ph + 5) + "\" stroke=\"#444\"/>\n";
    out += "<text x=\"" + num(x) + "\" y=\"" + num(top + ph + 18) +
           "\" text-anchor=\"middle\">1e" + std::to_string(d) + "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double r = ymin + (ymax - ymin) * i / 4.0;
    out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(sy(r) + 4) +
           "\" text-anchor=\"end\">" + num(r) + "</text>\n";
  }
  out += "<line x1=\"" + num(left) + "\" y1=\"" + num(sy(1.0)) + "\" x2=\"" + num(left + pw) +
         "\" y2=\"" + num(sy(1.0)) + "\" stroke=\"#000\" stroke-dasharray=\"6 4\"/>\n";
  out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 15) +
         "\" text-anchor=\"middle\">nnz (log scale)</text>\n";
  out += "<text x=\"18\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num(top + ph / 2) + ")\">" + std::string(to_string(s.metric)) + " " +
         std::string(dispatch::short_name(s.a)) + " / " + std::string(dispatch::short_name(s.b)) +
         "</text>\n";

  for (std::size_t i = 0; i < s.kernels.size(); ++i) {
    const auto& k = s.kernels[i];
    const char* colour = colours[static_cast<std::size_t>(k.kernel) % 4];
    out += "<g class=\"series\" data-kernel=\"" + std::string(to_string(k.kernel)) + "\" fill=\"" +
           colour + "\">\n";
    for (const auto& p : k.points) {
      const double lx = std::log10(std::max<double>(1.0, static_cast<double>(p.nnz)));
      out += "<circle cx=\"" + num(sx(lx)) + "\" cy=\"" + num(sy(p.ratio)) + "\" r=\"3\"><title>" +
             detail::xml_escape(p.matrix) + " " + format_double(p.ratio) + "</title></circle>\n";
    }
    out += "</g>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(i);
    out += "<rect x=\"" + num(left + pw + 15) + "\" y=\"" + num(ly - 8) +
           "\" width=\"10\" height=\"10\" fill=\"" + colour + "\"/>\n";
    out += "<text x=\"" + num(left + pw + 30) + "\" y=\"" + num(ly + 1) + "\">" +
           std::string(to_string(k.kernel)) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

struct OutputFile {
  std::string name;
  std::string content;
};

/// Writes all files or none: contents go to temporaries first and are
/// renamed into place only after every write succeeded.
inline void write_files_atomically(const fs::path& dir, const std::vector<OutputFile>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (const auto& f : files) {
    const fs::path tmp = dir / ("." + f.name + ".tmp");
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << f.content;
    if (!out.flush()) {
      cleanup();
      throw IoError("cannot write " + tmp.string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    fs::rename(temps[i], dir / files[i].name, ec);
    if (ec) {
      cleanup();
      throw IoError("cannot rename into " + (dir / files[i].name).string() + ": " + ec.message());
    }
  }
}

/// results.csv and skipped.csv always; ratio files when a summary is given.
inline std::vector<fs::path> emit_outputs(const std::vector<BenchRecord>& records,
                                          const RatioSummary* summary, const fs::path& out_dir,
                                          const std::vector<SkipEntry>& skipped = {}) {
  if (records.empty()) throw IoError("no benchmark records to write");
  std::vector<OutputFile> files{{"results.csv", format_results_csv(records)},
                                {"skipped.csv", format_skipped_csv(skipped)}};
  if (summary) {
    files.push_back({"ratios.csv", format_ratio_points_csv(*summary)});
    files.push_back({"ratio_summary.csv", format_ratio_summary_csv(*summary)});
    files.push_back({"ratios.svg", render_ratio_svg(*summary)});
  }
  write_files_atomically(out_dir, files);
  std::vector<fs::path> paths;
  for (const auto& f : files) paths.push_back(out_dir / f.name);
  return paths;
}

/// Reduction microbenchmark table.
inline std::string format_reduce_csv(const std::vector<ReduceRecord>& records) {
  std::string out = "exec,subwarp_size,subwarps,inner_loops,shuffles_low,shuffles_high,difference,per_reduction\n";
  for (const auto& r : records) {
    out += std::string(dispatch::short_name(r.exec)) + "," + std::to_string(r.subwarp_size) + "," +
           std::to_string(r.subwarps) + "," + std::to_string(r.inner_loops) + "," +
           std::to_string(r.shuffles_low) + "," + std::to_string(r.shuffles_high) + "," +
           std::to_string(r.difference()) + "," + format_double(r.per_reduction()) + "\n";
  }
  return out;
}

}  // namespace gpuport::bench
