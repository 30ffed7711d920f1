#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gpuport/cuda2hip/paths.hpp"
#include "gpuport/cuda2hip/rules.hpp"
#include "gpuport/cuda2hip/translate.hpp"
#include "gpuport/error.hpp"

namespace gpuport::cuda2hip {

namespace fs = std::filesystem;

struct PortedFile {
  fs::path source;
  fs::path target;
  std::string content;
  TranslationStats stats;
};

struct FileRecord {
  std::string source;
  std::string target;
  std::size_t launches = 0;
  std::size_t renames = 0;
  std::vector<std::string> warnings;
  std::string error;  // empty when the file was ported

  bool ok() const noexcept { return error.empty(); }
};

struct PortReport {
  std::vector<FileRecord> files;  // sorted by source path

  std::size_t ported() const {
    return static_cast<std::size_t>(
        std::count_if(files.begin(), files.end(), [](const auto& f) { return f.ok(); }));
  }
  std::size_t errors() const { return files.size() - ported(); }
  std::size_t launches() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.launches;
    return n;
  }
  std::size_t renames() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.renames;
    return n;
  }
  std::size_t warnings() const {
    std::size_t n = 0;
    for (const auto& f : files) n += f.warnings.size();
    return n;
  }
  bool ok() const { return errors() == 0; }
};

struct PortOptions {
  std::optional<fs::path> out;  // output root; default maps `cuda/` to `hip/` in place
  bool dry_run = false;
};

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out.flush()) throw IoError("cannot write " + path.string());
}

/// Target of a source that lives under a `cuda/` directory.
inline fs::path target_path(const fs::path& source) {
  bool found = false;
  fs::path mapped = map_cuda_path(source.generic_string(), &found);
  if (!found) {
    throw InvalidConfig(source.generic_string() +
                        " is not under a cuda/ directory; an output directory is required");
  }
  return mapped;
}

/// Translates one file; nothing is written.
inline PortedFile port_file(const fs::path& source, const RuleTable& rules, fs::path target) {
  PortedFile result{source, std::move(target), {}, {}};
  auto t = translate_source(read_file(source), rules, source.generic_string());
  result.content = std::move(t.text);
  result.stats = std::move(t.stats);
  return result;
}

inline PortedFile port_file(const fs::path& source, const RuleTable& rules) {
  return port_file(source, rules, target_path(source));
}

namespace detail {

inline std::string describe(const std::exception& e) {
  if (const auto* g = dynamic_cast<const Error*>(&e)) return std::string(g->kind()) + ": " + e.what();
  return e.what();
}

inline FileRecord port_one(const fs::path& source, const fs::path& target, const RuleTable& rules,
                           bool dry_run) {
  FileRecord record{source.generic_string(), target.generic_string(), 0, 0, {}, {}};
  try {
    auto ported = port_file(source, rules, target);
    if (!dry_run) write_file(target, ported.content);
    record.launches = ported.stats.launches;
    record.renames = ported.stats.renames;
    record.warnings = std::move(ported.stats.warnings);
  } catch (const Error& e) {
    record.error = describe(e);
  }
  return record;
}

}  // namespace detail

/// Ports every `.cu` / `.cuh` file below `root` (or `root` itself if it is a
/// file). Per-file errors are collected rather than thrown.
inline PortReport port_tree(const fs::path& root, const RuleTable& rules,
                            const PortOptions& options = {}) {
  PortReport report;
  std::error_code ec;
  if (fs::is_regular_file(root, ec)) {
    fs::path target;
    try {
      target = options.out ? *options.out / map_extension(root.filename().string())
                           : target_path(root);
    } catch (const Error& e) {
      report.files.push_back({root.generic_string(), {}, 0, 0, {}, detail::describe(e)});
      return report;
    }
    report.files.push_back(detail::port_one(root, target, rules, options.dry_run));
    return report;
  }
  if (!fs::is_directory(root, ec)) throw IoError("no such file or directory: " + root.string());

  std::vector<fs::path> relative;
  for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::end(it);
       it.increment(ec)) {
    if (it->is_regular_file() && is_cuda_source(it->path().filename().string())) {
      relative.push_back(it->path().lexically_relative(root));
    }
  }
  if (ec) throw IoError("cannot walk " + root.string() + ": " + ec.message());
  std::sort(relative.begin(), relative.end(), [](const fs::path& a, const fs::path& b) {
    return a.generic_string() < b.generic_string();
  });

  for (const auto& rel : relative) {
    const fs::path source = root / rel;
    fs::path target;
    try {
      target = options.out ? *options.out / map_cuda_path(rel.generic_string())
                           : target_path(source);
    } catch (const Error& e) {
      report.files.push_back({source.generic_string(), {}, 0, 0, {}, detail::describe(e)});
      continue;
    }
    report.files.push_back(detail::port_one(source, target, rules, options.dry_run));
  }
  return report;
}

namespace detail {

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// One `file` line per file (plus `warning` lines), then a `total` line.
inline std::string format_report(const PortReport& report) {
  std::string out = "# cuda2hip report\n";
  for (const auto& f : report.files) {
    out += "file path=" + detail::quote(f.source) + " target=" + detail::quote(f.target) +
           " launches=" + std::to_string(f.launches) + " renames=" + std::to_string(f.renames) +
           " warnings=" + std::to_string(f.warnings.size());
    out += f.ok() ? " status=ok" : " status=error error=" + detail::quote(f.error);
    out += "\n";
    for (const auto& w : f.warnings) {
      out += "warning path=" + detail::quote(f.source) + " message=" + detail::quote(w) + "\n";
    }
  }
  out += "total files=" + std::to_string(report.files.size()) +
         " ported=" + std::to_string(report.ported()) +
         " launches=" + std::to_string(report.launches()) +
         " renames=" + std::to_string(report.renames()) +
         " warnings=" + std::to_string(report.warnings()) +
         " errors=" + std::to_string(report.errors()) + "\n";
  return out;
}

}  // namespace gpuport::cuda2hip
