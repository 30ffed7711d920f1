#pragma once

// Rename rules and their on-disk format:
//
//   # comment
//   version = 1
//   [identifier-rename]
//   cudaMalloc = hipMalloc
//   cuFoo = hipFoo  priority=5
//
// Sections: identifier-rename (whole token), identifier-prefix (token starts
// with the pattern at a camel-case or '_' boundary), header-map (include
// targets), namespace-rename (a name used as a namespace) and mask-drop
// (whole-token rename of a call that also drops its first argument).
// Lower priority values are tried first; ties go to the longer pattern.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gpuport/error.hpp"

namespace gpuport::cuda2hip {

enum class RuleKind { identifier_rename, identifier_prefix, header_map, namespace_rename, mask_drop };

inline constexpr int rules_format_version = 1;

inline std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::identifier_rename: return "identifier-rename";
    case RuleKind::identifier_prefix: return "identifier-prefix";
    case RuleKind::header_map: return "header-map";
    case RuleKind::namespace_rename: return "namespace-rename";
    case RuleKind::mask_drop: return "mask-drop";
  }
  return "?";
}

inline std::optional<RuleKind> parse_rule_kind(std::string_view name) {
  for (auto kind : {RuleKind::identifier_rename, RuleKind::identifier_prefix, RuleKind::header_map,
                    RuleKind::namespace_rename, RuleKind::mask_drop}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

inline int default_priority(RuleKind kind) {
  switch (kind) {
    case RuleKind::namespace_rename: return 0;
    case RuleKind::identifier_rename:
    case RuleKind::mask_drop: return 10;
    case RuleKind::identifier_prefix: return 20;
    case RuleKind::header_map: return 0;
  }
  return 0;
}

struct RewriteRule {
  RuleKind kind;
  std::string pattern;
  std::string replacement;
  int priority = 0;

  bool operator==(const RewriteRule&) const = default;
};

class RuleTable {
 public:
  /// Adds a rule, replacing an existing one with the same kind and pattern.
  void add(RewriteRule rule) {
    auto it = std::find_if(rules_.begin(), rules_.end(), [&](const RewriteRule& r) {
      return r.kind == rule.kind && r.pattern == rule.pattern;
    });
    if (it != rules_.end()) {
      *it = std::move(rule);
    } else {
      rules_.push_back(std::move(rule));
    }
    std::stable_sort(rules_.begin(), rules_.end(), [](const RewriteRule& a, const RewriteRule& b) {
      if (a.priority != b.priority) return a.priority < b.priority;
      return a.pattern.size() > b.pattern.size();
    });
  }

  void merge(const RuleTable& other) {
    for (const auto& r : other.rules_) add(r);
  }

  /// Rules in application order.
  const std::vector<RewriteRule>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }

  std::optional<std::string> header(std::string_view name) const {
    for (const auto& r : rules_) {
      if (r.kind == RuleKind::header_map && r.pattern == name) return r.replacement;
    }
    return std::nullopt;
  }

 private:
  std::vector<RewriteRule> rules_;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace detail

inline RuleTable parse_rules(std::string_view text, std::string_view origin = "<rules>") {
  RuleTable table;
  std::optional<RuleKind> section;
  bool have_version = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  auto fail = [&](const std::string& what) {
    throw RuleFileError(std::string(origin) + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const auto line = detail::trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (!have_version) {
      const auto eq = line.find('=');
      if (eq == std::string::npos || detail::trim(line.substr(0, eq)) != "version") {
        fail("the first entry must be 'version = " + std::to_string(rules_format_version) + "'");
      }
      if (detail::trim(line.substr(eq + 1)) != std::to_string(rules_format_version)) {
        fail("unsupported rules version '" + detail::trim(line.substr(eq + 1)) + "'");
      }
      have_version = true;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = parse_rule_kind(detail::trim(std::string_view(line).substr(1, line.size() - 2)));
      if (!section) fail("unknown section " + line);
      continue;
    }
    if (!section) fail("rule outside of a section");
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'pattern = replacement'");
    RewriteRule rule{*section, detail::trim(line.substr(0, eq)), {}, default_priority(*section)};
    std::istringstream rhs(line.substr(eq + 1));
    std::string word;
    std::vector<std::string> words;
    while (rhs >> word) words.push_back(word);
    if (rule.pattern.empty() || words.empty()) fail("empty pattern or replacement");
    rule.replacement = words[0];
    for (std::size_t i = 1; i < words.size(); ++i) {
      if (words[i].rfind("priority=", 0) != 0) fail("unexpected '" + words[i] + "'");
      try {
        std::size_t used = 0;
        rule.priority = std::stoi(words[i].substr(9), &used);
        if (used != words[i].size() - 9) fail("bad priority");
      } catch (const std::logic_error&) {
        fail("bad priority '" + words[i] + "'");
      }
    }
    table.add(std::move(rule));
  }
  if (!have_version) fail("missing version line");
  return table;
}

inline RuleTable load_rules(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read rules file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rules(buf.str(), path);
}

inline std::string format_rules(const RuleTable& table) {
  std::string out = "version = " + std::to_string(rules_format_version) + "\n";
  for (auto kind : {RuleKind::identifier_rename, RuleKind::identifier_prefix, RuleKind::header_map,
                    RuleKind::namespace_rename, RuleKind::mask_drop}) {
    out += "\n[" + std::string(to_string(kind)) + "]\n";
    for (const auto& r : table.rules()) {
      if (r.kind != kind) continue;
      out += r.pattern + " = " + r.replacement;
      if (r.priority != default_priority(kind)) out += "  priority=" + std::to_string(r.priority);
      out += "\n";
    }
  }
  return out;
}

/// Text of the built-in table; data/cuda2hip.rules holds the same bytes.
inline constexpr std::string_view builtin_rules_text = R"rules(# Built-in CUDA -> HIP rename table.
version = 1

[identifier-rename]
cuComplex = hipComplex
cuFloatComplex = hipFloatComplex
cuDoubleComplex = hipDoubleComplex
make_cuComplex = make_hipComplex
make_cuFloatComplex = make_hipFloatComplex
make_cuDoubleComplex = make_hipDoubleComplex
cuCreal = hipCreal
cuCrealf = hipCrealf
cuCimag = hipCimag
cuCimagf = hipCimagf
cuConj = hipConj
cuConjf = hipConjf
cuCadd = hipCadd
cuCaddf = hipCaddf
cuCsub = hipCsub
cuCsubf = hipCsubf
cuCmul = hipCmul
cuCmulf = hipCmulf
cuCdiv = hipCdiv
cuCdivf = hipCdivf
cuCabs = hipCabs
cuCabsf = hipCabsf
curand_init = hiprand_init
curand_uniform = hiprand_uniform
curand_uniform_double = hiprand_uniform_double
curand_normal = hiprand_normal
curand_normal_double = hiprand_normal_double

[identifier-prefix]
cuda = hip
cublas = hipblas
cusparse = hipsparse
curand = hiprand
CUBLAS_ = HIPBLAS_
CUSPARSE_ = HIPSPARSE_
CURAND_ = HIPRAND_

[header-map]
cuda.h = hip/hip_runtime.h
cuda_runtime.h = hip/hip_runtime.h
cuda_runtime_api.h = hip/hip_runtime_api.h
cuComplex.h = hip/hip_complex.h
cuda_fp16.h = hip/hip_fp16.h
cooperative_groups.h = hip/hip_cooperative_groups.h
cublas.h = hipblas.h
cublas_v2.h = hipblas.h
cusparse.h = hipsparse.h
cusparse_v2.h = hipsparse.h
curand.h = hiprand.h
curand_kernel.h = hiprand_kernel.h
cub/cub.cuh = hipcub/hipcub.hpp

[namespace-rename]
cuda = hip

[mask-drop]
__shfl_sync = __shfl
__shfl_up_sync = __shfl_up
__shfl_down_sync = __shfl_down
__shfl_xor_sync = __shfl_xor
__ballot_sync = __ballot
__any_sync = __any
__all_sync = __all
)rules";

inline const RuleTable& builtin_rules() {
  static const RuleTable table = parse_rules(builtin_rules_text, "<builtin>");
  return table;
}

}  // namespace gpuport::cuda2hip
