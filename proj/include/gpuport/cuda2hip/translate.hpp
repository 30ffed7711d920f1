#pragma once

#include <cctype>
#include <cstddef>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "gpuport/cuda2hip/paths.hpp"
#include "gpuport/cuda2hip/rules.hpp"
#include "gpuport/cuda2hip/tokenizer.hpp"
#include "gpuport/error.hpp"

namespace gpuport::cuda2hip {

struct TranslationStats {
  std::size_t launches = 0;
  std::size_t renames = 0;
  std::vector<std::string> warnings;

  TranslationStats& operator+=(const TranslationStats& o) {
    launches += o.launches;
    renames += o.renames;
    warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
    return *this;
  }
};

/// A parsed `kernel<<<config>>>(args)` site, as token index ranges.
struct LaunchSite {
  std::size_t begin = 0;  // first token of the kernel path
  std::size_t end = 0;    // one past the closing ')'
  std::string kernel;     // verbatim kernel path, e.g. "ns::kern<float>"
  bool templated = false;
  std::vector<std::string> config;  // 2 to 4 expressions
  std::string args;                 // text between the call parentheses, trimmed
  std::size_t line = 0;
};

namespace detail {

inline std::string trim_all(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\v\f");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\v\f");
  return std::string(s.substr(first, last - first + 1));
}

inline std::string join(const std::vector<Token>& tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) out += tokens[i].text;
  return out;
}

inline bool only_chars(const Token& t, char c) {
  return t.kind == TokenKind::punctuation && !t.text.empty() &&
         t.text.find_first_not_of(c) == std::string::npos;
}

[[noreturn]] inline void malformed(std::size_t line, const std::string& what) {
  throw MalformedLaunch("line " + std::to_string(line) + ": " + what);
}

// Walks back from the token before `<<<` over `[::] id (:: id)* [<targs>]`.
inline std::size_t kernel_path_begin(const std::vector<Token>& toks, std::size_t open,
                                     bool& templated) {
  const std::size_t line = toks[open].line;
  std::size_t i = prev_significant(toks, open);
  templated = false;
  if (i == std::string::npos) malformed(line, "'<<<' without a kernel name");
  if (only_chars(toks[i], '>')) {
    // Template argument list; brackets of every kind must balance.
    std::ptrdiff_t angle = 0;
    std::ptrdiff_t nest = 0;
    while (true) {
      const auto& t = toks[i];
      if (t.kind == TokenKind::punctuation) {
        if (nest == 0 && only_chars(t, '>')) angle += static_cast<std::ptrdiff_t>(t.text.size());
        if (nest == 0 && t.text == "<") angle -= 1;
        if (t.text == ")" || t.text == "]" || t.text == "}") ++nest;
        if (t.text == "(" || t.text == "[" || t.text == "{") --nest;
        if (t.text == ";" || t.text == "<<<") malformed(line, "unbalanced template arguments");
      }
      if (angle == 0 && nest == 0) break;
      if (angle < 0 || nest < 0) malformed(line, "unbalanced template arguments");
      i = prev_significant(toks, i);
      if (i == std::string::npos) malformed(line, "unbalanced template arguments");
    }
    templated = true;
    i = prev_significant(toks, i);
    if (i == std::string::npos) malformed(line, "template arguments without a kernel name");
  }
  if (toks[i].kind != TokenKind::identifier) malformed(line, "'<<<' not preceded by a kernel name");
  while (true) {
    const std::size_t sep = prev_significant(toks, i);
    if (sep == std::string::npos || !toks[sep].punct("::")) break;
    const std::size_t scope = prev_significant(toks, sep);
    if (scope != std::string::npos && toks[scope].kind == TokenKind::identifier) {
      i = scope;
    } else {
      i = sep;  // leading global qualifier
      break;
    }
  }
  return i;
}

// Splits the tokens in [begin, end) on commas outside any brackets.
inline std::vector<std::string> split_top_level(const std::vector<Token>& toks, std::size_t begin,
                                                std::size_t end) {
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = begin;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& t = toks[i];
    if (t.kind != TokenKind::punctuation) continue;
    if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
    if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
    if (t.text == "," && depth == 0) {
      parts.push_back(trim_all(join(toks, start, i)));
      start = i + 1;
    }
  }
  parts.push_back(trim_all(join(toks, start, end)));
  return parts;
}

inline LaunchSite parse_launch(const std::vector<Token>& toks, std::size_t open) {
  LaunchSite site;
  site.line = toks[open].line;
  site.begin = kernel_path_begin(toks, open, site.templated);
  site.kernel = trim_all(join(toks, site.begin, open));

  int depth = 0;
  std::size_t close = open + 1;
  for (; close < toks.size(); ++close) {
    const auto& t = toks[close];
    if (t.kind == TokenKind::preprocessor) break;
    if (t.kind != TokenKind::punctuation) continue;
    if (t.text == "<<<") malformed(site.line, "nested '<<<'");
    if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
    if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
    if (depth < 0 || t.text == ";") break;
    if (t.text == ">>>" && depth == 0) break;
  }
  if (close >= toks.size() || !toks[close].punct(">>>")) {
    malformed(site.line, "'<<<' without a matching '>>>'");
  }
  site.config = split_top_level(toks, open + 1, close);
  if (site.config.size() < 2 || site.config.size() > 4) {
    malformed(site.line, "launch configuration has " + std::to_string(site.config.size()) +
                             " expressions; expected 2 to 4");
  }
  for (const auto& e : site.config) {
    if (e.empty()) malformed(site.line, "empty launch configuration expression");
  }

  const std::size_t lparen = next_significant(toks, close + 1);
  if (lparen >= toks.size() || !toks[lparen].punct("(")) {
    malformed(site.line, "'>>>' not followed by an argument list");
  }
  depth = 0;
  std::size_t rparen = lparen;
  for (; rparen < toks.size(); ++rparen) {
    const auto& t = toks[rparen];
    if (t.kind != TokenKind::punctuation) continue;
    if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
    if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
    if (depth == 0) break;
  }
  if (rparen >= toks.size()) malformed(site.line, "unterminated kernel argument list");
  site.args = trim_all(join(toks, lparen + 1, rparen));
  site.end = rparen + 1;
  return site;
}

inline std::string hip_launch_text(const LaunchSite& site) {
  std::string out = "hipLaunchKernelGGL(";
  out += site.templated ? "HIP_KERNEL_NAME(" + site.kernel + ")" : site.kernel;
  for (std::size_t k = 0; k < 4; ++k) {
    out += ", ";
    out += k < site.config.size() ? site.config[k] : "0";
  }
  if (!site.args.empty()) out += ", " + site.args;
  out += ")";
  return out;
}

/// Replaces tokens [begin, end) by the tokens of `text`.
inline void splice(std::vector<Token>& toks, std::size_t begin, std::size_t end,
                   const std::string& text, std::size_t line, bool directive_body) {
  auto fresh = tokenize(text, {}, {line, directive_body}).tokens;
  toks.erase(toks.begin() + static_cast<std::ptrdiff_t>(begin),
             toks.begin() + static_cast<std::ptrdiff_t>(end));
  toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(begin), fresh.begin(), fresh.end());
}

inline bool is_include(const std::string& directive) {
  static const std::regex re(R"(^\s*#\s*include\b)");
  return std::regex_search(directive, re);
}

template <class Pass>
std::string rewrite_directive(const Token& directive, Pass pass) {
  // Strip the '#' only logically: the body lexes with '#' as punctuation.
  auto tokens = tokenize(directive.text, {}, {directive.line, true}).tokens;
  pass(tokens, true);
  std::string out;
  for (const auto& t : tokens) out += t.text;
  return out;
}

inline void rewrite_launches(std::vector<Token>& toks, bool directive_body,
                             TranslationStats& stats) {
  for (std::size_t i = 0; i < toks.size(); ++i) {
    auto& t = toks[i];
    if (t.kind == TokenKind::preprocessor) {
      if (!is_include(t.text)) {
        t.text = rewrite_directive(t, [&](std::vector<Token>& body, bool nested) {
          rewrite_launches(body, nested, stats);
        });
      }
      continue;
    }
    if (!t.punct("<<<")) continue;
    const auto site = parse_launch(toks, i);
    splice(toks, site.begin, site.end, hip_launch_text(site), site.line, directive_body);
    ++stats.launches;
    i = site.begin;
  }
}

inline bool camel_boundary(const std::string& id, const std::string& prefix) {
  if (id.size() <= prefix.size() || id.compare(0, prefix.size(), prefix) != 0) return false;
  if (prefix.back() == '_') return true;
  return std::isupper(static_cast<unsigned char>(id[prefix.size()])) != 0;
}

inline std::string rewrite_include(const std::string& directive, const RuleTable& rules,
                                   TranslationStats& stats) {
  static const std::regex re(R"re(^(\s*#\s*include\s*)(<([^>\n]*)>|"([^"\n]*)"))re");
  std::smatch m;
  if (!std::regex_search(directive, m, re)) return directive;
  const bool angled = m[3].matched;
  const std::string name = angled ? m[3].str() : m[4].str();
  std::string mapped;
  if (auto h = rules.header(name)) {
    mapped = *h;
  } else if (!angled) {
    mapped = map_include_path(name);
  }
  if (mapped.empty() || mapped == name) return directive;
  ++stats.renames;
  const std::string open = angled ? "<" : "\"";
  const std::string close = angled ? ">" : "\"";
  return m[1].str() + open + mapped + close + m.suffix().str();
}

inline void rename_tokens(std::vector<Token>& toks, const RuleTable& rules,
                          TranslationStats& stats) {
  for (std::size_t i = 0; i < toks.size(); ++i) {
    auto& t = toks[i];
    if (t.kind == TokenKind::preprocessor) {
      const auto before = t.text;
      if (is_include(t.text)) {
        t.text = rewrite_include(t.text, rules, stats);
      } else {
        t.text = rewrite_directive(t, [&](std::vector<Token>& body, bool) {
          rename_tokens(body, rules, stats);
        });
      }
      continue;
    }
    if (t.kind != TokenKind::identifier) continue;
    if (t.text == "__launch_bounds__") {
      stats.warnings.push_back("line " + std::to_string(t.line) +
                               ": __launch_bounds__ kept unchanged; review it for the "
                               "target wavefront size");
      continue;
    }
    const std::size_t next = next_significant(toks, i + 1);
    const std::size_t prev = prev_significant(toks, i);
    const bool before_scope = next < toks.size() && toks[next].punct("::");
    const bool after_scope = prev != std::string::npos && toks[prev].punct("::");
    const bool after_namespace =
        prev != std::string::npos && toks[prev].is(TokenKind::identifier, "namespace");
    const bool called = next < toks.size() && toks[next].punct("(");
    for (const auto& rule : rules.rules()) {
      bool hit = false;
      switch (rule.kind) {
        case RuleKind::identifier_rename: hit = t.text == rule.pattern; break;
        case RuleKind::identifier_prefix: hit = camel_boundary(t.text, rule.pattern); break;
        case RuleKind::namespace_rename:
          hit = t.text == rule.pattern && (before_scope || after_scope || after_namespace);
          break;
        case RuleKind::mask_drop: hit = t.text == rule.pattern && called; break;
        case RuleKind::header_map: break;
      }
      if (!hit) continue;
      if (rule.kind == RuleKind::identifier_prefix) {
        t.text = rule.replacement + t.text.substr(rule.pattern.size());
      } else {
        t.text = rule.replacement;
      }
      ++stats.renames;
      if (rule.kind == RuleKind::mask_drop) {
        // Drop the first argument and the comma plus blanks after it.
        int depth = 0;
        std::size_t j = next + 1;
        for (; j < toks.size(); ++j) {
          const auto& a = toks[j];
          if (a.kind != TokenKind::punctuation) continue;
          if (a.text == "(" || a.text == "[" || a.text == "{") ++depth;
          if (a.text == ")" || a.text == "]" || a.text == "}") {
            if (depth == 0) break;
            --depth;
          }
          if (a.text == "," && depth == 0) break;
        }
        if (j < toks.size() && toks[j].punct(",")) {
          std::size_t stop = j + 1;
          while (stop < toks.size() && toks[stop].kind == TokenKind::whitespace) ++stop;
          toks.erase(toks.begin() + static_cast<std::ptrdiff_t>(next + 1),
                     toks.begin() + static_cast<std::ptrdiff_t>(stop));
        }
      }
      break;
    }
  }
}

}  // namespace detail

/// Rewrites every `K<<<g, b[, s[, st]]>>>(args)` into
/// `hipLaunchKernelGGL(K, g, b, s|0, st|0, args)`, wrapping templated kernels
/// in HIP_KERNEL_NAME. Qualification stays on the kernel.
inline TranslationUnit rewrite_launch_sites(const TranslationUnit& tu, TranslationStats& stats) {
  TranslationUnit out = tu;
  detail::rewrite_launches(out.tokens, false, stats);
  out.renumber();
  return out;
}

inline TranslationUnit rewrite_launch_sites(const TranslationUnit& tu) {
  TranslationStats stats;
  return rewrite_launch_sites(tu, stats);
}

inline TranslationUnit apply_rename_rules(const TranslationUnit& tu, const RuleTable& rules,
                                          TranslationStats& stats) {
  TranslationUnit out = tu;
  detail::rename_tokens(out.tokens, rules, stats);
  out.renumber();
  return out;
}

inline TranslationUnit apply_rename_rules(const TranslationUnit& tu, const RuleTable& rules) {
  TranslationStats stats;
  return apply_rename_rules(tu, rules, stats);
}

struct Translation {
  std::string text;
  TranslationStats stats;
};

/// tokenize, then rewrite launches, then apply renames.
inline Translation translate_source(std::string_view source, const RuleTable& rules,
                                    std::string path = {}) {
  Translation result;
  auto tu = tokenize(source, std::move(path));
  tu = rewrite_launch_sites(tu, result.stats);
  tu = apply_rename_rules(tu, rules, result.stats);
  result.text = tu.text();
  return result;
}

}  // namespace gpuport::cuda2hip
