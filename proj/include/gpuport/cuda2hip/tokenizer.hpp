#pragma once

// Lossless tokenizer for CUDA/HIP C++ sources. Token texts concatenate back to
// the input bytes; strings, comments and preprocessor lines are kept as single
// tokens so later passes cannot touch their contents by accident.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gpuport/error.hpp"

namespace gpuport::cuda2hip {

enum class TokenKind { identifier, punctuation, literal, string, comment, whitespace, preprocessor };

inline std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::identifier: return "identifier";
    case TokenKind::punctuation: return "punctuation";
    case TokenKind::literal: return "literal";
    case TokenKind::string: return "string";
    case TokenKind::comment: return "comment";
    case TokenKind::whitespace: return "whitespace";
    case TokenKind::preprocessor: return "preprocessor";
  }
  return "?";
}

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t offset = 0;  // byte offset in the unit's current text
  std::size_t line = 1;    // line in the original source

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool punct(std::string_view t) const { return is(TokenKind::punctuation, t); }
  bool trivia() const { return kind == TokenKind::whitespace || kind == TokenKind::comment; }
};

struct TranslationUnit {
  std::string path;
  std::vector<Token> tokens;

  std::string text() const {
    std::string out;
    for (const auto& t : tokens) out += t.text;
    return out;
  }

  /// Recomputes byte offsets after tokens were replaced.
  void renumber() {
    std::size_t offset = 0;
    for (auto& t : tokens) {
      t.offset = offset;
      offset += t.text.size();
    }
  }
};

struct TokenizeOptions {
  std::size_t first_line = 1;
  // Inside a directive body '#' is ordinary punctuation.
  bool directive_body = false;
};

namespace detail {

inline bool ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}
inline bool ident_char(unsigned char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
inline bool digit(unsigned char c) { return c >= '0' && c <= '9'; }
inline bool blank(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

inline bool string_prefix(std::string_view id) {
  return id == "L" || id == "u" || id == "U" || id == "u8" || id == "R" || id == "LR" ||
         id == "uR" || id == "UR" || id == "u8R";
}

class Lexer {
 public:
  Lexer(std::string_view src, TokenizeOptions options)
      : src_(src), line_(options.first_line), directive_body_(options.directive_body) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool line_start = true;
    while (pos_ < src_.size()) {
      const std::size_t begin = pos_;
      const std::size_t line = line_;
      const TokenKind kind = next(line_start);
      Token tok{kind, std::string(src_.substr(begin, pos_ - begin)), begin, line};
      if (kind == TokenKind::whitespace) {
        if (tok.text.find('\n') != std::string::npos) line_start = true;
      } else if (kind != TokenKind::comment) {
        line_start = false;
      }
      out.push_back(std::move(tok));
    }
    return out;
  }

 private:
  unsigned char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? static_cast<unsigned char>(src_[pos_ + ahead]) : 0;
  }
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }
  bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  TokenKind next(bool line_start) {
    const unsigned char c = peek();
    if (blank(c)) {
      while (pos_ < src_.size() && blank(peek())) advance();
      return TokenKind::whitespace;
    }
    if (starts("//")) {
      line_comment();
      return TokenKind::comment;
    }
    if (starts("/*")) {
      block_comment();
      return TokenKind::comment;
    }
    if (c == '#' && line_start && !directive_body_) {
      directive();
      return TokenKind::preprocessor;
    }
    if (c == '"' || c == '\'') {
      quoted(c);
      return TokenKind::string;
    }
    if (ident_start(c)) {
      const std::size_t begin = pos_;
      while (ident_char(peek())) advance();
      const auto id = src_.substr(begin, pos_ - begin);
      if (string_prefix(id) && (peek() == '"' || (peek() == '\'' && id.back() != 'R'))) {
        if (id.back() == 'R') {
          raw_string();
        } else {
          quoted(peek());
        }
        return TokenKind::string;
      }
      return TokenKind::identifier;
    }
    if (digit(c) || (c == '.' && digit(peek(1)))) {
      number();
      return TokenKind::literal;
    }
    for (std::string_view p : {"<<<", ">>>", "::"}) {
      if (starts(p)) {
        advance(p.size());
        return TokenKind::punctuation;
      }
    }
    advance();
    return TokenKind::punctuation;
  }

  void line_comment() {
    while (pos_ < src_.size() && peek() != '\n') {
      if (peek() == '\\' && (peek(1) == '\n' || (peek(1) == '\r' && peek(2) == '\n'))) {
        advance(peek(1) == '\r' ? 3 : 2);
        continue;
      }
      advance();
    }
  }

  void block_comment() {
    const std::size_t line = line_;
    advance(2);
    while (pos_ < src_.size() && !starts("*/")) advance();
    if (pos_ >= src_.size()) {
      throw UnterminatedComment("line " + std::to_string(line) + ": unterminated /* comment");
    }
    advance(2);
  }

  void quoted(unsigned char quote) {
    const std::size_t line = line_;
    advance();
    while (true) {
      if (pos_ >= src_.size() || peek() == '\n') {
        throw UnterminatedString("line " + std::to_string(line) + ": unterminated " +
                                 (quote == '"' ? "string" : "character") + " literal");
      }
      if (peek() == '\\') {
        advance(2);
        continue;
      }
      if (peek() == quote) {
        advance();
        return;
      }
      advance();
    }
  }

  void raw_string() {
    const std::size_t line = line_;
    advance();  // opening quote
    const std::size_t delim_begin = pos_;
    while (pos_ < src_.size() && peek() != '(' && peek() != '\n') advance();
    if (peek() != '(') {
      throw UnterminatedString("line " + std::to_string(line) + ": malformed raw string");
    }
    const std::string close =
        ")" + std::string(src_.substr(delim_begin, pos_ - delim_begin)) + "\"";
    const auto end = src_.find(close, pos_);
    if (end == std::string_view::npos) {
      throw UnterminatedString("line " + std::to_string(line) + ": unterminated raw string");
    }
    advance(end + close.size() - pos_);
  }

  void number() {
    // pp-number: digits, letters, '.', digit separators and signed exponents.
    advance();
    while (pos_ < src_.size()) {
      const unsigned char c = peek();
      if ((c == '+' || c == '-') && pos_ > 0) {
        const char prev = src_[pos_ - 1];
        if (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P') {
          advance();
          continue;
        }
        break;
      }
      if (c == '\'' && ident_char(peek(1))) {
        advance(2);
        continue;
      }
      if (ident_char(c) || c == '.') {
        advance();
        continue;
      }
      break;
    }
  }

  // A directive runs to the end of its logical line. Comments and strings
  // inside it are skipped so a '/*' there cannot swallow the next line.
  void directive() {
    while (pos_ < src_.size() && peek() != '\n') {
      if (peek() == '\\' && (peek(1) == '\n' || (peek(1) == '\r' && peek(2) == '\n'))) {
        advance(peek(1) == '\r' ? 3 : 2);
      } else if (starts("//")) {
        line_comment();
      } else if (starts("/*")) {
        block_comment();
      } else if (peek() == '"' || peek() == '\'') {
        quoted(peek());
      } else {
        advance();
      }
    }
    if (pos_ > 0 && src_[pos_ - 1] == '\r') --pos_;  // keep CR with the newline
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_;
  bool directive_body_;
};

}  // namespace detail

inline TranslationUnit tokenize(std::string_view source, std::string path = {},
                                TokenizeOptions options = {}) {
  return TranslationUnit{std::move(path), detail::Lexer(source, options).run()};
}

/// Index of the next token at or after `i` that is not whitespace/comment.
inline std::size_t next_significant(const std::vector<Token>& tokens, std::size_t i) {
  while (i < tokens.size() && tokens[i].trivia()) ++i;
  return i;
}

/// Index of the previous significant token before `i`, or npos.
inline std::size_t prev_significant(const std::vector<Token>& tokens, std::size_t i) {
  while (i > 0) {
    --i;
    if (!tokens[i].trivia()) return i;
  }
  return std::string::npos;
}

}  // namespace gpuport::cuda2hip
