#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "tml/diag.hpp"

namespace tml {

// One lexer serves every text format in the toolchain (.tm, .ev, .scn, .sd).
// It never throws: unknown bytes become Bad tokens with a span, so parsers
// stay total on arbitrary input.

enum class Tok {
  Ident,
  Int,
  String,     // double-quoted; backslash escapes quote and backslash
  Arrow,      // ->
  Squiggly,   // ~>
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  LParen,
  RParen,
  Colon,
  Comma,
  Dot,
  Equals,
  Hash,
  Newline,    // significant for line-oriented formats (.sd, .scn)
  End,
  Bad,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::string file = "<input>", bool keep_newlines = false)
      : src_(src), file_(std::move(file)), keep_newlines_(keep_newlines) {
    tokenize();
  }

  const std::vector<Token>& tokens() const { return toks_; }

 private:
  void tokenize() {
    std::size_t i = 0;
    int line = 1, col = 1;
    auto push = [&](Tok k, std::string text, int l, int c) {
      toks_.push_back({k, std::move(text), {file_, l, c}});
    };
    while (i < src_.size()) {
      char c = src_[i];
      if (c == '\n') {
        if (keep_newlines_) push(Tok::Newline, "\n", line, col);
        ++i;
        ++line;
        col = 1;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
        ++col;
        continue;
      }
      if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '/') {
        while (i < src_.size() && src_[i] != '\n') ++i;
        continue;  // newline handled above
      }
      int l = line, cl = col;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = i;
        while (i < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[i])) || src_[i] == '_'))
          ++i;
        col += static_cast<int>(i - start);
        push(Tok::Ident, std::string(src_.substr(start, i - start)), l, cl);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = i;
        while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) ++i;
        col += static_cast<int>(i - start);
        push(Tok::Int, std::string(src_.substr(start, i - start)), l, cl);
        continue;
      }
      if (c == '"') {
        std::string out;
        ++i;
        ++col;
        bool closed = false;
        while (i < src_.size()) {
          char d = src_[i];
          if (d == '\n') break;  // unterminated on this line
          ++i;
          ++col;
          if (d == '"') {
            closed = true;
            break;
          }
          if (d == '\\' && i < src_.size() && (src_[i] == '"' || src_[i] == '\\')) {
            out.push_back(src_[i]);
            ++i;
            ++col;
          } else {
            out.push_back(d);
          }
        }
        push(closed ? Tok::String : Tok::Bad, out, l, cl);
        continue;
      }
      if (c == '-' && i + 1 < src_.size() && src_[i + 1] == '>') {
        i += 2;
        col += 2;
        push(Tok::Arrow, "->", l, cl);
        continue;
      }
      if (c == '~' && i + 1 < src_.size() && src_[i + 1] == '>') {
        i += 2;
        col += 2;
        push(Tok::Squiggly, "~>", l, cl);
        continue;
      }
      Tok k = Tok::Bad;
      switch (c) {
        case '{': k = Tok::LBrace; break;
        case '}': k = Tok::RBrace; break;
        case '[': k = Tok::LBracket; break;
        case ']': k = Tok::RBracket; break;
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case ':': k = Tok::Colon; break;
        case ',': k = Tok::Comma; break;
        case '.': k = Tok::Dot; break;
        case '=': k = Tok::Equals; break;
        case '#': k = Tok::Hash; break;
        default: break;
      }
      ++i;
      ++col;
      push(k, std::string(1, c), l, cl);
    }
    toks_.push_back({Tok::End, "", {file_, line, col}});
  }

  std::string_view src_;
  std::string file_;
  bool keep_newlines_;
  std::vector<Token> toks_;
};

// Small shared cursor over a token stream.
class TokenCursor {
 public:
  TokenCursor(const std::vector<Token>& toks, std::vector<Diagnostic>& diags)
      : toks_(toks), diags_(diags) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& advance() {
    const Token& t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool eat(Tok k) {
    if (!at(k)) return false;
    advance();
    return true;
  }
  bool expect(Tok k, const std::string& what) {
    if (eat(k)) return true;
    error("expected " + what + ", found '" + describe(peek()) + "'");
    return false;
  }
  void error(const std::string& msg, const std::string& code = "SyntaxError") {
    diags_.push_back({Severity::Error, peek().span, code, msg});
  }
  void error_at(const SourceSpan& span, const std::string& msg,
                const std::string& code = "SyntaxError") {
    diags_.push_back({Severity::Error, span, code, msg});
  }
  void warn_at(const SourceSpan& span, const std::string& msg, const std::string& code) {
    diags_.push_back({Severity::Warning, span, code, msg});
  }
  bool done() const { return at(Tok::End); }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::Newline: return "end of line";
      case Tok::String: return "\"" + t.text + "\"";
      default: return t.text;
    }
  }

 private:
  const std::vector<Token>& toks_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
};

}  // namespace tml
