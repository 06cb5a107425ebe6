#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tml {

// A reference checker for the DOT subset the renderer emits, so golden tests
// never need an installed graphviz. Grammar covered:
//
//   graph    := "digraph" ID? "{" stmt* "}"
//   stmt     := subgraph | edge | node | attr
//   subgraph := "subgraph" ID? "{" stmt* "}"
//   edge     := id "->" id attrs? ";"?
//   node     := id attrs? ";"?
//   attr     := ("graph"|"node"|"edge") attrs ";"?  |  id "=" id ";"?
//   attrs    := "[" (id "=" id ("," | ";")?)* "]"
//   id       := bare identifier, number, or double-quoted string

class DotChecker {
 public:
  std::optional<std::string> check(std::string_view text) {
    src_ = text;
    pos_ = 0;
    error_.reset();
    skip_ws();
    if (!keyword("digraph")) return fail("expected 'digraph'");
    skip_ws();
    std::string name;
    id(name);  // optional
    if (!body()) return error_;
    skip_ws();
    if (pos_ != src_.size()) return fail("trailing content after graph");
    return std::nullopt;
  }

 private:
  bool body() {
    skip_ws();
    if (!eat('{')) return set_fail("expected '{'");
    for (;;) {
      skip_ws();
      if (eat('}')) return true;
      if (pos_ >= src_.size()) return set_fail("unterminated block");
      if (keyword("subgraph")) {
        skip_ws();
        std::string name;
        id(name);
        if (!body()) return false;
        continue;
      }
      std::string first;
      if (!id(first)) return set_fail("expected statement");
      skip_ws();
      if (eat('=')) {
        skip_ws();
        std::string value;
        if (!id(value)) return set_fail("expected attribute value");
      } else if (match("->")) {
        skip_ws();
        std::string target;
        if (!id(target)) return set_fail("expected edge target");
        skip_ws();
        if (peek() == '[' && !attr_list()) return false;
      } else {
        if (peek() == '[' && !attr_list()) return false;
      }
      skip_ws();
      eat(';');
    }
  }

  bool attr_list() {
    if (!eat('[')) return set_fail("expected '['");
    for (;;) {
      skip_ws();
      if (eat(']')) return true;
      std::string key, value;
      if (!id(key)) return set_fail("expected attribute key");
      skip_ws();
      if (!eat('=')) return set_fail("expected '=' in attribute");
      skip_ws();
      if (!id(value)) return set_fail("expected attribute value");
      skip_ws();
      if (eat(',') || eat(';')) continue;
    }
  }

  bool id(std::string& out) {
    skip_ws();
    if (pos_ >= src_.size()) return false;
    char c = src_[pos_];
    if (c == '"') {
      ++pos_;
      out.clear();
      while (pos_ < src_.size()) {
        char d = src_[pos_++];
        if (d == '\\' && pos_ < src_.size()) {
          out.push_back(src_[pos_++]);
          continue;
        }
        if (d == '"') return true;
        out.push_back(d);
      }
      return false;  // unterminated string
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') {
      std::size_t start = pos_;
      while (pos_ < src_.size()) {
        char d = src_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.' || d == '-') {
          if (d == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') break;
          ++pos_;
        } else {
          break;
        }
      }
      if (pos_ == start) return false;
      out.assign(src_.substr(start, pos_ - start));
      return true;
    }
    return false;
  }

  bool keyword(std::string_view kw) {
    skip_ws();
    if (src_.substr(pos_, kw.size()) != kw) return false;
    std::size_t end = pos_ + kw.size();
    if (end < src_.size() &&
        (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
      return false;
    pos_ = end;
    return true;
  }

  bool match(std::string_view s) {
    if (src_.substr(pos_, s.size()) != s) return false;
    pos_ += s.size();
    return true;
  }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  std::optional<std::string> fail(const std::string& msg) {
    set_fail(msg);
    return error_;
  }
  bool set_fail(const std::string& msg) {
    if (!error_) error_ = msg + " at offset " + std::to_string(pos_);
    return false;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::optional<std::string> error_;
};

inline bool dot_parses(std::string_view text, std::string* why = nullptr) {
  DotChecker checker;
  auto err = checker.check(text);
  if (err && why) *why = *err;
  return !err.has_value();
}

}  // namespace tml
