#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tml {

struct SourceSpan {
  std::string file = "<input>";
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  bool operator==(const SourceSpan&) const = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceSpan span;
  std::string code;  // e.g. "SyntaxError", "DanglingReference"
  std::string message;
};

inline std::string format(const Diagnostic& d) {
  std::string s = d.span.file + ":" + std::to_string(d.span.line) + ":" +
                  std::to_string(d.span.column) + ": ";
  s += d.severity == Severity::Error ? "error" : "warning";
  s += " [" + d.code + "] " + d.message;
  return s;
}

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Severity::Error) return true;
  return false;
}

// Parse outcome: a value plus diagnostics. `value` is absent whenever an
// error diagnostic was produced.
template <class T>
struct Parsed {
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return value.has_value() && !has_errors(diagnostics); }
};

}  // namespace tml
