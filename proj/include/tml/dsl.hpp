#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tml/diag.hpp"
#include "tml/lex.hpp"
#include "tml/model.hpp"

namespace tml {

// Textual model syntax:
//
//   model      := "model" IDENT ("simplified")? item*
//   item       := machineDecl | flowDecl | triggerDecl
//   machineDecl:= "machine" IDENT "{" (thingDecl | actionDecl | storageDecl
//                                      | machineDecl | flowDecl | triggerDecl)* "}"
//   thingDecl  := "thing" IDENT
//   actionDecl := "action" IDENT ":" kind "of" IDENT ("#" STRING)?
//   storageDecl:= "store" IDENT "of" IDENT
//   flowDecl   := "flow" REF "->" REF          // solid arrow, one thing
//   triggerDecl:= "trigger" REF "~>" REF ("[" IDENT "=" IDENT "]")?
//   REF        := IDENT ("." IDENT)*           // absolute dotted path
//
// Comments run from // to end of line. Declarations are order-independent:
// the parser collects everything first and resolves references afterwards,
// so a flow may mention a machine declared further down.

namespace dsl_detail {

struct MachineDecl {
  std::string name;
  std::optional<std::string> parent;  // resolved path
  SourceSpan span;
};
struct ThingDecl {
  std::string name;
  std::string home;
  SourceSpan span;
};
struct ActionDecl {
  std::string owner, local;
  ActionKind kind;
  std::string thing;
  std::optional<std::string> label;
  SourceSpan span;
};
struct StorageDecl {
  std::string owner, local, thing;
  SourceSpan span;
};
struct FlowDecl {
  std::string from, to;
  SourceSpan span;
};
struct TriggerDecl {
  std::string from, to;
  std::optional<Guard> guard;
  SourceSpan span;
};

struct Decls {
  std::string model_name;
  bool simplified = false;
  std::vector<MachineDecl> machines;
  std::vector<ThingDecl> things;
  std::vector<ActionDecl> actions;
  std::vector<StorageDecl> storages;
  std::vector<FlowDecl> flows;
  std::vector<TriggerDecl> triggers;
};

class ModelParser {
 public:
  ModelParser(TokenCursor& cur, Decls& out) : cur_(cur), out_(out) {}

  bool run() {
    if (!cur_.at(Tok::Ident) || cur_.peek().text != "model") {
      cur_.error("expected 'model' header");
      return false;
    }
    cur_.advance();
    if (!cur_.at(Tok::Ident)) {
      cur_.error("expected model name");
      return false;
    }
    out_.model_name = cur_.advance().text;
    if (cur_.at(Tok::Ident) && cur_.peek().text == "simplified") {
      cur_.advance();
      out_.simplified = true;
    }
    while (!cur_.done()) {
      if (!item("")) return false;
    }
    return true;
  }

 private:
  bool item(const std::string& scope) {
    if (!cur_.at(Tok::Ident)) {
      cur_.error("expected a declaration");
      return false;
    }
    const std::string& kw = cur_.peek().text;
    if (kw == "machine") return machine_decl(scope);
    if (kw == "flow") return flow_decl();
    if (kw == "trigger") return trigger_decl();
    if (!scope.empty()) {
      if (kw == "thing") return thing_decl(scope);
      if (kw == "action") return action_decl(scope);
      if (kw == "store") return storage_decl(scope);
    }
    cur_.error("unexpected declaration '" + kw + "'");
    return false;
  }

  bool machine_decl(const std::string& scope) {
    SourceSpan span = cur_.peek().span;
    cur_.advance();
    if (!cur_.at(Tok::Ident)) {
      cur_.error("expected machine name");
      return false;
    }
    std::string name = cur_.advance().text;
    std::string path = scope.empty() ? name : scope + "." + name;
    out_.machines.push_back(
        {name, scope.empty() ? std::nullopt : std::make_optional(scope), span});
    if (!cur_.expect(Tok::LBrace, "'{'")) return false;
    while (!cur_.at(Tok::RBrace)) {
      if (cur_.done()) {
        cur_.error("unterminated machine block for " + path);
        return false;
      }
      if (!item(path)) return false;
    }
    cur_.advance();  // }
    return true;
  }

  bool thing_decl(const std::string& scope) {
    SourceSpan span = cur_.peek().span;
    cur_.advance();
    if (!cur_.at(Tok::Ident)) {
      cur_.error("expected thing name");
      return false;
    }
    out_.things.push_back({cur_.advance().text, scope, span});
    return true;
  }

  bool action_decl(const std::string& scope) {
    SourceSpan span = cur_.peek().span;
    cur_.advance();
    if (!cur_.at(Tok::Ident)) {
      cur_.error("expected action name");
      return false;
    }
    std::string local = cur_.advance().text;
    if (!cur_.expect(Tok::Colon, "':'")) return false;
    if (!cur_.at(Tok::Ident)) {
      cur_.error("expected action kind");
      return false;
    }
    SourceSpan kind_span = cur_.peek().span;
    std::string kind_word = cur_.advance().text;
    auto kind = action_kind_from(kind_word);
    if (!kind) {
      cur_.error_at(kind_span, "unknown action kind '" + kind_word + "'");
      return false;
    }
    if (!cur_.at(Tok::Ident) || cur_.peek().text != "of") {
      cur_.error("expected 'of'");
      return false;
    }
    cur_.advance();
    if (!cur_.at(Tok::Ident)) {
      cur_.error("expected thing reference");
      return false;
    }
    std::string thing = cur_.advance().text;
    std::optional<std::string> label;
    if (cur_.eat(Tok::Hash)) {
      if (!cur_.at(Tok::String)) {
        cur_.error("expected quoted label after '#'");
        return false;
      }
      label = cur_.advance().text;
    }
    out_.actions.push_back({scope, local, *kind, thing, label, span});
    return true;
  }

  bool storage_decl(const std::string& scope) {
    SourceSpan span = cur_.peek().span;
    cur_.advance();
    if (!cur_.at(Tok::Ident)) {
      cur_.error("expected storage name");
      return false;
    }
    std::string local = cur_.advance().text;
    if (!cur_.at(Tok::Ident) || cur_.peek().text != "of") {
      cur_.error("expected 'of'");
      return false;
    }
    cur_.advance();
    if (!cur_.at(Tok::Ident)) {
      cur_.error("expected thing reference");
      return false;
    }
    out_.storages.push_back({scope, local, cur_.advance().text, span});
    return true;
  }

  bool flow_decl() {
    SourceSpan span = cur_.peek().span;
    cur_.advance();
    std::string from, to;
    if (!ref(from)) return false;
    if (!cur_.expect(Tok::Arrow, "'->'")) return false;
    if (!ref(to)) return false;
    out_.flows.push_back({from, to, span});
    return true;
  }

  bool trigger_decl() {
    SourceSpan span = cur_.peek().span;
    cur_.advance();
    std::string from, to;
    if (!ref(from)) return false;
    if (!cur_.expect(Tok::Squiggly, "'~>'")) return false;
    if (!ref(to)) return false;
    std::optional<Guard> guard;
    if (cur_.eat(Tok::LBracket)) {
      if (!cur_.at(Tok::Ident)) {
        cur_.error("expected guard key");
        return false;
      }
      std::string key = cur_.advance().text;
      if (!cur_.expect(Tok::Equals, "'='")) return false;
      if (!cur_.at(Tok::Ident)) {
        cur_.error("expected guard value");
        return false;
      }
      std::string value = cur_.advance().text;
      if (!cur_.expect(Tok::RBracket, "']'")) return false;
      guard = Guard{key, value};
    }
    out_.triggers.push_back({from, to, guard, span});
    return true;
  }

  bool ref(std::string& out) {
    if (!cur_.at(Tok::Ident)) {
      cur_.error("expected reference");
      return false;
    }
    out = cur_.advance().text;
    while (cur_.at(Tok::Dot)) {
      cur_.advance();
      if (!cur_.at(Tok::Ident)) {
        cur_.error("expected name after '.'");
        return false;
      }
      out += "." + cur_.advance().text;
    }
    return true;
  }

  TokenCursor& cur_;
  Decls& out_;
};

}  // namespace dsl_detail

inline Parsed<StaticModel> parse_model(std::string_view text, std::string file = "<input>") {
  Parsed<StaticModel> result;
  Lexer lex(text, file);
  TokenCursor cur(lex.tokens(), result.diagnostics);
  dsl_detail::Decls decls;
  dsl_detail::ModelParser parser(cur, decls);
  if (!parser.run()) return result;

  StaticModel m;
  m.name = decls.model_name;
  m.simplified = decls.simplified;
  auto apply = [&](const std::optional<ModelError>& e, const SourceSpan& span) {
    if (e)
      result.diagnostics.push_back({Severity::Error, span, to_string(e->code), e->message});
  };
  for (const auto& d : decls.machines) apply(m.add_machine(d.name, d.parent), d.span);
  for (const auto& d : decls.things) apply(m.add_thing(d.name, d.home), d.span);
  for (const auto& d : decls.actions)
    apply(m.add_action(d.owner, d.local, d.kind, d.thing, d.label), d.span);
  for (const auto& d : decls.storages) apply(m.add_storage(d.owner, d.local, d.thing), d.span);
  for (const auto& d : decls.flows) apply(m.add_flow(d.from, d.to), d.span);
  for (const auto& d : decls.triggers) apply(m.add_trigger(d.from, d.to, d.guard), d.span);
  if (has_errors(result.diagnostics)) return result;
  result.value = std::move(m);
  return result;
}

namespace dsl_detail {

inline std::string quote_label(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void print_machine(const StaticModel& m, const MachineId& id, int depth,
                          std::string& out) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const Machine& mach = m.machines.at(id);
  out += pad + "machine " + mach.name + " {\n";
  std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
  for (const auto& [tid, t] : m.things)
    if (t.home == id) out += inner + "thing " + t.name + "\n";
  for (const auto& [sid, s] : m.storages)
    if (s.owner == id) out += inner + "store " + s.name + " of " + s.thing + "\n";
  for (const auto& [aid, a] : m.actions) {
    if (a.owner != id) continue;
    std::string local = a.id.substr(id.size() + 1);
    out += inner + "action " + local + ": " + to_string(a.kind) + " of " + a.thing;
    if (a.label) out += " #" + quote_label(*a.label);
    out += "\n";
  }
  for (const auto& child : mach.children) print_machine(m, child, depth + 1, out);
  out += pad + "}\n";
}

}  // namespace dsl_detail

// Canonical form: model header, machine blocks (collections sorted by id),
// then all flows, then all triggers. Reparsing the output reproduces the
// model exactly, arc ids included.
inline std::string print_model(const StaticModel& m) {
  std::string out = "model " + m.name;
  if (m.simplified) out += " simplified";
  out += "\n";
  for (const auto& [id, mach] : m.machines) {
    if (mach.parent) continue;
    out += "\n";
    dsl_detail::print_machine(m, id, 0, out);
  }
  if (!m.flows.empty()) {
    out += "\n";
    for (const auto& [id, f] : m.flows) out += "flow " + f.from + " -> " + f.to + "\n";
  }
  if (!m.triggers.empty()) {
    out += "\n";
    for (const auto& [id, t] : m.triggers) {
      out += "trigger " + t.from + " ~> " + t.to;
      if (t.guard) out += " [" + t.guard->key + "=" + t.guard->value + "]";
      out += "\n";
    }
  }
  return out;
}

}  // namespace tml
