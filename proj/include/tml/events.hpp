#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tml/diag.hpp"
#include "tml/lex.hpp"
#include "tml/model.hpp"

namespace tml {

// The dynamic plane: events are named regions over the static model, and a
// behavior graph orders events with guarded precedence edges.

struct EventDef {
  EventId id;
  std::string description;
  std::set<ActionId, NaturalLess> region;
  bool operator==(const EventDef&) const = default;
};

struct BehaviorEdge {
  EventId from;
  EventId to;
  std::optional<Guard> guard;
  auto operator<=>(const BehaviorEdge&) const = default;
};

struct BehaviorGraph {
  std::set<EventId, NaturalLess> nodes;
  std::vector<BehaviorEdge> edges;  // sorted, unique

  void normalize() {
    std::sort(edges.begin(), edges.end(), [](const BehaviorEdge& a, const BehaviorEdge& b) {
      if (int c = natural_compare(a.from, b.from); c != 0) return c < 0;
      if (int c = natural_compare(a.to, b.to); c != 0) return c < 0;
      return a.guard < b.guard;
    });
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }
  bool operator==(const BehaviorGraph&) const = default;
};

struct EventOverlay {
  std::string model_name;
  std::map<EventId, EventDef, NaturalLess> events;
  std::optional<BehaviorGraph> declared;  // the optional chronology block
  bool operator==(const EventOverlay&) const = default;
};

namespace events_detail {

// Region connectivity and behavior inference both look straight through
// storages: an arc into a storage and an arc out of it connect the two
// actions at its ends.
struct ArcView {
  struct Arc {
    std::string from, to;
    std::optional<Guard> guard;
    bool trigger;
  };
  std::vector<Arc> arcs;

  explicit ArcView(const StaticModel& m) {
    std::map<std::string, std::vector<std::string>> into_storage, out_of_storage;
    for (const auto& [id, f] : m.flows) {
      bool fs = m.storages.count(f.from) > 0;
      bool ts = m.storages.count(f.to) > 0;
      if (!fs && !ts) {
        arcs.push_back({f.from, f.to, std::nullopt, false});
      } else if (ts) {
        into_storage[f.to].push_back(f.from);
      } else {
        out_of_storage[f.from].push_back(f.to);
      }
    }
    for (const auto& [sid, froms] : into_storage) {
      auto it = out_of_storage.find(sid);
      if (it == out_of_storage.end()) continue;
      for (const auto& from : froms)
        for (const auto& to : it->second) arcs.push_back({from, to, std::nullopt, false});
    }
    for (const auto& [id, t] : m.triggers) arcs.push_back({t.from, t.to, t.guard, true});
  }
};

inline bool region_connected(const StaticModel& m, const std::set<ActionId, NaturalLess>& region) {
  if (region.size() <= 1) return true;
  ArcView view(m);
  std::map<ActionId, std::vector<ActionId>> adj;
  for (const auto& a : view.arcs) {
    if (region.count(a.from) == 0 || region.count(a.to) == 0) continue;
    adj[a.from].push_back(a.to);
    adj[a.to].push_back(a.from);
  }
  std::set<ActionId> seen;
  std::vector<ActionId> stack{*region.begin()};
  while (!stack.empty()) {
    ActionId cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur).second) continue;
    for (const auto& next : adj[cur]) stack.push_back(next);
  }
  return seen.size() == region.size();
}

}  // namespace events_detail

// Overlay well-formedness against its model: members exist, regions are
// nonempty and weakly connected, and two regions may share only Transfer
// actions. Spans, when supplied, locate each event's declaration.
inline std::vector<Diagnostic> check_overlay(
    const EventOverlay& ov, const StaticModel& m,
    const std::map<EventId, SourceSpan, NaturalLess>& spans = {}) {
  std::vector<Diagnostic> diags;
  auto err = [&](const std::string& code, const std::string& msg, const EventId& at = "") {
    SourceSpan span;
    if (auto it = spans.find(at); it != spans.end()) span = it->second;
    diags.push_back({Severity::Error, span, code, msg});
  };
  if (ov.model_name != m.name)
    err("WrongModel", "overlay is for '" + ov.model_name + "', model is '" + m.name + "'");
  std::map<ActionId, EventId, NaturalLess> first_owner;
  for (const auto& [id, ev] : ov.events) {
    if (ev.region.empty()) {
      err("EmptyRegion", id + " has an empty region", id);
      continue;
    }
    bool members_ok = true;
    for (const auto& a : ev.region) {
      if (m.actions.count(a) == 0) {
        err("UnknownAction", id + " references unknown action " + a, id);
        members_ok = false;
        continue;
      }
      auto [it, inserted] = first_owner.emplace(a, id);
      if (!inserted && m.actions.at(a).kind != ActionKind::Transfer)
        err("IllegalOverlap",
            a + " is in both " + it->second + " and " + id + " but only transfers may be shared",
            id);
    }
    if (members_ok && !events_detail::region_connected(m, ev.region))
      err("DisconnectedRegion", id + " region is not weakly connected", id);
  }
  if (ov.declared) {
    for (const auto& e : ov.declared->edges) {
      if (ov.events.count(e.from) == 0)
        err("UnknownEvent", "chronology references unknown event " + e.from);
      if (ov.events.count(e.to) == 0)
        err("UnknownEvent", "chronology references unknown event " + e.to);
    }
  }
  return diags;
}

struct CoverageReport {
  std::vector<ActionId> uncovered;  // non-transfer actions in no region
};

// Overlays are expected to cover every dynamic action with a region but leave
// passive structure (and boundary transfers) unpainted, so uncovered actions
// are warnings, not errors.
inline CoverageReport check_coverage(const EventOverlay& ov, const StaticModel& m) {
  std::set<ActionId, NaturalLess> covered;
  for (const auto& [id, ev] : ov.events) covered.insert(ev.region.begin(), ev.region.end());
  CoverageReport rep;
  for (const auto& [id, a] : m.actions)
    if (a.kind != ActionKind::Transfer && covered.count(id) == 0) rep.uncovered.push_back(id);
  return rep;
}

// ---------------------------------------------------------------------------
// .ev files:
//
//   events <ModelName>
//   event E1 "description" { REF, REF, ... }
//   ...
//   chronology {            // optional declared behavior graph
//     E1 -> E2
//     E3 -> E4 [card=invalid]
//   }

inline Parsed<EventOverlay> parse_overlay(std::string_view text, const StaticModel& model,
                                          std::string file = "<input>") {
  Parsed<EventOverlay> result;
  Lexer lex(text, file);
  TokenCursor cur(lex.tokens(), result.diagnostics);
  EventOverlay ov;
  std::map<EventId, SourceSpan, NaturalLess> spans;

  auto ref = [&](std::string& out) {
    if (!cur.at(Tok::Ident)) {
      cur.error("expected reference");
      return false;
    }
    out = cur.advance().text;
    while (cur.at(Tok::Dot)) {
      cur.advance();
      if (!cur.at(Tok::Ident)) {
        cur.error("expected name after '.'");
        return false;
      }
      out += "." + cur.advance().text;
    }
    return true;
  };

  if (!cur.at(Tok::Ident) || cur.peek().text != "events") {
    cur.error("expected 'events' header");
    return result;
  }
  cur.advance();
  if (!cur.at(Tok::Ident)) {
    cur.error("expected model name");
    return result;
  }
  ov.model_name = cur.advance().text;

  while (!cur.done()) {
    if (cur.at(Tok::Ident) && cur.peek().text == "event") {
      SourceSpan span = cur.peek().span;
      cur.advance();
      if (!cur.at(Tok::Ident)) {
        cur.error("expected event id");
        return result;
      }
      EventDef ev;
      ev.id = cur.advance().text;
      if (cur.at(Tok::String)) ev.description = cur.advance().text;
      if (!cur.expect(Tok::LBrace, "'{'")) return result;
      while (!cur.at(Tok::RBrace)) {
        if (cur.done()) {
          cur.error("unterminated region for " + ev.id);
          return result;
        }
        std::string member;
        if (!ref(member)) return result;
        ev.region.insert(member);
        if (!cur.at(Tok::RBrace) && !cur.expect(Tok::Comma, "','")) return result;
      }
      cur.advance();  // }
      if (ov.events.count(ev.id) > 0) {
        cur.error_at(span, "duplicate event " + ev.id, "DuplicateId");
        return result;
      }
      spans.emplace(ev.id, span);
      ov.events.emplace(ev.id, std::move(ev));
      continue;
    }
    if (cur.at(Tok::Ident) && cur.peek().text == "chronology") {
      cur.advance();
      if (!cur.expect(Tok::LBrace, "'{'")) return result;
      BehaviorGraph g;
      while (!cur.at(Tok::RBrace)) {
        if (cur.done()) {
          cur.error("unterminated chronology block");
          return result;
        }
        if (!cur.at(Tok::Ident)) {
          cur.error("expected event id");
          return result;
        }
        BehaviorEdge e;
        e.from = cur.advance().text;
        if (!cur.expect(Tok::Arrow, "'->'")) return result;
        if (!cur.at(Tok::Ident)) {
          cur.error("expected event id");
          return result;
        }
        e.to = cur.advance().text;
        if (cur.eat(Tok::LBracket)) {
          Guard guard;
          if (!cur.at(Tok::Ident)) {
            cur.error("expected guard key");
            return result;
          }
          guard.key = cur.advance().text;
          if (!cur.expect(Tok::Equals, "'='")) return result;
          if (!cur.at(Tok::Ident)) {
            cur.error("expected guard value");
            return result;
          }
          guard.value = cur.advance().text;
          if (!cur.expect(Tok::RBracket, "']'")) return result;
          e.guard = guard;
        }
        g.edges.push_back(std::move(e));
      }
      cur.advance();  // }
      g.normalize();
      ov.declared = std::move(g);
      continue;
    }
    cur.error("expected 'event' or 'chronology'");
    return result;
  }

  for (auto d : check_overlay(ov, model, spans)) result.diagnostics.push_back(d);
  if (ov.declared)
    for (const auto& [id, ev] : ov.events) ov.declared->nodes.insert(id);
  if (has_errors(result.diagnostics)) return result;
  result.value = std::move(ov);
  return result;
}

inline std::string print_chronology(const BehaviorGraph& g) {
  std::string out = "chronology {\n";
  for (const auto& e : g.edges) {
    out += "  " + e.from + " -> " + e.to;
    if (e.guard) out += " [" + e.guard->key + "=" + e.guard->value + "]";
    out += "\n";
  }
  out += "}\n";
  return out;
}

}  // namespace tml
