#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tml/behavior.hpp"
#include "tml/events.hpp"
#include "tml/lex.hpp"
#include "tml/model.hpp"

namespace tml {

// A scenario fixes the environment: one value per guard key, or a sequence
// of values for keys that change across retry loops. Sequences are consumed
// one value per evaluation and hold their last value once exhausted.
struct Scenario {
  std::string name;
  std::string model_name;
  std::map<std::string, std::vector<std::string>> bindings;
  int max_steps = 10000;
};

struct TraceStep {
  int tick = 0;
  EventId event;
  bool operator==(const TraceStep&) const = default;
};

enum class Terminal { Completed, Deadlocked, StepLimit };

inline const char* to_string(Terminal t) {
  switch (t) {
    case Terminal::Completed: return "completed";
    case Terminal::Deadlocked: return "deadlocked";
    case Terminal::StepLimit: return "step-limit";
  }
  return "?";
}

struct Trace {
  std::vector<TraceStep> steps;
  Terminal terminal = Terminal::Completed;

  std::vector<EventId> event_sequence() const {
    std::vector<EventId> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.event);
    return out;
  }
  bool operator==(const Trace&) const = default;
};

enum class SimErrorCode {
  UnboundGuard,
  UnknownGuardKey,  // scenario binds a key no graph edge carries
  NodeSetMismatch,
  TooLarge,
  CyclicUnderBinding,
};

inline const char* to_string(SimErrorCode c) {
  switch (c) {
    case SimErrorCode::UnboundGuard: return "UnboundGuard";
    case SimErrorCode::UnknownGuardKey: return "UnknownGuardKey";
    case SimErrorCode::NodeSetMismatch: return "NodeSetMismatch";
    case SimErrorCode::TooLarge: return "TooLarge";
    case SimErrorCode::CyclicUnderBinding: return "CyclicUnderBinding";
  }
  return "?";
}

struct SimError {
  SimErrorCode code;
  std::string message;
};

struct SimResult {
  std::optional<Trace> trace;
  std::optional<SimError> error;
  bool ok() const { return trace.has_value(); }
};

namespace sim_detail {

struct Prepared {
  // edges consistent with the binding (a guard passes when its key is bound
  // and its value occurs in the bound value set)
  std::vector<const BehaviorEdge*> edges;
  std::map<EventId, std::vector<const BehaviorEdge*>, NaturalLess> in, out;
  std::set<const BehaviorEdge*> retry;
  std::set<EventId, NaturalLess> sources;   // no in-edges in the full graph
  std::set<EventId, NaturalLess> possible;  // reachable under the binding
};

inline bool consistent(const Scenario& sc, const Guard& g) {
  auto it = sc.bindings.find(g.key);
  if (it == sc.bindings.end()) return false;
  for (const auto& v : it->second)
    if (v == g.value) return true;
  return false;
}

inline Prepared prepare(const BehaviorGraph& g, const Scenario& sc) {
  Prepared p;
  std::set<EventId, NaturalLess> has_in;
  for (const auto& e : g.edges) has_in.insert(e.to);
  for (const auto& n : g.nodes)
    if (has_in.count(n) == 0) p.sources.insert(n);

  auto filtered = behavior_detail::filter_graph(
      g, [&](const Guard& gd) { return consistent(sc, gd); });
  for (const auto& [ev, edges] : filtered.out)
    for (const BehaviorEdge* e : edges) {
      p.edges.push_back(e);
      p.out[e->from].push_back(e);
      p.in[e->to].push_back(e);
    }
  p.retry = behavior_detail::back_edges(g, filtered);

  std::vector<EventId> stack(p.sources.begin(), p.sources.end());
  while (!stack.empty()) {
    EventId cur = stack.back();
    stack.pop_back();
    if (!p.possible.insert(cur).second) continue;
    auto it = p.out.find(cur);
    if (it == p.out.end()) continue;
    for (const BehaviorEdge* e : it->second)
      if (p.possible.count(e->to) == 0) stack.push_back(e->to);
  }
  return p;
}

}  // namespace sim_detail

// Execution semantics, maximal-step:
//  - all source events fire at tick 0;
//  - a firing activates each outgoing edge whose guard matches the value the
//    firing draws from the binding (one draw per key per firing);
//  - an event first fires once every unguarded non-retry in-edge from a
//    possible source has been activated and some in-edge holds a fresh
//    activation; an event that already fired re-fires on any fresh
//    activation (that is what a retry edge delivers);
//  - all events enabled at a tick fire together, recorded in id order;
//  - the run completes when nothing is enabled and every unfired event is
//    unreachable under the binding, deadlocks when a reachable event is
//    stuck, and reports step-limit when max_steps rounds pass.
inline SimResult run_simulation(const BehaviorGraph& g, const Scenario& sc) {
  SimResult result;
  sim_detail::Prepared p = sim_detail::prepare(g, sc);

  std::map<EventId, int, NaturalLess> fires;
  std::map<const BehaviorEdge*, int> pending;
  std::map<std::string, std::size_t> cursor;
  std::map<EventId, std::vector<const BehaviorEdge*>, NaturalLess> full_out;
  for (const auto& e : g.edges) full_out[e.from].push_back(&e);

  Trace trace;
  trace.terminal = Terminal::Completed;

  auto enabled = [&](const EventId& ev) {
    if (p.possible.count(ev) == 0) return false;
    if (p.sources.count(ev) > 0) return fires[ev] == 0;
    auto in_it = p.in.find(ev);
    if (in_it == p.in.end()) return false;
    bool fresh = false;
    for (const BehaviorEdge* e : in_it->second)
      if (pending[e] > 0) fresh = true;
    if (!fresh) return false;
    if (fires[ev] > 0) return true;
    // first firing: every mandatory in-edge must hold its activation
    for (const BehaviorEdge* e : in_it->second) {
      if (e->guard || p.retry.count(e) > 0) continue;
      if (p.possible.count(e->from) > 0 && pending[e] == 0) return false;
    }
    return true;
  };

  for (int tick = 0;; ++tick) {
    std::vector<EventId> wave;
    for (const auto& ev : p.possible)
      if (enabled(ev)) wave.push_back(ev);
    if (wave.empty()) {
      bool all_fired = true;
      for (const auto& ev : p.possible)
        if (fires[ev] == 0) all_fired = false;
      trace.terminal = all_fired ? Terminal::Completed : Terminal::Deadlocked;
      break;
    }
    if (tick >= sc.max_steps) {
      trace.terminal = Terminal::StepLimit;
      break;
    }
    // consume first, then activate: edges pended by this wave enable the next
    for (const EventId& ev : wave) {
      trace.steps.push_back({tick, ev});
      ++fires[ev];
      if (auto it = p.in.find(ev); it != p.in.end())
        for (const BehaviorEdge* e : it->second)
          if (pending[e] > 0) --pending[e];
    }
    for (const EventId& ev : wave) {
      auto it = full_out.find(ev);
      if (it == full_out.end()) continue;
      std::map<std::string, std::string> drawn;
      for (const BehaviorEdge* e : it->second) {
        if (!e->guard) {
          ++pending[e];
          continue;
        }
        const std::string& key = e->guard->key;
        auto bound = sc.bindings.find(key);
        if (bound == sc.bindings.end()) {
          result.error = SimError{SimErrorCode::UnboundGuard,
                                  ev + " evaluates guard key '" + key + "' which is not bound"};
          return result;
        }
        if (drawn.find(key) == drawn.end()) {
          const auto& seq = bound->second;
          std::size_t i = std::min(cursor[key], seq.size() - 1);
          drawn[key] = seq[i];
          ++cursor[key];
        }
        if (drawn[key] == e->guard->value) ++pending[e];
      }
    }
  }

  result.trace = std::move(trace);
  return result;
}

// Full pipeline entry: checks the graph against the overlay and the scenario
// against the graph before running.
inline SimResult simulate(const StaticModel& model, const EventOverlay& overlay,
                          const BehaviorGraph& behavior, const Scenario& scenario) {
  (void)model;
  SimResult result;
  std::set<EventId, NaturalLess> overlay_ids;
  for (const auto& [id, ev] : overlay.events) overlay_ids.insert(id);
  if (overlay_ids != behavior.nodes) {
    result.error = SimError{SimErrorCode::NodeSetMismatch,
                            "behavior graph nodes differ from overlay events"};
    return result;
  }
  auto dom = behavior_detail::guard_domains(behavior);
  for (const auto& [key, values] : scenario.bindings) {
    if (dom.find(key) == dom.end()) {
      result.error = SimError{SimErrorCode::UnknownGuardKey,
                              "scenario binds '" + key + "' but no edge guards on it"};
      return result;
    }
    if (values.empty()) {
      result.error = SimError{SimErrorCode::UnknownGuardKey, "empty sequence for '" + key + "'"};
      return result;
    }
  }
  return run_simulation(behavior, scenario);
}

struct AllTracesResult {
  std::optional<std::vector<Trace>> traces;
  std::optional<SimError> error;
  bool ok() const { return traces.has_value(); }
};

// Every linear extension of the binding-filtered graph, for small scalar
// scenarios; the exhaustive oracle the simulator is checked against. Each
// consistent edge is read as a hard precedence, so this applies to graphs
// where no event has two consistent guarded in-edges under the binding.
inline AllTracesResult all_traces(const BehaviorGraph& g, const Scenario& sc,
                                  std::size_t limit = 12) {
  AllTracesResult result;
  sim_detail::Prepared p = sim_detail::prepare(g, sc);
  if (p.possible.size() > limit) {
    result.error = SimError{SimErrorCode::TooLarge,
                            std::to_string(p.possible.size()) + " events exceed limit " +
                                std::to_string(limit)};
    return result;
  }
  std::vector<EventId> nodes(p.possible.begin(), p.possible.end());
  std::map<EventId, int> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> preds(nodes.size());
  for (const BehaviorEdge* e : p.edges) {
    if (p.possible.count(e->from) == 0 || p.possible.count(e->to) == 0) continue;
    preds[index[e->to]].push_back(index[e->from]);
  }
  // cycle under the binding means linear extensions do not exist
  {
    std::vector<int> indeg(nodes.size(), 0);
    std::vector<std::vector<int>> succs(nodes.size());
    for (std::size_t v = 0; v < nodes.size(); ++v)
      for (int u : preds[v]) {
        succs[u].push_back(static_cast<int>(v));
        ++indeg[v];
      }
    std::vector<int> ready;
    for (std::size_t v = 0; v < nodes.size(); ++v)
      if (indeg[v] == 0) ready.push_back(static_cast<int>(v));
    std::size_t seen = 0;
    while (!ready.empty()) {
      int v = ready.back();
      ready.pop_back();
      ++seen;
      for (int s : succs[v])
        if (--indeg[s] == 0) ready.push_back(s);
    }
    if (seen != nodes.size()) {
      result.error =
          SimError{SimErrorCode::CyclicUnderBinding, "binding-filtered graph has a cycle"};
      return result;
    }
  }

  std::vector<Trace> out;
  std::vector<int> order;
  std::vector<bool> used(nodes.size(), false);
  constexpr std::size_t kMaxTraces = 200000;
  bool overflow = false;

  auto emit = [&]() {
    Trace t;
    for (std::size_t i = 0; i < order.size(); ++i)
      t.steps.push_back({static_cast<int>(i), nodes[static_cast<std::size_t>(order[i])]});
    t.terminal = Terminal::Completed;
    out.push_back(std::move(t));
  };

  // depth-first enumeration in id order for a deterministic listing
  std::function<void()> rec = [&]() {
    if (overflow) return;
    if (order.size() == nodes.size()) {
      if (out.size() >= kMaxTraces) {
        overflow = true;
        return;
      }
      emit();
      return;
    }
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (used[v]) continue;
      bool ok = true;
      for (int u : preds[v])
        if (!used[static_cast<std::size_t>(u)]) ok = false;
      if (!ok) continue;
      used[v] = true;
      order.push_back(static_cast<int>(v));
      rec();
      order.pop_back();
      used[v] = false;
    }
  };
  rec();
  if (overflow) {
    result.error = SimError{SimErrorCode::TooLarge, "more linear extensions than enumerable"};
    return result;
  }
  result.traces = std::move(out);
  return result;
}

inline bool trace_in(const Trace& t, const std::vector<Trace>& set) {
  auto seq = t.event_sequence();
  for (const auto& other : set)
    if (other.event_sequence() == seq) return true;
  return false;
}

// Post-hoc checks on a finished trace: ticks never decrease, every step is
// reachable under the binding, and no first firing precedes a mandatory
// predecessor's first firing.
inline std::vector<std::string> verify_trace_precedence(const BehaviorGraph& g,
                                                        const Scenario& sc, const Trace& trace) {
  std::vector<std::string> problems;
  sim_detail::Prepared p = sim_detail::prepare(g, sc);
  int last_tick = 0;
  std::map<EventId, int, NaturalLess> first_tick;
  for (const auto& step : trace.steps) {
    if (step.tick < last_tick)
      problems.push_back("tick decreases at " + step.event);
    last_tick = step.tick;
    if (p.possible.count(step.event) == 0)
      problems.push_back(step.event + " fired but is unreachable under the binding");
    first_tick.emplace(step.event, step.tick);
  }
  for (const auto& [ev, tick] : first_tick) {
    auto it = p.in.find(ev);
    if (it == p.in.end()) continue;
    for (const BehaviorEdge* e : it->second) {
      if (e->guard || p.retry.count(e) > 0) continue;
      if (p.possible.count(e->from) == 0) continue;
      auto ft = first_tick.find(e->from);
      if (ft == first_tick.end())
        problems.push_back(ev + " fired but mandatory predecessor " + e->from + " never did");
      else if (ft->second >= tick)
        problems.push_back(ev + " fired no later than mandatory predecessor " + e->from);
    }
  }
  return problems;
}

// ---------------------------------------------------------------------------
// .scn files:
//
//   scenario <name> on <model>
//   bind <key> = <value>
//   bind <key> = [v1, v2, ...]
//   max_steps = N

inline Parsed<Scenario> parse_scenario(std::string_view text, std::string file = "<input>") {
  Parsed<Scenario> result;
  Lexer lex(text, file);
  TokenCursor cur(lex.tokens(), result.diagnostics);
  Scenario sc;
  if (!cur.at(Tok::Ident) || cur.peek().text != "scenario") {
    cur.error("expected 'scenario' header");
    return result;
  }
  cur.advance();
  if (!cur.at(Tok::Ident)) {
    cur.error("expected scenario name");
    return result;
  }
  sc.name = cur.advance().text;
  if (!cur.at(Tok::Ident) || cur.peek().text != "on") {
    cur.error("expected 'on'");
    return result;
  }
  cur.advance();
  if (!cur.at(Tok::Ident)) {
    cur.error("expected model name");
    return result;
  }
  sc.model_name = cur.advance().text;
  while (!cur.done()) {
    if (cur.at(Tok::Ident) && cur.peek().text == "bind") {
      cur.advance();
      if (!cur.at(Tok::Ident)) {
        cur.error("expected guard key");
        return result;
      }
      std::string key = cur.advance().text;
      if (!cur.expect(Tok::Equals, "'='")) return result;
      std::vector<std::string> values;
      if (cur.eat(Tok::LBracket)) {
        while (!cur.at(Tok::RBracket)) {
          if (!cur.at(Tok::Ident)) {
            cur.error("expected guard value");
            return result;
          }
          values.push_back(cur.advance().text);
          if (!cur.at(Tok::RBracket) && !cur.expect(Tok::Comma, "','")) return result;
        }
        cur.advance();  // ]
        if (values.empty()) {
          cur.error("sequence binding must not be empty");
          return result;
        }
      } else {
        if (!cur.at(Tok::Ident)) {
          cur.error("expected guard value");
          return result;
        }
        values.push_back(cur.advance().text);
      }
      if (sc.bindings.count(key) > 0) {
        cur.error("duplicate binding for '" + key + "'", "DuplicateId");
        return result;
      }
      sc.bindings[key] = std::move(values);
      continue;
    }
    if (cur.at(Tok::Ident) && cur.peek().text == "max_steps") {
      cur.advance();
      if (!cur.expect(Tok::Equals, "'='")) return result;
      if (!cur.at(Tok::Int)) {
        cur.error("expected integer");
        return result;
      }
      sc.max_steps = std::stoi(cur.advance().text);
      if (sc.max_steps <= 0) {
        cur.error("max_steps must be positive");
        return result;
      }
      continue;
    }
    cur.error("expected 'bind' or 'max_steps'");
    return result;
  }
  result.value = std::move(sc);
  return result;
}

// one step per line, then the terminal record
inline std::string trace_to_jsonl(const Trace& t) {
  std::string out;
  for (const auto& s : t.steps) {
    nlohmann::json j{{"event", s.event}, {"tick", s.tick}};
    out += j.dump();
    out += "\n";
  }
  nlohmann::json j{{"terminal", to_string(t.terminal)}};
  out += j.dump();
  out += "\n";
  return out;
}

}  // namespace tml
