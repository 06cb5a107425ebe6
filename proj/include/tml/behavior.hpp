#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tml/events.hpp"
#include "tml/model.hpp"

namespace tml {

// Chronology is not drawn, it is computed: an edge A -> B exists exactly when
// some static arc leaves A's region and enters B's region (storages are
// transparent). A crossing trigger's guard rides along on the edge.
inline BehaviorGraph infer_behavior(const StaticModel& m, const EventOverlay& ov) {
  std::map<ActionId, std::vector<EventId>, NaturalLess> membership;
  BehaviorGraph g;
  for (const auto& [id, ev] : ov.events) {
    g.nodes.insert(id);
    for (const auto& a : ev.region) membership[a].push_back(id);
  }
  events_detail::ArcView view(m);
  for (const auto& arc : view.arcs) {
    auto fi = membership.find(arc.from);
    auto ti = membership.find(arc.to);
    if (fi == membership.end() || ti == membership.end()) continue;
    for (const auto& from_ev : fi->second)
      for (const auto& to_ev : ti->second)
        if (from_ev != to_ev) g.edges.push_back({from_ev, to_ev, arc.guard});
  }
  g.normalize();
  return g;
}

struct BehaviorDiff {
  bool node_mismatch = false;
  std::vector<EventId> nodes_only_declared, nodes_only_inferred;
  std::vector<BehaviorEdge> edges_only_declared, edges_only_inferred;
  bool empty() const {
    return !node_mismatch && edges_only_declared.empty() && edges_only_inferred.empty();
  }
};

inline BehaviorDiff check_behavior(const BehaviorGraph& declared, const BehaviorGraph& inferred) {
  BehaviorDiff diff;
  for (const auto& n : declared.nodes)
    if (inferred.nodes.count(n) == 0) diff.nodes_only_declared.push_back(n);
  for (const auto& n : inferred.nodes)
    if (declared.nodes.count(n) == 0) diff.nodes_only_inferred.push_back(n);
  diff.node_mismatch = !diff.nodes_only_declared.empty() || !diff.nodes_only_inferred.empty();
  if (diff.node_mismatch) return diff;
  std::set<BehaviorEdge> d(declared.edges.begin(), declared.edges.end());
  std::set<BehaviorEdge> i(inferred.edges.begin(), inferred.edges.end());
  for (const auto& e : d)
    if (i.count(e) == 0) diff.edges_only_declared.push_back(e);
  for (const auto& e : i)
    if (d.count(e) == 0) diff.edges_only_inferred.push_back(e);
  return diff;
}

inline std::string format(const BehaviorDiff& diff) {
  std::string out;
  auto edge = [](const BehaviorEdge& e) {
    std::string s = e.from + " -> " + e.to;
    if (e.guard) s += " [" + e.guard->key + "=" + e.guard->value + "]";
    return s;
  };
  for (const auto& n : diff.nodes_only_declared) out += "node only declared: " + n + "\n";
  for (const auto& n : diff.nodes_only_inferred) out += "node only inferred: " + n + "\n";
  for (const auto& e : diff.edges_only_declared) out += "edge only declared: " + edge(e) + "\n";
  for (const auto& e : diff.edges_only_inferred) out += "edge only inferred: " + edge(e) + "\n";
  if (out.empty()) out = "graphs are equivalent\n";
  return out;
}

namespace behavior_detail {

// guard keys with their value domains, as written on the edges
inline std::map<std::string, std::set<std::string>> guard_domains(const BehaviorGraph& g) {
  std::map<std::string, std::set<std::string>> dom;
  for (const auto& e : g.edges)
    if (e.guard) dom[e.guard->key].insert(e.guard->value);
  return dom;
}

struct Filtered {
  std::map<EventId, std::vector<const BehaviorEdge*>, NaturalLess> out;
  std::set<EventId, NaturalLess> nodes;
};

template <class Consistent>
inline Filtered filter_graph(const BehaviorGraph& g, Consistent&& keep) {
  Filtered f;
  f.nodes = g.nodes;
  for (const auto& e : g.edges)
    if (!e.guard || keep(*e.guard)) f.out[e.from].push_back(&e);
  return f;
}

// Edges that close a cycle, found by depth-first search from the sources in
// natural id order. The simulator treats them as re-activations of an event
// already fired on the current path, never as prerequisites.
inline std::set<const BehaviorEdge*> back_edges(const BehaviorGraph& g, const Filtered& f) {
  std::set<const BehaviorEdge*> back;
  std::map<EventId, int, NaturalLess> state;  // 0 new, 1 on stack, 2 done
  std::set<EventId, NaturalLess> in_target;
  for (const auto& [ev, edges] : f.out)
    for (const BehaviorEdge* e : edges) in_target.insert(e->to);

  struct Frame {
    EventId node;
    std::size_t next = 0;
  };
  auto dfs = [&](const EventId& root) {
    if (state[root] != 0) return;
    std::vector<Frame> stack{{root}};
    state[root] = 1;
    while (!stack.empty()) {
      Frame& fr = stack.back();
      auto it = f.out.find(fr.node);
      if (it == f.out.end() || fr.next >= it->second.size()) {
        state[fr.node] = 2;
        stack.pop_back();
        continue;
      }
      const BehaviorEdge* e = it->second[fr.next++];
      int s = state[e->to];
      if (s == 1)
        back.insert(e);
      else if (s == 0) {
        state[e->to] = 1;
        stack.push_back({e->to});
      }
    }
  };
  for (const auto& n : g.nodes)
    if (in_target.count(n) == 0) dfs(n);
  for (const auto& n : g.nodes) dfs(n);  // anything left (pure cycles)
  return back;
}

inline bool acyclic_without(const Filtered& f, const std::set<const BehaviorEdge*>& skip,
                            const std::set<EventId, NaturalLess>& nodes) {
  std::map<EventId, int, NaturalLess> indeg;
  for (const auto& n : nodes) indeg[n] = 0;
  for (const auto& [ev, edges] : f.out)
    for (const BehaviorEdge* e : edges)
      if (skip.count(e) == 0) ++indeg[e->to];
  std::vector<EventId> ready;
  for (const auto& [n, d] : indeg)
    if (d == 0) ready.push_back(n);
  std::size_t seen = 0;
  while (!ready.empty()) {
    EventId n = ready.back();
    ready.pop_back();
    ++seen;
    auto it = f.out.find(n);
    if (it == f.out.end()) continue;
    for (const BehaviorEdge* e : it->second)
      if (skip.count(e) == 0 && --indeg[e->to] == 0) ready.push_back(e->to);
  }
  return seen == nodes.size();
}

}  // namespace behavior_detail

// Graph invariant: under every single total guard binding, the consistent
// subgraph is acyclic once its cycle-closing (retry) edges are set aside,
// and every remaining cycle is entered from outside. Domains are taken from
// the edges themselves.
inline std::vector<std::string> check_guarded_acyclicity(const BehaviorGraph& g) {
  std::vector<std::string> problems;
  auto dom = behavior_detail::guard_domains(g);
  std::vector<std::pair<std::string, std::vector<std::string>>> keys;
  std::size_t combos = 1;
  for (const auto& [k, vals] : dom) {
    keys.push_back({k, {vals.begin(), vals.end()}});
    combos *= vals.size();
    if (combos > 65536) {
      problems.push_back("guard space too large to enumerate");
      return problems;
    }
  }
  std::vector<std::size_t> pick(keys.size(), 0);
  for (std::size_t n = 0; n < std::max<std::size_t>(combos, 1); ++n) {
    std::map<std::string, std::string> binding;
    std::size_t rest = n;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      binding[keys[i].first] = keys[i].second[rest % keys[i].second.size()];
      rest /= keys[i].second.size();
    }
    auto f = behavior_detail::filter_graph(
        g, [&](const Guard& gd) { return binding.at(gd.key) == gd.value; });
    auto back = behavior_detail::back_edges(g, f);
    if (!behavior_detail::acyclic_without(f, back, g.nodes)) {
      std::string desc = "cycle survives retry-edge removal under binding";
      for (const auto& [k, v] : binding) desc += " " + k + "=" + v;
      problems.push_back(desc);
    }
    // every retry edge must re-enter an event that has another way in;
    // otherwise the loop could never start
    for (const BehaviorEdge* e : back) {
      bool has_other_entry = false;
      for (const auto& [ev, edges] : f.out)
        for (const BehaviorEdge* other : edges)
          if (other != e && back.count(other) == 0 && other->to == e->to)
            has_other_entry = true;
      if (!has_other_entry)
        problems.push_back("retry edge " + e->from + " -> " + e->to +
                           " re-enters an event with no other way in");
    }
  }
  return problems;
}

}  // namespace tml
