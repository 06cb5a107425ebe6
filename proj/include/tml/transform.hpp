#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tml/diag.hpp"
#include "tml/model.hpp"
#include "tml/validate.hpp"

namespace tml {

namespace transform_detail {

struct ArcIndex {
  std::map<std::string, std::vector<const FlowArc*>> out, in;
  std::set<std::string> storage_touched;  // actions on a storage arc
  std::set<std::string> trigger_touched;

  explicit ArcIndex(const StaticModel& m) {
    for (const auto& [id, f] : m.flows) {
      out[f.from].push_back(&f);
      in[f.to].push_back(&f);
      if (m.storages.count(f.from) > 0) storage_touched.insert(f.to);
      if (m.storages.count(f.to) > 0) storage_touched.insert(f.from);
    }
    for (const auto& [id, t] : m.triggers) {
      trigger_touched.insert(t.from);
      trigger_touched.insert(t.to);
    }
  }
};

// An action may be contracted away when carrying a thing across machine
// boundaries is its only role. A receive nothing flows out of is the thing's
// final destination and stays, or the delivery itself would vanish.
inline bool eligible(const ArcIndex& ix, const Action& a) {
  if (a.kind != ActionKind::Release && a.kind != ActionKind::Transfer &&
      a.kind != ActionKind::Receive)
    return false;
  if (ix.trigger_touched.count(a.id) > 0) return false;
  if (ix.storage_touched.count(a.id) > 0) return false;
  auto out_it = ix.out.find(a.id);
  auto in_it = ix.in.find(a.id);
  if (a.kind == ActionKind::Receive && (out_it == ix.out.end() || out_it->second.empty()))
    return false;
  if (out_it != ix.out.end() && out_it->second.size() > 1) return false;
  if (in_it != ix.in.end() && in_it->second.size() > 1) return false;
  return true;
}

inline StaticModel rebuild(const StaticModel& m, const std::set<std::string>& removed,
                           const std::vector<std::pair<std::string, std::string>>& bridges,
                           bool simplified) {
  StaticModel out;
  out.name = m.name;
  out.simplified = simplified;
  for (const auto& [id, mach] : m.machines) out.add_machine(mach.name, mach.parent);
  for (const auto& [id, t] : m.things) out.add_thing(t.name, t.home);
  for (const auto& [id, a] : m.actions) {
    if (removed.count(id) > 0) continue;
    out.add_action(a.owner, id.substr(a.owner.size() + 1), a.kind, a.thing, a.label);
  }
  for (const auto& [id, s] : m.storages) out.add_storage(s.owner, s.name, s.thing);
  for (const auto& [id, f] : m.flows) {
    if (removed.count(f.from) > 0 || removed.count(f.to) > 0) continue;
    out.add_flow(f.from, f.to);
  }
  for (const auto& [from, to] : bridges) out.add_flow(from, to);
  for (const auto& [id, t] : m.triggers) out.add_trigger(t.from, t.to, t.guard);
  return out;
}

inline std::string sanitize_ident(const std::string& s) {
  std::string out;
  for (char c : s)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out.insert(out.begin(), 'a');
  return out;
}

}  // namespace transform_detail

// Contract every maximal boundary chain (release, transfers, receive; one
// thing; no triggers or storages attached) to a direct arc between its flow
// neighbours. Actions that a trigger or storage arc touches keep their
// identity; they have a role beyond crossing the boundary. Runs to a fixed
// point, so the result is its own simplification.
inline Parsed<StaticModel> simplify(const StaticModel& model) {
  Parsed<StaticModel> result;
  if (!validate(model).pass()) {
    result.diagnostics.push_back(
        {Severity::Error, {}, "NotValidated", "simplify requires a model that passes validate"});
    return result;
  }
  StaticModel cur = model;
  for (;;) {
    transform_detail::ArcIndex ix(cur);
    std::set<std::string> removed;
    std::vector<std::pair<std::string, std::string>> bridges;
    for (const auto& [id, a] : cur.actions) {
      if (removed.count(id) > 0 || !transform_detail::eligible(ix, a)) continue;
      // walk to the head of this run, then to its tail
      std::string head = id;
      for (;;) {
        auto in_it = ix.in.find(head);
        if (in_it == ix.in.end()) break;
        const std::string& prev = in_it->second.front()->from;
        if (cur.actions.count(prev) == 0 ||
            !transform_detail::eligible(ix, cur.actions.at(prev)))
          break;
        head = prev;
      }
      std::string tail = id;
      for (;;) {
        auto out_it = ix.out.find(tail);
        if (out_it == ix.out.end()) break;
        const std::string& next = out_it->second.front()->to;
        if (cur.actions.count(next) == 0 ||
            !transform_detail::eligible(ix, cur.actions.at(next)))
          break;
        tail = next;
      }
      std::string pred, succ;
      if (auto it = ix.in.find(head); it != ix.in.end()) pred = it->second.front()->from;
      if (auto it = ix.out.find(tail); it != ix.out.end()) succ = it->second.front()->to;
      for (std::string n = head;;) {
        removed.insert(n);
        if (n == tail) break;
        n = ix.out.at(n).front()->to;
      }
      if (!pred.empty() && !succ.empty()) bridges.push_back({pred, succ});
    }
    if (removed.empty()) break;
    cur = transform_detail::rebuild(cur, removed, bridges, true);
  }
  cur.simplified = true;
  result.value = std::move(cur);
  return result;
}

// Expand boundary-crossing flow arcs back into release/transfer/transfer/
// receive form, inserting only the stages the endpoints lack. Fresh actions
// get deterministic names derived from the arc id.
inline Parsed<StaticModel> elaborate(const StaticModel& model) {
  Parsed<StaticModel> result;
  if (!model.simplified) {
    result.diagnostics.push_back(
        {Severity::Error, {}, "NotSimplified", "elaborate requires a model marked simplified"});
    return result;
  }
  StaticModel out = model;
  out.simplified = false;

  std::vector<const FlowArc*> crossing;
  for (const auto& [id, f] : model.flows) {
    auto fa = model.actions.find(f.from);
    auto ta = model.actions.find(f.to);
    if (fa == model.actions.end() || ta == model.actions.end()) continue;  // storage arc
    if (fa->second.owner != ta->second.owner) crossing.push_back(&f);
  }

  auto fresh = [&out](const MachineId& owner, std::string base, ActionKind kind,
                      const ThingId& thing) {
    std::string local = base;
    int n = 1;
    while (out.add_action(owner, local, kind, thing)) local = base + "_" + std::to_string(++n);
    return owner + "." + local;
  };

  for (const FlowArc* f : crossing) {
    const Action& from = out.actions.at(f->from);
    const Action& to = out.actions.at(f->to);
    if (from.kind == ActionKind::Transfer && to.kind == ActionKind::Transfer) continue;
    std::string base = transform_detail::sanitize_ident(f->id);
    std::vector<std::string> chain{f->from};
    if (from.kind != ActionKind::Release && from.kind != ActionKind::Transfer)
      chain.push_back(fresh(from.owner, base + "_rel", ActionKind::Release, from.thing));
    if (from.kind != ActionKind::Transfer)
      chain.push_back(fresh(from.owner, base + "_out", ActionKind::Transfer, from.thing));
    if (to.kind != ActionKind::Transfer)
      chain.push_back(fresh(to.owner, base + "_in", ActionKind::Transfer, to.thing));
    if (to.kind != ActionKind::Receive && to.kind != ActionKind::Transfer)
      chain.push_back(fresh(to.owner, base + "_rcv", ActionKind::Receive, to.thing));
    chain.push_back(f->to);
    out.flows.erase(f->id);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) out.add_flow(chain[i], chain[i + 1]);
  }

  result.value = std::move(out);
  return result;
}

// Per-thing reachability over flow arcs (storages included as path nodes),
// restricted to nodes present in both models when comparing.
inline std::map<std::string, std::set<std::string>> flow_closure(const StaticModel& m) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [id, f] : m.flows) adj[f.from].push_back(f.to);
  std::map<std::string, std::set<std::string>> closure;
  for (const auto& [id, a] : m.actions) {
    std::vector<std::string> stack{id};
    std::set<std::string>& reach = closure[id];
    while (!stack.empty()) {
      std::string cur = stack.back();
      stack.pop_back();
      auto it = adj.find(cur);
      if (it == adj.end()) continue;
      for (const auto& next : it->second)
        if (reach.insert(next).second) stack.push_back(next);
    }
  }
  return closure;
}

inline bool closures_agree_on_common(const StaticModel& a, const StaticModel& b) {
  auto ca = flow_closure(a), cb = flow_closure(b);
  for (const auto& [id, action] : a.actions) {
    if (b.actions.count(id) == 0) continue;
    const auto& ra = ca[id];
    const auto& rb = cb[id];
    for (const auto& t : ra)
      if (a.actions.count(t) > 0 && b.actions.count(t) > 0 && rb.count(t) == 0) return false;
    for (const auto& t : rb)
      if (a.actions.count(t) > 0 && b.actions.count(t) > 0 && ra.count(t) == 0) return false;
  }
  return true;
}

}  // namespace tml
