#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tml/model.hpp"

namespace tml {

// Flow pairs the action grammar admits. validate() consults only this
// table; a widened table defines a dialect.
struct SuccessorTable {
  using Pair = std::pair<ActionKind, ActionKind>;
  std::set<Pair> intra;           // both endpoints in one machine
  std::set<Pair> boundary_same;   // same machine, entering/leaving its edge
  std::set<Pair> cross;           // endpoints in different machines
  bool release_to_storage = true;
  bool storage_to_receive = true;
  bool storage_to_process = true;
};

inline SuccessorTable default_successor_table() {
  using K = ActionKind;
  SuccessorTable t;
  t.intra = {{K::Create, K::Process},  {K::Create, K::Release},
             {K::Receive, K::Process}, {K::Receive, K::Release},
             {K::Process, K::Release}, {K::Process, K::Process}};
  t.boundary_same = {{K::Release, K::Transfer}, {K::Transfer, K::Receive}};
  t.cross = {{K::Transfer, K::Transfer}};
  return t;
}

struct Violation {
  std::string code;     // V1..V6
  std::string element;  // offending arc or action id
  std::string message;
  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
};

// Well-formedness over a structurally valid model:
//   V1 flow arcs respect the successor table
//   V2 machine boundaries: inter-machine flows are Transfer->Transfer and
//      storages are wired only inside their owner machine
//   V3 every receive is fed by a transfer or a storage
//   V4 every create has an outgoing flow or trigger
//   V5 guarded sibling triggers share one key with pairwise distinct values
//   V6 per-thing flow acyclicity
// A model marked simplified suspends the boundary rules (V1-V3): contraction
// has removed exactly the actions those rules constrain.
inline ValidationReport validate(const StaticModel& m,
                                 const SuccessorTable& table = default_successor_table()) {
  ValidationReport report;
  auto hit = [&](const char* code, const std::string& element, std::string msg) {
    report.violations.push_back({code, element, std::move(msg)});
  };

  if (!m.simplified) {
    for (const auto& [id, f] : m.flows) {
      bool from_store = m.storages.count(f.from) > 0;
      bool to_store = m.storages.count(f.to) > 0;
      if (from_store || to_store) {
        const Storage& s = from_store ? m.storages.at(f.from) : m.storages.at(f.to);
        const Action& a = from_store ? m.actions.at(f.to) : m.actions.at(f.from);
        bool kind_ok = from_store
                           ? ((a.kind == ActionKind::Receive && table.storage_to_receive) ||
                              (a.kind == ActionKind::Process && table.storage_to_process))
                           : (a.kind == ActionKind::Release && table.release_to_storage);
        if (!kind_ok)
          hit("V1", id, std::string("storage arc with ") + to_string(a.kind) + " endpoint");
        if (s.owner != a.owner)
          hit("V2", id, "storage " + s.id + " used from machine " + a.owner);
        continue;
      }
      const Action& from = m.actions.at(f.from);
      const Action& to = m.actions.at(f.to);
      SuccessorTable::Pair pair{from.kind, to.kind};
      if (from.owner == to.owner) {
        if (table.intra.count(pair) == 0 && table.boundary_same.count(pair) == 0)
          hit("V1", id, std::string(to_string(from.kind)) + " may not flow into " +
                            to_string(to.kind) + " inside " + from.owner);
      } else {
        if (table.cross.count(pair) == 0)
          hit("V2", id, std::string("flow crosses ") + from.owner + " -> " + to.owner +
                            " as " + to_string(from.kind) + " -> " + to_string(to.kind));
      }
    }

    for (const auto& [id, a] : m.actions) {
      if (a.kind != ActionKind::Receive) continue;
      bool fed = false;
      for (const auto& [fid, f] : m.flows) {
        if (f.to != id) continue;
        if (m.storages.count(f.from) > 0 ||
            m.actions.at(f.from).kind == ActionKind::Transfer) {
          fed = true;
          break;
        }
      }
      if (!fed) hit("V3", id, "receive is reachable from no transfer or storage");
    }
  }

  for (const auto& [id, a] : m.actions) {
    if (a.kind != ActionKind::Create) continue;
    bool out = false;
    for (const auto& [fid, f] : m.flows)
      if (f.from == id) { out = true; break; }
    if (!out)
      for (const auto& [tid, t] : m.triggers)
        if (t.from == id) { out = true; break; }
    if (!out) hit("V4", id, "create has no outgoing flow or trigger");
  }

  // V5: group sibling triggers by source
  std::map<ActionId, std::vector<const TriggerArc*>, NaturalLess> siblings;
  for (const auto& [id, t] : m.triggers) siblings[t.from].push_back(&t);
  for (const auto& [src, group] : siblings) {
    std::string key;
    std::set<std::string> values;
    for (const TriggerArc* t : group) {
      if (!t->guard) continue;
      if (key.empty()) key = t->guard->key;
      if (t->guard->key != key) {
        hit("V5", t->id, "sibling triggers from " + src + " mix guard keys '" + key +
                             "' and '" + t->guard->key + "'");
        continue;
      }
      if (!values.insert(t->guard->value).second)
        hit("V5", t->id,
            "sibling triggers from " + src + " repeat guard " + key + "=" + t->guard->value);
    }
  }

  for (const auto& e : scan_integrity(m))
    if (e.code == ModelErrorCode::FlowCycle) hit("V6", "", e.message);

  return report;
}

// one violation per line, for CI consumption
inline std::string report_to_jsonl(const ValidationReport& r) {
  std::string out;
  for (const auto& v : r.violations) {
    nlohmann::json j{{"code", v.code}, {"element", v.element}, {"message", v.message}};
    out += j.dump();
    out += "\n";
  }
  return out;
}

}  // namespace tml
