#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tml {

// Digit-aware ordering so that "E2" < "E10" and "f2" < "f10". Every model
// collection iterates in this order; it is the single source of determinism
// for printing, rendering and scheduling.
inline int natural_compare(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    char ca = a[i], cb = b[j];
    bool da = ca >= '0' && ca <= '9';
    bool db = cb >= '0' && cb <= '9';
    if (da && db) {
      std::size_t i0 = i, j0 = j;
      while (i < a.size() && a[i] >= '0' && a[i] <= '9') ++i;
      while (j < b.size() && b[j] >= '0' && b[j] <= '9') ++j;
      std::string_view ra = a.substr(i0, i - i0);
      std::string_view rb = b.substr(j0, j - j0);
      std::string_view ta = ra.substr(std::min(ra.find_first_not_of('0'), ra.size() - 1));
      std::string_view tb = rb.substr(std::min(rb.find_first_not_of('0'), rb.size() - 1));
      if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
      if (int c = ta.compare(tb); c != 0) return c < 0 ? -1 : 1;
      if (ra.size() != rb.size()) return ra.size() < rb.size() ? -1 : 1;
    } else {
      if (ca != cb) return static_cast<unsigned char>(ca) < static_cast<unsigned char>(cb) ? -1 : 1;
      ++i;
      ++j;
    }
  }
  if (i < a.size()) return 1;
  if (j < b.size()) return -1;
  return 0;
}

struct NaturalLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const {
    return natural_compare(a, b) < 0;
  }
};

// The five generic actions. Arrive/Accept are intentionally absent; anything
// entering a machine is a Receive.
enum class ActionKind { Create, Process, Release, Transfer, Receive };

inline const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Create: return "create";
    case ActionKind::Process: return "process";
    case ActionKind::Release: return "release";
    case ActionKind::Transfer: return "transfer";
    case ActionKind::Receive: return "receive";
  }
  return "?";
}

inline std::optional<ActionKind> action_kind_from(std::string_view s) {
  if (s == "create") return ActionKind::Create;
  if (s == "process") return ActionKind::Process;
  if (s == "release") return ActionKind::Release;
  if (s == "transfer") return ActionKind::Transfer;
  if (s == "receive") return ActionKind::Receive;
  return std::nullopt;
}

// Ids are dotted paths supplied by the DSL ("BankSystem.AccountSystem.cmp").
// They are plain strings so fixtures and diagnostics can cross-reference
// elements by name.
using MachineId = std::string;
using ActionId = std::string;
using ThingId = std::string;
using StorageId = std::string;
using EventId = std::string;

struct Guard {
  std::string key;
  std::string value;
  auto operator<=>(const Guard&) const = default;
};

struct Machine {
  MachineId id;  // full dotted path
  std::string name;
  std::optional<MachineId> parent;
  std::vector<MachineId> children;  // kept sorted
  bool operator==(const Machine&) const = default;
};

struct Thing {
  ThingId id;  // ids are the model-wide unique names
  std::string name;
  MachineId home;  // machine whose block declares it
  bool operator==(const Thing&) const = default;
};

struct Action {
  ActionId id;
  ActionKind kind = ActionKind::Process;
  MachineId owner;
  ThingId thing;
  std::optional<std::string> label;  // diagram step annotation, e.g. "14"
  bool operator==(const Action&) const = default;
};

// Flow endpoints may be actions or storages; both endpoints always carry the
// same thing. Arc ids are derived from the endpoints, never counted.
struct FlowArc {
  std::string id;  // "<from>-><to>"
  std::string from;
  std::string to;
  bool operator==(const FlowArc&) const = default;
};

struct TriggerArc {
  std::string id;  // "<from>~><to>"
  ActionId from;
  ActionId to;
  std::optional<Guard> guard;
  bool operator==(const TriggerArc&) const = default;
};

struct Storage {
  StorageId id;
  MachineId owner;
  std::string name;
  ThingId thing;
  bool operator==(const Storage&) const = default;
};

enum class ModelErrorCode {
  DuplicateId,
  DanglingReference,
  SelfLoopArc,
  CrossThingFlow,
  StorageFlowKind,  // storage arc whose action side is not Release/Receive/Process
  FlowCycle,        // per-thing flow acyclicity would break
  BadName,
  UnknownAction,
};

inline const char* to_string(ModelErrorCode c) {
  switch (c) {
    case ModelErrorCode::DuplicateId: return "DuplicateId";
    case ModelErrorCode::DanglingReference: return "DanglingReference";
    case ModelErrorCode::SelfLoopArc: return "SelfLoopArc";
    case ModelErrorCode::CrossThingFlow: return "CrossThingFlow";
    case ModelErrorCode::StorageFlowKind: return "StorageFlowKind";
    case ModelErrorCode::FlowCycle: return "FlowCycle";
    case ModelErrorCode::BadName: return "BadName";
    case ModelErrorCode::UnknownAction: return "UnknownAction";
  }
  return "?";
}

struct ModelError {
  ModelErrorCode code;
  std::string message;
};

inline std::string flow_arc_id(std::string_view from, std::string_view to) {
  return std::string(from) + "->" + std::string(to);
}

inline std::string trigger_arc_id(std::string_view from, std::string_view to) {
  return std::string(from) + "~>" + std::string(to);
}

enum class ArcKind { Flow, Trigger };

struct Successor {
  ArcKind arc;
  std::string arc_id;
  std::string target;  // action or storage id
  std::optional<Guard> guard;
  bool operator==(const Successor&) const = default;
};

// The static plane. Mutating add_* calls are meant for the construction
// phase (parsers, importers, tests); each one either preserves every model
// invariant or rejects the element. After construction the model is treated
// as an immutable value.
struct StaticModel {
  std::string name = "M";
  bool simplified = false;

  std::map<MachineId, Machine, NaturalLess> machines;
  std::map<ThingId, Thing, NaturalLess> things;
  std::map<ActionId, Action, NaturalLess> actions;
  std::map<std::string, FlowArc, NaturalLess> flows;
  std::map<std::string, TriggerArc, NaturalLess> triggers;
  std::map<StorageId, Storage, NaturalLess> storages;

  bool operator==(const StaticModel&) const = default;

  bool has_node(const std::string& id) const {
    return actions.count(id) > 0 || storages.count(id) > 0;
  }

  // thing carried by an action or storage node
  std::optional<ThingId> node_thing(const std::string& id) const {
    if (auto it = actions.find(id); it != actions.end()) return it->second.thing;
    if (auto it = storages.find(id); it != storages.end()) return it->second.thing;
    return std::nullopt;
  }

  std::optional<MachineId> node_owner(const std::string& id) const {
    if (auto it = actions.find(id); it != actions.end()) return it->second.owner;
    if (auto it = storages.find(id); it != storages.end()) return it->second.owner;
    return std::nullopt;
  }

  // Local declaration names share one namespace per machine so that dotted
  // references resolve unambiguously.
  bool local_name_taken(const MachineId& owner, const std::string& local) const {
    std::string full = owner.empty() ? local : owner + "." + local;
    return machines.count(full) > 0 || actions.count(full) > 0 || storages.count(full) > 0;
  }

  std::optional<ModelError> add_machine(const std::string& name_, std::optional<MachineId> parent) {
    if (name_.empty()) return ModelError{ModelErrorCode::BadName, "machine name is empty"};
    if (parent && machines.find(*parent) == machines.end())
      return ModelError{ModelErrorCode::DanglingReference, "unknown parent machine " + *parent};
    MachineId id = parent ? *parent + "." + name_ : name_;
    if (parent ? local_name_taken(*parent, name_) : local_name_taken("", name_))
      return ModelError{ModelErrorCode::DuplicateId, "duplicate machine " + id};
    machines.emplace(id, Machine{id, name_, parent, {}});
    if (parent) {
      auto& ch = machines.at(*parent).children;
      ch.insert(std::upper_bound(ch.begin(), ch.end(), id, NaturalLess{}), id);
    }
    return std::nullopt;
  }

  std::optional<ModelError> add_thing(const std::string& name_, const MachineId& home) {
    if (name_.empty()) return ModelError{ModelErrorCode::BadName, "thing name is empty"};
    if (machines.find(home) == machines.end())
      return ModelError{ModelErrorCode::DanglingReference, "unknown machine " + home};
    if (things.count(name_) > 0)
      return ModelError{ModelErrorCode::DuplicateId, "duplicate thing " + name_};
    things.emplace(name_, Thing{name_, name_, home});
    return std::nullopt;
  }

  std::optional<ModelError> add_action(const MachineId& owner, const std::string& local,
                                       ActionKind kind, const ThingId& thing,
                                       std::optional<std::string> label = std::nullopt) {
    if (local.empty()) return ModelError{ModelErrorCode::BadName, "action name is empty"};
    if (machines.find(owner) == machines.end())
      return ModelError{ModelErrorCode::DanglingReference, "unknown machine " + owner};
    if (things.find(thing) == things.end())
      return ModelError{ModelErrorCode::DanglingReference, "unknown thing " + thing};
    if (local_name_taken(owner, local))
      return ModelError{ModelErrorCode::DuplicateId, "duplicate name " + owner + "." + local};
    ActionId id = owner + "." + local;
    actions.emplace(id, Action{id, kind, owner, thing, std::move(label)});
    return std::nullopt;
  }

  std::optional<ModelError> add_storage(const MachineId& owner, const std::string& local,
                                        const ThingId& thing) {
    if (local.empty()) return ModelError{ModelErrorCode::BadName, "storage name is empty"};
    if (machines.find(owner) == machines.end())
      return ModelError{ModelErrorCode::DanglingReference, "unknown machine " + owner};
    if (things.find(thing) == things.end())
      return ModelError{ModelErrorCode::DanglingReference, "unknown thing " + thing};
    if (local_name_taken(owner, local))
      return ModelError{ModelErrorCode::DuplicateId, "duplicate name " + owner + "." + local};
    StorageId id = owner + "." + local;
    storages.emplace(id, Storage{id, owner, local, thing});
    return std::nullopt;
  }

  std::optional<ModelError> add_flow(const std::string& from, const std::string& to) {
    if (from == to) return ModelError{ModelErrorCode::SelfLoopArc, "flow " + from + " -> itself"};
    if (!has_node(from))
      return ModelError{ModelErrorCode::DanglingReference, "unknown flow endpoint " + from};
    if (!has_node(to))
      return ModelError{ModelErrorCode::DanglingReference, "unknown flow endpoint " + to};
    std::string id = flow_arc_id(from, to);
    if (flows.count(id) > 0)
      return ModelError{ModelErrorCode::DuplicateId, "duplicate flow " + id};
    if (storages.count(from) > 0 && storages.count(to) > 0)
      return ModelError{ModelErrorCode::StorageFlowKind, "flow between two storages: " + id};
    if (*node_thing(from) != *node_thing(to))
      return ModelError{ModelErrorCode::CrossThingFlow,
                        "flow " + id + " carries " + *node_thing(from) + " into " + *node_thing(to)};
    // store side must be a Release, retrieve side a Receive or Process
    if (storages.count(to) > 0 && actions.at(from).kind != ActionKind::Release)
      return ModelError{ModelErrorCode::StorageFlowKind, "only release may feed storage: " + id};
    if (storages.count(from) > 0) {
      ActionKind k = actions.at(to).kind;
      if (k != ActionKind::Receive && k != ActionKind::Process)
        return ModelError{ModelErrorCode::StorageFlowKind,
                          "storage may feed only receive/process: " + id};
    }
    if (flow_would_cycle(from, to))
      return ModelError{ModelErrorCode::FlowCycle, "flow " + id + " closes a cycle"};
    flows.emplace(id, FlowArc{id, from, to});
    return std::nullopt;
  }

  std::optional<ModelError> add_trigger(const ActionId& from, const ActionId& to,
                                        std::optional<Guard> guard = std::nullopt) {
    if (from == to) return ModelError{ModelErrorCode::SelfLoopArc, "trigger " + from + " -> itself"};
    if (actions.find(from) == actions.end())
      return ModelError{ModelErrorCode::DanglingReference, "unknown trigger endpoint " + from};
    if (actions.find(to) == actions.end())
      return ModelError{ModelErrorCode::DanglingReference, "unknown trigger endpoint " + to};
    if (guard && (guard->key.empty() || guard->value.empty()))
      return ModelError{ModelErrorCode::BadName, "guard key/value must be nonempty"};
    std::string id = trigger_arc_id(from, to);
    if (triggers.count(id) > 0)
      return ModelError{ModelErrorCode::DuplicateId, "duplicate trigger " + id};
    triggers.emplace(id, TriggerArc{id, from, to, std::move(guard)});
    return std::nullopt;
  }

  // All flow and trigger arcs leaving an action, sorted by arc id.
  std::optional<std::vector<Successor>> successors(const ActionId& action) const {
    if (actions.find(action) == actions.end()) return std::nullopt;
    std::vector<Successor> out;
    for (const auto& [id, f] : flows)
      if (f.from == action) out.push_back({ArcKind::Flow, id, f.to, std::nullopt});
    for (const auto& [id, t] : triggers)
      if (t.from == action) out.push_back({ArcKind::Trigger, id, t.to, t.guard});
    std::sort(out.begin(), out.end(),
              [](const Successor& a, const Successor& b) { return natural_compare(a.arc_id, b.arc_id) < 0; });
    return out;
  }

  // Owners of a set of actions; optionally closed under machine ancestry.
  std::optional<std::set<MachineId, NaturalLess>> machine_of_region(
      const std::set<ActionId, NaturalLess>& region, bool include_ancestors = false) const {
    std::set<MachineId, NaturalLess> out;
    for (const auto& a : region) {
      auto it = actions.find(a);
      if (it == actions.end()) return std::nullopt;
      MachineId m = it->second.owner;
      out.insert(m);
      if (include_ancestors) {
        auto cur = machines.at(m).parent;
        while (cur) {
          out.insert(*cur);
          cur = machines.at(*cur).parent;
        }
      }
    }
    return out;
  }

 private:
  // Would from->to close a flow cycle on that thing? Flow graphs per thing
  // are forests of paths; a simple reverse walk suffices.
  bool flow_would_cycle(const std::string& from, const std::string& to) const {
    ThingId t = *node_thing(from);
    // DFS from `to` along existing flow arcs of this thing, looking for `from`.
    std::vector<std::string> stack{to};
    std::set<std::string> seen;
    while (!stack.empty()) {
      std::string cur = stack.back();
      stack.pop_back();
      if (cur == from) return true;
      if (!seen.insert(cur).second) continue;
      for (const auto& [id, f] : flows)
        if (f.from == cur && *node_thing(f.from) == t) stack.push_back(f.to);
    }
    return false;
  }
};

// Full-scan integrity check; mirrors what add_* enforce incrementally.
// Used by property tests and by deserializers as a final gate.
inline std::vector<ModelError> scan_integrity(const StaticModel& m) {
  std::vector<ModelError> errs;
  auto err = [&](ModelErrorCode c, std::string msg) { errs.push_back({c, std::move(msg)}); };

  for (const auto& [id, mach] : m.machines) {
    if (mach.parent) {
      if (m.machines.find(*mach.parent) == m.machines.end())
        err(ModelErrorCode::DanglingReference, id + " parent missing");
      else if (id != *mach.parent + "." + mach.name)
        err(ModelErrorCode::BadName, id + " is not parent-path + name");
    } else if (id != mach.name) {
      err(ModelErrorCode::BadName, id + " root id differs from name");
    }
  }
  for (const auto& [id, t] : m.things)
    if (m.machines.find(t.home) == m.machines.end())
      err(ModelErrorCode::DanglingReference, "thing " + id + " home missing");
  for (const auto& [id, a] : m.actions) {
    if (m.machines.find(a.owner) == m.machines.end())
      err(ModelErrorCode::DanglingReference, "action " + id + " owner missing");
    if (m.things.find(a.thing) == m.things.end())
      err(ModelErrorCode::DanglingReference, "action " + id + " thing missing");
  }
  for (const auto& [id, s] : m.storages) {
    if (m.machines.find(s.owner) == m.machines.end())
      err(ModelErrorCode::DanglingReference, "storage " + id + " owner missing");
    if (m.things.find(s.thing) == m.things.end())
      err(ModelErrorCode::DanglingReference, "storage " + id + " thing missing");
  }
  for (const auto& [id, f] : m.flows) {
    if (!m.has_node(f.from) || !m.has_node(f.to)) {
      err(ModelErrorCode::DanglingReference, "flow " + id + " endpoint missing");
      continue;
    }
    if (f.from == f.to) err(ModelErrorCode::SelfLoopArc, "flow " + id);
    if (*m.node_thing(f.from) != *m.node_thing(f.to))
      err(ModelErrorCode::CrossThingFlow, "flow " + id);
  }
  for (const auto& [id, t] : m.triggers) {
    if (m.actions.find(t.from) == m.actions.end() || m.actions.find(t.to) == m.actions.end())
      err(ModelErrorCode::DanglingReference, "trigger " + id + " endpoint missing");
    if (t.from == t.to) err(ModelErrorCode::SelfLoopArc, "trigger " + id);
  }

  // per-thing flow acyclicity, storages included as path nodes
  for (const auto& [tid, thing] : m.things) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [id, f] : m.flows)
      if (m.has_node(f.from) && m.node_thing(f.from) == tid) adj[f.from].push_back(f.to);
    std::map<std::string, int> state;  // 0 new, 1 open, 2 done
    std::vector<std::pair<std::string, std::size_t>> stack;
    for (const auto& [n, _] : adj) {
      if (state[n] != 0) continue;
      stack.push_back({n, 0});
      state[n] = 1;
      while (!stack.empty()) {
        auto& [cur, idx] = stack.back();
        auto& next = adj[cur];
        if (idx >= next.size()) {
          state[cur] = 2;
          stack.pop_back();
          continue;
        }
        std::string child = next[idx++];
        if (state[child] == 1) {
          err(ModelErrorCode::FlowCycle, "thing " + tid + " flows form a cycle at " + child);
          state[child] = 2;
        } else if (state[child] == 0) {
          state[child] = 1;
          stack.push_back({child, 0});
        }
      }
    }
  }
  return errs;
}

}  // namespace tml
