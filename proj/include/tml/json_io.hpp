#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tml/diag.hpp"
#include "tml/model.hpp"

namespace tml {

// .tm.json interchange. Keys are emitted sorted; optional fields (label,
// guard, parent, simplified) are omitted rather than nulled, so the encoding
// of a model is unique and diff-friendly.

inline std::string to_json(const StaticModel& m) {
  nlohmann::json j;
  j["name"] = m.name;
  if (m.simplified) j["simplified"] = true;
  j["machines"] = nlohmann::json::array();
  for (const auto& [id, mach] : m.machines) {
    nlohmann::json e{{"id", id}, {"name", mach.name}};
    if (mach.parent) e["parent"] = *mach.parent;
    j["machines"].push_back(e);
  }
  j["things"] = nlohmann::json::array();
  for (const auto& [id, t] : m.things)
    j["things"].push_back({{"home", t.home}, {"id", id}, {"name", t.name}});
  j["actions"] = nlohmann::json::array();
  for (const auto& [id, a] : m.actions) {
    nlohmann::json e{{"id", id}, {"kind", to_string(a.kind)}, {"owner", a.owner}, {"thing", a.thing}};
    if (a.label) e["label"] = *a.label;
    j["actions"].push_back(e);
  }
  j["flows"] = nlohmann::json::array();
  for (const auto& [id, f] : m.flows)
    j["flows"].push_back({{"from", f.from}, {"id", id}, {"to", f.to}});
  j["triggers"] = nlohmann::json::array();
  for (const auto& [id, t] : m.triggers) {
    nlohmann::json e{{"from", t.from}, {"id", id}, {"to", t.to}};
    if (t.guard) e["guard"] = {{"key", t.guard->key}, {"value", t.guard->value}};
    j["triggers"].push_back(e);
  }
  j["storages"] = nlohmann::json::array();
  for (const auto& [id, s] : m.storages)
    j["storages"].push_back({{"id", id}, {"name", s.name}, {"owner", s.owner}, {"thing", s.thing}});
  return j.dump();
}

namespace json_detail {

struct Decoder {
  std::vector<Diagnostic>& diags;

  void fail(const std::string& pointer, const std::string& what) {
    diags.push_back({Severity::Error, {"<json>", 1, 1}, "SchemaViolation", pointer + ": " + what});
  }

  bool str(const nlohmann::json& j, const std::string& ptr, const char* key, std::string& out,
           bool required = true) {
    if (!j.contains(key)) {
      if (required) fail(ptr + "/" + key, "missing required key");
      return false;
    }
    if (!j[key].is_string()) {
      fail(ptr + "/" + key, "expected string");
      return false;
    }
    out = j[key].get<std::string>();
    return true;
  }

  const nlohmann::json* arr(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) {
      fail(std::string("/") + key, "missing required key");
      return nullptr;
    }
    if (!j[key].is_array()) {
      fail(std::string("/") + key, "expected array");
      return nullptr;
    }
    return &j[key];
  }
};

}  // namespace json_detail

inline Parsed<StaticModel> from_json(std::string_view text) {
  Parsed<StaticModel> result;
  json_detail::Decoder dec{result.diagnostics};
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    dec.fail("", "input is not valid JSON");
    return result;
  }
  if (!j.is_object()) {
    dec.fail("", "expected top-level object");
    return result;
  }

  StaticModel m;
  if (!dec.str(j, "", "name", m.name)) return result;
  if (j.contains("simplified")) {
    if (!j["simplified"].is_boolean()) {
      dec.fail("/simplified", "expected boolean");
      return result;
    }
    m.simplified = j["simplified"].get<bool>();
  }

  auto apply = [&](const std::optional<ModelError>& e, const std::string& ptr) {
    if (e) dec.fail(ptr, std::string(to_string(e->code)) + ": " + e->message);
  };

  const auto* machines = dec.arr(j, "machines");
  const auto* things = dec.arr(j, "things");
  const auto* actions = dec.arr(j, "actions");
  const auto* flows = dec.arr(j, "flows");
  const auto* triggers = dec.arr(j, "triggers");
  const auto* storages = dec.arr(j, "storages");
  if (!machines || !things || !actions || !flows || !triggers || !storages) return result;

  // Parents must exist before children; sorted ids guarantee that order.
  struct MachineRow {
    std::string id, name;
    std::optional<std::string> parent;
    std::string ptr;
  };
  std::vector<MachineRow> rows;
  for (std::size_t i = 0; i < machines->size(); ++i) {
    std::string ptr = "/machines/" + std::to_string(i);
    const auto& e = (*machines)[i];
    if (!e.is_object()) {
      dec.fail(ptr, "expected object");
      return result;
    }
    MachineRow row;
    row.ptr = ptr;
    if (!dec.str(e, ptr, "id", row.id) || !dec.str(e, ptr, "name", row.name)) return result;
    if (e.contains("parent")) {
      std::string p;
      if (!dec.str(e, ptr, "parent", p)) return result;
      row.parent = p;
    }
    std::string derived = row.parent ? *row.parent + "." + row.name : row.name;
    if (derived != row.id) {
      dec.fail(ptr + "/id", "id does not match parent path + name");
      return result;
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(),
            [](const MachineRow& a, const MachineRow& b) { return NaturalLess{}(a.id, b.id); });
  for (const auto& row : rows) apply(m.add_machine(row.name, row.parent), row.ptr);

  for (std::size_t i = 0; i < things->size(); ++i) {
    std::string ptr = "/things/" + std::to_string(i);
    const auto& e = (*things)[i];
    std::string id, name, home;
    if (!dec.str(e, ptr, "id", id) || !dec.str(e, ptr, "name", name) ||
        !dec.str(e, ptr, "home", home))
      return result;
    if (id != name) {
      dec.fail(ptr + "/id", "thing ids are their names");
      return result;
    }
    apply(m.add_thing(name, home), ptr);
  }

  for (std::size_t i = 0; i < actions->size(); ++i) {
    std::string ptr = "/actions/" + std::to_string(i);
    const auto& e = (*actions)[i];
    std::string id, kind_word, owner, thing;
    if (!dec.str(e, ptr, "id", id) || !dec.str(e, ptr, "kind", kind_word) ||
        !dec.str(e, ptr, "owner", owner) || !dec.str(e, ptr, "thing", thing))
      return result;
    auto kind = action_kind_from(kind_word);
    if (!kind) {
      dec.fail(ptr + "/kind", "unknown action kind '" + kind_word + "'");
      return result;
    }
    std::optional<std::string> label;
    if (e.contains("label")) {
      std::string l;
      if (!dec.str(e, ptr, "label", l)) return result;
      label = l;
    }
    if (id.size() <= owner.size() + 1 || id.compare(0, owner.size(), owner) != 0 ||
        id[owner.size()] != '.') {
      dec.fail(ptr + "/id", "id does not match owner path + name");
      return result;
    }
    apply(m.add_action(owner, id.substr(owner.size() + 1), *kind, thing, label), ptr);
  }

  for (std::size_t i = 0; i < storages->size(); ++i) {
    std::string ptr = "/storages/" + std::to_string(i);
    const auto& e = (*storages)[i];
    std::string id, name, owner, thing;
    if (!dec.str(e, ptr, "id", id) || !dec.str(e, ptr, "name", name) ||
        !dec.str(e, ptr, "owner", owner) || !dec.str(e, ptr, "thing", thing))
      return result;
    if (id != owner + "." + name) {
      dec.fail(ptr + "/id", "id does not match owner path + name");
      return result;
    }
    apply(m.add_storage(owner, name, thing), ptr);
  }

  for (std::size_t i = 0; i < flows->size(); ++i) {
    std::string ptr = "/flows/" + std::to_string(i);
    const auto& e = (*flows)[i];
    std::string id, from, to;
    if (!dec.str(e, ptr, "id", id) || !dec.str(e, ptr, "from", from) ||
        !dec.str(e, ptr, "to", to))
      return result;
    if (id != flow_arc_id(from, to)) {
      dec.fail(ptr + "/id", "id does not match endpoints");
      return result;
    }
    apply(m.add_flow(from, to), ptr);
  }

  for (std::size_t i = 0; i < triggers->size(); ++i) {
    std::string ptr = "/triggers/" + std::to_string(i);
    const auto& e = (*triggers)[i];
    std::string id, from, to;
    if (!dec.str(e, ptr, "id", id) || !dec.str(e, ptr, "from", from) ||
        !dec.str(e, ptr, "to", to))
      return result;
    if (id != trigger_arc_id(from, to)) {
      dec.fail(ptr + "/id", "id does not match endpoints");
      return result;
    }
    std::optional<Guard> guard;
    if (e.contains("guard")) {
      if (!e["guard"].is_object()) {
        dec.fail(ptr + "/guard", "expected object");
        return result;
      }
      Guard g;
      if (!dec.str(e["guard"], ptr + "/guard", "key", g.key) ||
          !dec.str(e["guard"], ptr + "/guard", "value", g.value))
        return result;
      guard = g;
    }
    apply(m.add_trigger(from, to, guard), ptr);
  }

  if (has_errors(result.diagnostics)) return result;
  result.value = std::move(m);
  return result;
}

}  // namespace tml
