#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "tml/dsl.hpp"
#include "tml/model.hpp"

namespace test_helpers {

inline std::string corpus_path(const std::string& name) {
  return std::string(TML_CORPUS_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open ", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline tml::StaticModel load_model(const std::string& name) {
  auto parsed = tml::parse_model(read_file(corpus_path(name)), name);
  for (const auto& d : parsed.diagnostics) MESSAGE(tml::format(d));
  REQUIRE(parsed.ok());
  return *parsed.value;
}

// Random but always-valid models: per thing a legal lifecycle chain that may
// hop machines, plus a sprinkle of triggers and storages. Drives the
// round-trip and transform property tests.
inline tml::StaticModel random_model(unsigned seed) {
  std::mt19937 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  tml::StaticModel m;
  m.name = "gen" + std::to_string(seed);
  int machine_count = pick(1, 4);
  std::vector<tml::MachineId> machines;
  for (int i = 0; i < machine_count; ++i) {
    std::string name = "M" + std::to_string(i + 1);
    if (i > 0 && pick(0, 3) == 0) {
      tml::MachineId parent = machines[static_cast<std::size_t>(pick(0, i - 1))];
      m.add_machine(name, parent);
      machines.push_back(parent + "." + name);
    } else {
      m.add_machine(name, std::nullopt);
      machines.push_back(name);
    }
  }

  int thing_count = pick(1, 5);
  std::vector<std::pair<tml::ActionId, tml::ActionId>> process_ends;  // for triggers
  for (int t = 0; t < thing_count; ++t) {
    std::string thing = "T" + std::to_string(t + 1);
    tml::MachineId home = machines[static_cast<std::size_t>(pick(0, machine_count - 1))];
    m.add_thing(thing, home);

    std::string prefix = "t" + std::to_string(t + 1) + "_";
    tml::MachineId cur = home;
    int n = 0;
    auto act = [&](tml::ActionKind kind) {
      std::string local = prefix + "a" + std::to_string(++n);
      m.add_action(cur, local, kind, thing);
      return cur + "." + local;
    };

    tml::ActionId prev = act(tml::ActionKind::Create);
    tml::ActionId first = prev;
    int hops = pick(0, 2);
    int processes = pick(0, 2);
    for (int i = 0; i < processes; ++i) {
      tml::ActionId p = act(tml::ActionKind::Process);
      m.add_flow(prev, p);
      prev = p;
    }
    for (int h = 0; h < hops; ++h) {
      tml::MachineId next = machines[static_cast<std::size_t>(pick(0, machine_count - 1))];
      if (next == cur) continue;
      tml::ActionId rl = act(tml::ActionKind::Release);
      tml::ActionId out = act(tml::ActionKind::Transfer);
      m.add_flow(prev, rl);
      m.add_flow(rl, out);
      cur = next;
      tml::ActionId in = act(tml::ActionKind::Transfer);
      tml::ActionId rc = act(tml::ActionKind::Receive);
      m.add_flow(out, in);
      m.add_flow(in, rc);
      prev = rc;
      if (pick(0, 1) == 0) {
        tml::ActionId p = act(tml::ActionKind::Process);
        m.add_flow(prev, p);
        prev = p;
      }
    }
    if (pick(0, 3) == 0) {
      // park the thing in a storage and retrieve it
      tml::ActionId rl = act(tml::ActionKind::Release);
      m.add_flow(prev, rl);
      std::string store = prefix + "db";
      m.add_storage(cur, store, thing);
      m.add_flow(rl, cur + "." + store);
      tml::ActionId p = act(tml::ActionKind::Process);
      m.add_flow(cur + "." + store, p);
      prev = p;
    }
    if (prev == first) {
      // keep every create fed into something
      tml::ActionId p = act(tml::ActionKind::Process);
      m.add_flow(prev, p);
      prev = p;
    }
    process_ends.push_back({first, prev});
  }

  // a few triggers between chains; one per source keeps guards exclusive
  int trigger_count = pick(0, 3);
  std::set<tml::ActionId> used_sources;
  for (int i = 0; i < trigger_count && process_ends.size() >= 2; ++i) {
    std::size_t a = static_cast<std::size_t>(pick(0, static_cast<int>(process_ends.size()) - 1));
    std::size_t b = static_cast<std::size_t>(pick(0, static_cast<int>(process_ends.size()) - 1));
    if (a == b || !used_sources.insert(process_ends[a].second).second) continue;
    std::optional<tml::Guard> guard;
    if (pick(0, 1) == 0)
      guard = tml::Guard{"k" + std::to_string(pick(1, 2)), pick(0, 1) ? "yes" : "no"};
    m.add_trigger(process_ends[a].second, process_ends[b].first, guard);
  }
  return m;
}

}  // namespace test_helpers
