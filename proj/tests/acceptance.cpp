// Acceptance suite: runs every corpus- and property-level criterion the
// toolchain must meet and prints one PASS/FAIL line per criterion. Exit code
// is the number of failed criteria.

#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tml/behavior.hpp"
#include "tml/dot_check.hpp"
#include "tml/dsl.hpp"
#include "tml/events.hpp"
#include "tml/json_io.hpp"
#include "tml/render.hpp"
#include "tml/sd_import.hpp"
#include "tml/simulate.hpp"
#include "tml/transform.hpp"
#include "tml/validate.hpp"

using namespace tml;

namespace {

int failures = 0;

struct Criterion {
  std::string name;
  std::vector<std::string> problems;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  explicit Criterion(std::string n) : name(std::move(n)) {}

  void require(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }

  void finish(double budget_ms = 0.0) {
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          start)
                    .count();
    if (budget_ms > 0.0 && ms > budget_ms)
      problems.push_back("took " + std::to_string(ms) + " ms, budget " +
                         std::to_string(budget_ms));
    if (problems.empty()) {
      std::printf("PASS  %s (%.1f ms)\n", name.c_str(), ms);
    } else {
      ++failures;
      std::printf("FAIL  %s (%.1f ms)\n", name.c_str(), ms);
      for (const auto& p : problems) std::printf("      - %s\n", p.c_str());
    }
  }
};

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(TML_CORPUS_DIR) + "/" + name, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

StaticModel model_fixture(const std::string& name) {
  auto p = parse_model(slurp(name), name);
  if (!p.ok()) {
    std::fprintf(stderr, "fatal: cannot parse %s\n", name.c_str());
    std::exit(99);
  }
  return *p.value;
}

EventOverlay overlay_fixture(const std::string& name, const StaticModel& m) {
  auto p = parse_overlay(slurp(name), m, name);
  if (!p.ok()) {
    for (const auto& d : p.diagnostics) std::fprintf(stderr, "%s\n", format(d).c_str());
    std::exit(99);
  }
  return *p.value;
}

Scenario scenario_fixture(const std::string& name) {
  auto p = parse_scenario(slurp(name), name);
  if (!p.ok()) {
    std::fprintf(stderr, "fatal: cannot parse %s\n", name.c_str());
    std::exit(99);
  }
  return *p.value;
}

// shared across criteria
StaticModel atm, ordering;
EventOverlay atm_ev, ordering_ev;
BehaviorGraph atm_graph, ordering_graph;

int run_tool(const std::string& args) {
  std::string cmd = std::string(TML_TM_BIN) + " " + args + " >/dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string corpus_file(const std::string& name) {
  return std::string(TML_CORPUS_DIR) + "/" + name;
}

void criterion1_atm_corpus() {
  Criterion c("criterion 1: ATM corpus fidelity (23 events, full coverage)");
  c.require(validate(atm).pass(), "atm.tm must pass check with 0 errors");
  c.require(run_tool("check " + corpus_file("atm.tm")) == 0, "tm check atm.tm must exit 0");
  c.require(atm_ev.events.size() == 23,
            "atm.ev defines " + std::to_string(atm_ev.events.size()) + " events, wanted 23");
  for (int i = 1; i <= 23; ++i)
    c.require(atm_ev.events.count("E" + std::to_string(i)) == 1,
              "missing event E" + std::to_string(i));
  auto cov = check_coverage(atm_ev, atm);
  c.require(cov.uncovered.empty(),
            std::to_string(cov.uncovered.size()) + " dynamic actions uncovered");
  c.finish(1000.0);
}

void criterion2_ordering_corpus() {
  Criterion c("criterion 2: ordering corpus fidelity (20 events, retry edge)");
  c.require(validate(ordering).pass(), "ordering.tm must pass check with 0 errors");
  c.require(run_tool("check " + corpus_file("ordering.tm")) == 0,
            "tm check ordering.tm must exit 0");
  c.require(ordering_ev.events.size() == 20,
            "ordering.ev defines " + std::to_string(ordering_ev.events.size()) +
                " events, wanted 20");
  bool retry = false;
  for (const auto& e : ordering_graph.edges)
    if (e.from == "E8" && e.to == "E5") retry = true;
  c.require(retry, "inferred behavior lacks the E8 -> E5 retry edge");
  c.finish(1000.0);
}

void criterion3_behavioral_equivalence() {
  Criterion c("criterion 3: declared chronologies equal inference");
  c.require(run_tool("behavior --declared " + corpus_file("atm.tm") + " " +
                     corpus_file("atm.ev")) == 0,
            "tm behavior --declared must report an empty diff for atm");
  c.require(run_tool("behavior --declared " + corpus_file("ordering.tm") + " " +
                     corpus_file("ordering.ev")) == 0,
            "tm behavior --declared must report an empty diff for ordering");
  if (!atm_ev.declared) {
    c.require(false, "atm.ev has no chronology block");
  } else {
    auto diff = check_behavior(*atm_ev.declared, atm_graph);
    c.require(diff.empty(), "atm diff:\n" + format(diff));
  }
  if (!ordering_ev.declared) {
    c.require(false, "ordering.ev has no chronology block");
  } else {
    auto diff = check_behavior(*ordering_ev.declared, ordering_graph);
    c.require(diff.empty(), "ordering diff:\n" + format(diff));
  }
  c.finish();
}

void check_trace(Criterion& c, const StaticModel& m, const EventOverlay& ov,
                 const BehaviorGraph& g, const Scenario& sc, const Trace& trace) {
  auto problems = verify_trace_precedence(g, sc, trace);
  for (const auto& p : problems) c.require(false, "precedence: " + p);
  auto all = all_traces(g, sc);
  if (all.ok())
    c.require(trace_in(trace, *all.traces), "trace is not one of the enumerated extensions");
  (void)m;
  (void)ov;
}

void criterion4_simulations() {
  {
    Criterion c("criterion 4a: happy path fires 18 events ending in cash");
    auto sc = scenario_fixture("happy.scn");
    auto sim = simulate(atm, atm_ev, atm_graph, sc);
    c.require(sim.ok(), "simulation failed");
    if (sim.ok()) {
      c.require(sim.trace->terminal == Terminal::Completed, "terminal not completed");
      c.require(sim.trace->steps.size() == 18,
                std::to_string(sim.trace->steps.size()) + " events fired, wanted 18");
      c.require(!sim.trace->steps.empty() && sim.trace->steps.back().event == "E22",
                "run does not end at E22");
      check_trace(c, atm, atm_ev, atm_graph, sc, *sim.trace);
    }
    c.finish(1000.0);
  }
  {
    Criterion c("criterion 4b: invalid card fires exactly E1..E5");
    auto sc = scenario_fixture("card_invalid.scn");
    auto sim = simulate(atm, atm_ev, atm_graph, sc);
    c.require(sim.ok(), "simulation failed");
    if (sim.ok()) {
      std::vector<std::string> want{"E1", "E2", "E3", "E4", "E5"};
      c.require(sim.trace->event_sequence() == want, "fired set differs from E1..E5");
      c.require(sim.trace->terminal == Terminal::Completed, "terminal not completed");
      check_trace(c, atm, atm_ev, atm_graph, sc, *sim.trace);
    }
    c.finish(1000.0);
  }
  {
    Criterion c("criterion 4c: insufficient funds end at E23");
    auto sc = scenario_fixture("insufficient.scn");
    auto sim = simulate(atm, atm_ev, atm_graph, sc);
    c.require(sim.ok(), "simulation failed");
    if (sim.ok()) {
      c.require(!sim.trace->steps.empty() && sim.trace->steps.back().event == "E23",
                "run does not end at E23");
      c.require(sim.trace->terminal == Terminal::Completed, "terminal not completed");
      check_trace(c, atm, atm_ev, atm_graph, sc, *sim.trace);
    }
    c.finish(1000.0);
  }
  {
    Criterion c("criterion 4d: ordering retry fires E5 twice");
    auto sc = scenario_fixture("ordering_retry.scn");
    auto sim = simulate(ordering, ordering_ev, ordering_graph, sc);
    c.require(sim.ok(), "simulation failed");
    if (sim.ok()) {
      int e5 = 0, e8 = 0;
      for (const auto& s : sim.trace->steps) {
        if (s.event == "E5") ++e5;
        if (s.event == "E8") ++e8;
      }
      c.require(e5 == 2, "E5 fired " + std::to_string(e5) + " times, wanted 2");
      c.require(e8 == 1, "E8 fired " + std::to_string(e8) + " times, wanted 1");
      c.require(sim.trace->terminal == Terminal::Completed, "terminal not completed");
      check_trace(c, ordering, ordering_ev, ordering_graph, sc, *sim.trace);
    }
    c.finish(1000.0);
  }
}

// the generator from the unit helpers, duplicated without doctest machinery
StaticModel generated_model(unsigned seed) {
  std::mt19937 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  StaticModel m;
  m.name = "gen" + std::to_string(seed);
  int machine_count = pick(1, 4);
  std::vector<MachineId> machines;
  for (int i = 0; i < machine_count; ++i) {
    std::string name = "M" + std::to_string(i + 1);
    if (i > 0 && pick(0, 3) == 0) {
      MachineId parent = machines[static_cast<std::size_t>(pick(0, i - 1))];
      m.add_machine(name, parent);
      machines.push_back(parent + "." + name);
    } else {
      m.add_machine(name, std::nullopt);
      machines.push_back(name);
    }
  }
  int thing_count = pick(1, 5);
  std::vector<std::pair<ActionId, ActionId>> ends;
  for (int t = 0; t < thing_count; ++t) {
    std::string thing = "T" + std::to_string(t + 1);
    MachineId home = machines[static_cast<std::size_t>(pick(0, machine_count - 1))];
    m.add_thing(thing, home);
    std::string prefix = "t" + std::to_string(t + 1) + "_";
    MachineId cur = home;
    int n = 0;
    auto act = [&](ActionKind kind) {
      std::string local = prefix + "a" + std::to_string(++n);
      m.add_action(cur, local, kind, thing);
      return cur + "." + local;
    };
    ActionId prev = act(ActionKind::Create);
    ActionId first = prev;
    int hops = pick(0, 2);
    for (int i = 0, p = pick(0, 2); i < p; ++i) {
      ActionId x = act(ActionKind::Process);
      m.add_flow(prev, x);
      prev = x;
    }
    for (int h = 0; h < hops; ++h) {
      MachineId next = machines[static_cast<std::size_t>(pick(0, machine_count - 1))];
      if (next == cur) continue;
      ActionId rl = act(ActionKind::Release);
      ActionId out = act(ActionKind::Transfer);
      m.add_flow(prev, rl);
      m.add_flow(rl, out);
      cur = next;
      ActionId in = act(ActionKind::Transfer);
      ActionId rc = act(ActionKind::Receive);
      m.add_flow(out, in);
      m.add_flow(in, rc);
      prev = rc;
      if (pick(0, 1) == 0) {
        ActionId x = act(ActionKind::Process);
        m.add_flow(prev, x);
        prev = x;
      }
    }
    if (pick(0, 3) == 0) {
      ActionId rl = act(ActionKind::Release);
      m.add_flow(prev, rl);
      std::string store = prefix + "db";
      m.add_storage(cur, store, thing);
      m.add_flow(rl, cur + "." + store);
      ActionId x = act(ActionKind::Process);
      m.add_flow(cur + "." + store, x);
      prev = x;
    }
    if (prev == first) {
      ActionId x = act(ActionKind::Process);
      m.add_flow(prev, x);
      prev = x;
    }
    ends.push_back({first, prev});
  }
  int trigger_count = pick(0, 3);
  std::set<ActionId> used;
  for (int i = 0; i < trigger_count && ends.size() >= 2; ++i) {
    std::size_t a = static_cast<std::size_t>(pick(0, static_cast<int>(ends.size()) - 1));
    std::size_t b = static_cast<std::size_t>(pick(0, static_cast<int>(ends.size()) - 1));
    if (a == b || !used.insert(ends[a].second).second) continue;
    std::optional<Guard> guard;
    if (pick(0, 1) == 0) guard = Guard{"k" + std::to_string(pick(1, 2)), pick(0, 1) ? "yes" : "no"};
    m.add_trigger(ends[a].second, ends[b].first, guard);
  }
  return m;
}

void criterion5_transform_properties() {
  Criterion c("criterion 5: transform and round-trip properties over 1000 models");
  int checked = 0;
  for (unsigned seed = 0; seed < 1000; ++seed) {
    auto m = generated_model(seed);
    ++checked;

    auto reparsed = parse_model(print_model(m));
    if (!reparsed.ok() || !(*reparsed.value == m)) {
      c.require(false, "parse(print(m)) != m at seed " + std::to_string(seed));
      break;
    }
    auto rejson = from_json(to_json(m));
    if (!rejson.ok() || !(*rejson.value == m)) {
      c.require(false, "from_json(to_json(m)) != m at seed " + std::to_string(seed));
      break;
    }
    if (!validate(m).pass()) {
      c.require(false, "generator produced an invalid model at seed " + std::to_string(seed));
      break;
    }
    // validator is order-insensitive: a reparse built the collections in a
    // different insertion order, so reports must agree
    if (!validate(*reparsed.value).pass()) {
      c.require(false, "validator differs across construction orders at seed " +
                           std::to_string(seed));
      break;
    }

    auto once = simplify(m);
    if (!once.ok()) {
      c.require(false, "simplify failed at seed " + std::to_string(seed));
      break;
    }
    auto twice = simplify(*once.value);
    if (!twice.ok() || !(*twice.value == *once.value)) {
      c.require(false, "simplify not idempotent at seed " + std::to_string(seed));
      break;
    }
    auto back = elaborate(*once.value);
    if (!back.ok() || !closures_agree_on_common(m, *back.value)) {
      c.require(false, "reachability closure broken at seed " + std::to_string(seed));
      break;
    }
  }
  c.require(checked == 1000, "expected 1000 generated models");
  // the same pair of properties on the corpus models
  for (const StaticModel* m : {&atm, &ordering}) {
    auto once = simplify(*m);
    c.require(once.ok(), "corpus simplify failed");
    if (once.ok()) {
      auto twice = simplify(*once.value);
      c.require(twice.ok() && *twice.value == *once.value, "corpus simplify not idempotent");
      auto back = elaborate(*once.value);
      c.require(back.ok() && closures_agree_on_common(*m, *back.value),
                "corpus reachability closure broken");
    }
  }
  c.finish();
}

void criterion6_sd_import() {
  Criterion c("criterion 6: sequence-diagram import");
  {
    auto p = parse_sd("sd one\nparticipant A\nparticipant B\nA -> B : only message\n");
    c.require(p.ok(), "one-message diagram failed to parse");
    if (p.ok()) {
      auto m = sd_to_tm(*p.value);
      c.require(m.actions.size() == 6, "one message must yield 6 actions");
      c.require(m.flows.size() == 5, "one message must yield 5 flows");
      c.require(validate(m).pass(), "one-message import fails check");
    }
  }
  for (int n = 2; n <= 8; ++n) {
    std::string text = "sd lin\nparticipant A\nparticipant B\n";
    for (int i = 0; i < n; ++i)
      text += (i % 2 == 0 ? "A -> B : step " : "B -> A : step ") + std::to_string(i) + "\n";
    auto p = parse_sd(text);
    c.require(p.ok(), "linear diagram failed to parse");
    if (!p.ok()) continue;
    auto m = sd_to_tm(*p.value);
    c.require(m.actions.size() == static_cast<std::size_t>(6 * n),
              "linear n=" + std::to_string(n) + ": wrong action count");
    c.require(m.triggers.size() == static_cast<std::size_t>(n - 1),
              "linear n=" + std::to_string(n) + ": wrong trigger count");
    c.require(validate(m).pass(), "linear n=" + std::to_string(n) + " fails check");
  }
  {
    auto p = parse_sd(slurp("withdraw.sd"), "withdraw.sd");
    c.require(p.ok(), "withdraw.sd failed to parse");
    if (p.ok()) {
      auto imp = sd_import(*p.value);
      c.require(validate(imp.model).pass(), "withdraw import fails check");
      int guarded = 0;
      for (const auto& [id, t] : imp.model.triggers)
        if (t.guard) ++guarded;
      c.require(guarded == 2, "alt must import as two guarded triggers");

      auto ov = overlay_for_import(imp);
      auto g = infer_behavior(imp.model, ov);
      Scenario a;
      a.name = "a";
      a.bindings = {{"alt1", {"valid"}}};
      Scenario b = a;
      b.bindings = {{"alt1", {"invalid"}}};
      auto sa = simulate(imp.model, ov, g, a);
      auto sb = simulate(imp.model, ov, g, b);
      c.require(sa.ok() && sb.ok(), "branch simulations failed");
      if (sa.ok() && sb.ok()) {
        c.require(sa.trace->event_sequence() == std::vector<std::string>{"M1", "M2", "M3", "M4"},
                  "valid branch replays the wrong events");
        c.require(sb.trace->event_sequence() == std::vector<std::string>{"M1", "M2", "M5", "M6"},
                  "invalid branch replays the wrong events");
      }
    }
  }
  c.finish();
}

void criterion7_render_determinism() {
  Criterion c("criterion 7: render determinism and DOT validity");
  auto views = [&](const StaticModel& m, const EventOverlay& ov, const BehaviorGraph& g) {
    return std::vector<std::string>{render_static(m), render_overlay(m, ov), render_behavior(g)};
  };
  auto a1 = views(atm, atm_ev, atm_graph);
  auto a2 = views(atm, atm_ev, atm_graph);
  auto o1 = views(ordering, ordering_ev, ordering_graph);
  auto o2 = views(ordering, ordering_ev, ordering_graph);
  c.require(a1 == a2, "atm views differ across runs");
  c.require(o1 == o2, "ordering views differ across runs");
  for (const auto& dot : a1) {
    std::string why;
    c.require(dot_parses(dot, &why), "atm view rejected by DOT checker: " + why);
  }
  for (const auto& dot : o1) {
    std::string why;
    c.require(dot_parses(dot, &why), "ordering view rejected by DOT checker: " + why);
  }
  c.finish();
}

}  // namespace

int main() {
  atm = model_fixture("atm.tm");
  ordering = model_fixture("ordering.tm");
  atm_ev = overlay_fixture("atm.ev", atm);
  ordering_ev = overlay_fixture("ordering.ev", ordering);
  atm_graph = infer_behavior(atm, atm_ev);
  ordering_graph = infer_behavior(ordering, ordering_ev);

  criterion1_atm_corpus();
  criterion2_ordering_corpus();
  criterion3_behavioral_equivalence();
  criterion4_simulations();
  criterion5_transform_properties();
  criterion6_sd_import();
  criterion7_render_determinism();

  if (failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d criteria failed\n", failures);
  return failures;
}
