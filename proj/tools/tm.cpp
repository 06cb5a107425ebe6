// tm: command-line front end for the TM model toolchain.
//
// Subcommands: check, simplify, elaborate, events, behavior, simulate,
// import-sd, render. Artifacts go to stdout (or -o FILE), diagnostics to
// stderr. Exit codes: 0 success, 1 validation or behavior-check failure,
// 2 usage or parse error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tml/behavior.hpp"
#include "tml/dsl.hpp"
#include "tml/events.hpp"
#include "tml/json_io.hpp"
#include "tml/render.hpp"
#include "tml/sd_import.hpp"
#include "tml/simulate.hpp"
#include "tml/transform.hpp"
#include "tml/validate.hpp"

namespace {

bool use_color() {
  const char* v = std::getenv("TM_COLOR");
  return v != nullptr && std::string(v) == "1";
}

std::string paint(const std::string& text, const char* code) {
  if (!use_color()) return text;
  return std::string("\033[") + code + "m" + text + "\033[0m";
}

void print_diagnostics(const std::vector<tml::Diagnostic>& diags) {
  for (const auto& d : diags) {
    std::string line = tml::format(d);
    std::cerr << (d.severity == tml::Severity::Error ? paint(line, "31") : paint(line, "33"))
              << "\n";
  }
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    std::cerr << paint("error: cannot open " + path, "31") << "\n";
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::optional<tml::StaticModel> load_model(const std::string& path) {
  auto text = read_file(path);
  if (!text) return std::nullopt;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    auto parsed = tml::from_json(*text);
    print_diagnostics(parsed.diagnostics);
    if (!parsed.ok()) return std::nullopt;
    return parsed.value;
  }
  auto parsed = tml::parse_model(*text, path);
  print_diagnostics(parsed.diagnostics);
  if (!parsed.ok()) return std::nullopt;
  return parsed.value;
}

std::optional<tml::EventOverlay> load_overlay(const std::string& path,
                                              const tml::StaticModel& model) {
  auto text = read_file(path);
  if (!text) return std::nullopt;
  auto parsed = tml::parse_overlay(*text, model, path);
  print_diagnostics(parsed.diagnostics);
  if (!parsed.ok()) return std::nullopt;
  return parsed.value;
}

int emit(const std::string& artifact, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << artifact;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out.good()) {
    std::cerr << paint("error: cannot write " + out_path, "31") << "\n";
    return 2;
  }
  out << artifact;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toolchain for TM models: validate, transform, animate, render"};
  app.require_subcommand(1);

  std::string model_path, overlay_path, scenario_path, sd_path, out_path, view = "static";
  bool as_json = false, declared = false, simplified = false, no_labels = false;

  auto* check = app.add_subcommand("check", "validate a model against the action grammar");
  check->add_option("model", model_path, "model file (.tm or .tm.json)")->required();
  check->add_flag("--json", as_json, "emit violations as JSON lines");

  auto* simplify_cmd = app.add_subcommand("simplify", "contract boundary chains");
  simplify_cmd->add_option("model", model_path)->required();
  simplify_cmd->add_option("-o,--output", out_path, "write result here instead of stdout");

  auto* elaborate_cmd = app.add_subcommand("elaborate", "expand boundary crossings");
  elaborate_cmd->add_option("model", model_path)->required();
  elaborate_cmd->add_option("-o,--output", out_path);

  auto* events_cmd = app.add_subcommand("events", "check an event overlay and report coverage");
  events_cmd->add_option("model", model_path)->required();
  events_cmd->add_option("overlay", overlay_path)->required();

  auto* behavior_cmd = app.add_subcommand("behavior", "infer the behavior graph");
  behavior_cmd->add_option("model", model_path)->required();
  behavior_cmd->add_option("overlay", overlay_path)->required();
  behavior_cmd->add_flag("--declared", declared, "diff the overlay's chronology against inference");
  behavior_cmd->add_option("-o,--output", out_path);

  auto* simulate_cmd = app.add_subcommand("simulate", "run a scenario over the behavior graph");
  simulate_cmd->add_option("model", model_path)->required();
  simulate_cmd->add_option("overlay", overlay_path)->required();
  simulate_cmd->add_option("scenario", scenario_path)->required();

  auto* import_cmd = app.add_subcommand("import-sd", "translate a sequence diagram to a model");
  import_cmd->add_option("diagram", sd_path)->required();
  import_cmd->add_option("-o,--output", out_path);

  auto* render_cmd = app.add_subcommand("render", "emit Graphviz DOT");
  render_cmd->add_option("model", model_path)->required();
  render_cmd->add_option("overlay", overlay_path, "overlay (required for overlay/behavior views)");
  render_cmd->add_option("--view", view, "static | overlay | behavior")
      ->check(CLI::IsMember({"static", "overlay", "behavior"}));
  render_cmd->add_flag("--simplified", simplified, "draw the simplified model");
  render_cmd->add_flag("--no-labels", no_labels, "omit step annotations");
  render_cmd->add_option("-o,--output", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (check->parsed()) {
    auto model = load_model(model_path);
    if (!model) return 2;
    auto report = tml::validate(*model);
    if (as_json) {
      std::cout << tml::report_to_jsonl(report);
    } else {
      for (const auto& v : report.violations)
        std::cout << v.code << " " << v.element << ": " << v.message << "\n";
      std::cout << (report.pass() ? paint("pass", "32") : paint("fail", "31")) << " ("
                << report.violations.size() << " violations)\n";
    }
    return report.pass() ? 0 : 1;
  }

  if (simplify_cmd->parsed() || elaborate_cmd->parsed()) {
    auto model = load_model(model_path);
    if (!model) return 2;
    auto out = simplify_cmd->parsed() ? tml::simplify(*model) : tml::elaborate(*model);
    print_diagnostics(out.diagnostics);
    if (!out.ok()) return 1;
    return emit(tml::print_model(*out.value), out_path);
  }

  if (events_cmd->parsed()) {
    auto model = load_model(model_path);
    if (!model) return 2;
    auto overlay = load_overlay(overlay_path, *model);
    if (!overlay) return 2;
    for (const auto& [id, ev] : overlay->events)
      std::cout << id << " \"" << ev.description << "\" (" << ev.region.size() << " actions)\n";
    auto coverage = tml::check_coverage(*overlay, *model);
    if (coverage.uncovered.empty()) {
      std::cout << "coverage: every dynamic action is inside a region\n";
    } else {
      std::cout << "coverage: " << coverage.uncovered.size() << " uncovered actions\n";
      for (const auto& a : coverage.uncovered) std::cout << "  " << a << "\n";
    }
    return 0;
  }

  if (behavior_cmd->parsed()) {
    auto model = load_model(model_path);
    if (!model) return 2;
    auto overlay = load_overlay(overlay_path, *model);
    if (!overlay) return 2;
    auto inferred = tml::infer_behavior(*model, *overlay);
    if (declared) {
      if (!overlay->declared) {
        std::cerr << paint("error: overlay has no chronology block", "31") << "\n";
        return 2;
      }
      auto diff = tml::check_behavior(*overlay->declared, inferred);
      std::cout << tml::format(diff);
      return diff.empty() ? 0 : 1;
    }
    return emit(tml::print_chronology(inferred), out_path);
  }

  if (simulate_cmd->parsed()) {
    auto model = load_model(model_path);
    if (!model) return 2;
    auto overlay = load_overlay(overlay_path, *model);
    if (!overlay) return 2;
    auto text = read_file(scenario_path);
    if (!text) return 2;
    auto scenario = tml::parse_scenario(*text, scenario_path);
    print_diagnostics(scenario.diagnostics);
    if (!scenario.ok()) return 2;
    auto behavior = tml::infer_behavior(*model, *overlay);
    auto sim = tml::simulate(*model, *overlay, behavior, *scenario.value);
    if (!sim.ok()) {
      std::cerr << paint(std::string("error [") + tml::to_string(sim.error->code) + "] " +
                             sim.error->message,
                         "31")
                << "\n";
      return 1;
    }
    std::cout << tml::trace_to_jsonl(*sim.trace);
    return 0;
  }

  if (import_cmd->parsed()) {
    auto text = read_file(sd_path);
    if (!text) return 2;
    auto doc = tml::parse_sd(*text, sd_path);
    print_diagnostics(doc.diagnostics);
    if (!doc.ok()) return 2;
    return emit(tml::print_model(tml::sd_to_tm(*doc.value)), out_path);
  }

  if (render_cmd->parsed()) {
    auto model = load_model(model_path);
    if (!model) return 2;
    tml::RenderOptions opts;
    opts.show_labels = !no_labels;
    opts.simplified = simplified;
    if (view == "static") return emit(tml::render_static(*model, opts), out_path);
    if (overlay_path.empty()) {
      std::cerr << paint("error: the " + view + " view needs an overlay file", "31") << "\n";
      return 2;
    }
    auto overlay = load_overlay(overlay_path, *model);
    if (!overlay) return 2;
    if (view == "overlay") return emit(tml::render_overlay(*model, *overlay, opts), out_path);
    return emit(tml::render_behavior(tml::infer_behavior(*model, *overlay), opts), out_path);
  }

  return 2;
}
