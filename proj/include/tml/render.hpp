#pragma once

#include <map>
#include <string>
#include <vector>

#include "tml/events.hpp"
#include "tml/model.hpp"
#include "tml/transform.hpp"

namespace tml {

// Graphviz-DOT emission for the three views. Output is a pure function of
// the model: collections iterate sorted, attributes are fixed, so the same
// input is byte-identical on every run and platform.

struct RenderOptions {
  enum class View { Static, Overlay, Behavior };
  View view = View::Static;
  bool show_labels = true;  // include the step annotations on action nodes
  bool simplified = false;  // contract boundary chains before drawing
  std::vector<std::string> palette = {"lightblue",  "lightyellow", "lightpink", "palegreen",
                                      "lavender",   "mistyrose",   "lightcyan", "wheat",
                                      "honeydew",   "thistle"};
};

namespace render_detail {

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string cluster_name(const MachineId& id) {
  std::string out = "cluster_";
  for (char c : id) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

inline void machine_cluster(const StaticModel& m, const MachineId& id, int depth,
                            const RenderOptions& opts,
                            const std::map<ActionId, std::string>& fill, std::string& out) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const Machine& mach = m.machines.at(id);
  out += pad + "subgraph " + cluster_name(id) + " {\n";
  out += pad + "  label=" + quote(mach.name) + ";\n";
  for (const auto& [aid, a] : m.actions) {
    if (a.owner != id) continue;
    std::string label = std::string(to_string(a.kind)) + ":" + a.thing;
    if (opts.show_labels && a.label) label += " (" + *a.label + ")";
    std::string attrs = "label=" + quote(label);
    if (auto it = fill.find(aid); it != fill.end())
      attrs += ", style=filled, fillcolor=" + quote(it->second);
    out += pad + "  " + quote(aid) + " [" + attrs + "];\n";
  }
  for (const auto& [sid, s] : m.storages) {
    if (s.owner != id) continue;
    out += pad + "  " + quote(sid) + " [label=" + quote(s.name + ":" + s.thing) +
           ", shape=cylinder];\n";
  }
  for (const auto& child : mach.children) machine_cluster(m, child, depth + 1, opts, fill, out);
  out += pad + "}\n";
}

inline std::string static_view(const StaticModel& m, const RenderOptions& opts,
                               const std::map<ActionId, std::string>& fill) {
  std::string out = "digraph " + m.name + " {\n";
  out += "  graph [compound=true, rankdir=LR];\n";
  out += "  node [shape=box, fontsize=10];\n";
  for (const auto& [id, mach] : m.machines)
    if (!mach.parent) machine_cluster(m, id, 1, opts, fill, out);
  for (const auto& [id, f] : m.flows) out += "  " + quote(f.from) + " -> " + quote(f.to) + ";\n";
  for (const auto& [id, t] : m.triggers) {
    std::string attrs = "style=dashed";
    if (t.guard) attrs += ", label=" + quote("[" + t.guard->key + "=" + t.guard->value + "]");
    out += "  " + quote(t.from) + " -> " + quote(t.to) + " [" + attrs + "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace render_detail

inline std::string render_static(const StaticModel& model, const RenderOptions& opts = {}) {
  if (opts.simplified && !model.simplified) {
    auto s = simplify(model);
    if (s.ok()) return render_detail::static_view(*s.value, opts, {});
  }
  return render_detail::static_view(model, opts, {});
}

// Static view plus one palette colour per event region and a legend row per
// event. Uncovered nodes stay unfilled.
inline std::string render_overlay(const StaticModel& model, const EventOverlay& overlay,
                                  const RenderOptions& opts = {}) {
  std::map<ActionId, std::string> fill;
  std::size_t i = 0;
  for (const auto& [id, ev] : overlay.events) {
    const std::string& color = opts.palette[i++ % opts.palette.size()];
    for (const auto& a : ev.region) fill.emplace(a, color);
  }
  std::string out = render_detail::static_view(model, opts, fill);
  if (overlay.events.empty()) return out;
  // splice a legend cluster in front of the closing brace
  std::string legend = "  subgraph cluster_legend {\n    label=\"events\";\n";
  i = 0;
  for (const auto& [id, ev] : overlay.events) {
    const std::string& color = opts.palette[i++ % opts.palette.size()];
    legend += "    " + render_detail::quote("legend_" + id) + " [label=" +
              render_detail::quote(id + ": " + ev.description) +
              ", shape=plaintext, style=filled, fillcolor=" + render_detail::quote(color) +
              "];\n";
  }
  legend += "  }\n";
  out.insert(out.size() - 2, legend);
  return out;
}

inline std::string render_behavior(const BehaviorGraph& g, const RenderOptions& opts = {}) {
  (void)opts;
  std::string out = "digraph behavior {\n";
  out += "  node [shape=ellipse, fontsize=10];\n";
  for (const auto& n : g.nodes) out += "  " + render_detail::quote(n) + ";\n";
  for (const auto& e : g.edges) {
    out += "  " + render_detail::quote(e.from) + " -> " + render_detail::quote(e.to);
    if (e.guard)
      out += " [label=" + render_detail::quote("[" + e.guard->key + "=" + e.guard->value + "]") + "]";
    out += ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace tml
