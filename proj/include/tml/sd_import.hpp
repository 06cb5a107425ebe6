#pragma once

#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tml/diag.hpp"
#include "tml/events.hpp"
#include "tml/model.hpp"

namespace tml {

// Minimal sequence-diagram notation:
//
//   sd NAME
//   participant NAME
//   A -> B : message label
//   alt [label]
//     ...
//   else [label]
//     ...
//   end
//
// loop/par/critical/opt fragments are rejected with a diagnostic; the
// importer never emits a model that silently drops their meaning.

struct SdMessage {
  std::string from, to, label;
  SourceSpan span;
};

struct SdAlt;

struct SdElement {
  std::optional<SdMessage> message;
  std::vector<SdAlt> alt;  // empty or a single block
};

struct SdBranch {
  std::string label;
  std::vector<SdElement> elements;
};

struct SdAlt {
  std::vector<SdBranch> branches;
  SourceSpan span;
};

struct SdDoc {
  std::string name;
  std::vector<std::string> participants;
  std::vector<SdElement> elements;
};

namespace sd_detail {

inline std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline bool is_ident(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

inline std::string slug(std::string_view text) {
  std::string out;
  bool gap = false;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      if (gap && !out.empty()) out.push_back('_');
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      gap = false;
    } else {
      gap = true;
    }
  }
  if (out.empty()) out = "x";
  if (std::isdigit(static_cast<unsigned char>(out[0]))) out.insert(out.begin(), 'm');
  return out;
}

struct Line {
  std::string text;
  int number;
};

}  // namespace sd_detail

inline Parsed<SdDoc> parse_sd(std::string_view text, std::string file = "<input>") {
  Parsed<SdDoc> result;
  auto fail = [&](int line, const std::string& msg, const char* code = "SyntaxError") {
    result.diagnostics.push_back({Severity::Error, {file, line, 1}, code, msg});
  };

  std::vector<sd_detail::Line> lines;
  {
    int n = 1;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == '\n') {
        std::string raw(text.substr(start, i - start));
        if (auto c = raw.find("//"); c != std::string::npos) raw = raw.substr(0, c);
        std::string t = sd_detail::trim(raw);
        if (!t.empty()) lines.push_back({t, n});
        start = i + 1;
        ++n;
      }
    }
  }

  if (lines.empty() || lines[0].text.rfind("sd ", 0) != 0) {
    fail(1, "expected 'sd <name>' header");
    return result;
  }
  SdDoc doc;
  doc.name = sd_detail::trim(lines[0].text.substr(3));
  if (!sd_detail::is_ident(doc.name)) {
    fail(lines[0].number, "diagram name must be an identifier");
    return result;
  }

  std::set<std::string> participants;
  std::size_t pos = 1;

  auto bracket_label = [&](const std::string& rest, int line) -> std::optional<std::string> {
    std::string t = sd_detail::trim(rest);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
      fail(line, "expected a [label]");
      return std::nullopt;
    }
    std::string inner = sd_detail::trim(std::string_view(t).substr(1, t.size() - 2));
    if (inner.empty()) {
      fail(line, "branch label must not be empty");
      return std::nullopt;
    }
    return inner;
  };

  // parses elements until a terminator ("else"/"end" when inside an alt)
  std::function<bool(std::vector<SdElement>&, int)> block = [&](std::vector<SdElement>& out,
                                                                int depth) -> bool {
    while (pos < lines.size()) {
      const auto& [t, num] = lines[pos];
      if (t == "end" || t.rfind("else", 0) == 0) {
        if (depth == 0) {
          fail(num, "'" + t + "' outside alt");
          return false;
        }
        return true;  // caller consumes the terminator
      }
      if (t.rfind("participant ", 0) == 0) {
        if (depth > 0) {
          fail(num, "participants must be declared at top level");
          return false;
        }
        std::string name = sd_detail::trim(t.substr(12));
        if (!sd_detail::is_ident(name)) {
          fail(num, "participant name must be an identifier");
          return false;
        }
        if (!participants.insert(name).second) {
          fail(num, "duplicate participant " + name, "DuplicateId");
          return false;
        }
        doc.participants.push_back(name);
        ++pos;
        continue;
      }
      if (t.rfind("alt", 0) == 0 && (t.size() == 3 || t[3] == ' ' || t[3] == '[')) {
        if (depth >= 4) {
          fail(num, "alternatives nest deeper than 4");
          return false;
        }
        auto label = bracket_label(t.substr(3), num);
        if (!label) return false;
        SdAlt alt;
        alt.span = {file, num, 1};
        ++pos;
        for (;;) {
          SdBranch branch;
          branch.label = *label;
          if (!block(branch.elements, depth + 1)) return false;
          if (branch.elements.empty()) {
            fail(lines[pos < lines.size() ? pos : lines.size() - 1].number,
                 "alt branch must contain at least one interaction");
            return false;
          }
          alt.branches.push_back(std::move(branch));
          if (pos >= lines.size()) {
            fail(lines.back().number, "alt without matching end");
            return false;
          }
          if (lines[pos].text == "end") {
            ++pos;
            break;
          }
          label = bracket_label(lines[pos].text.substr(4), lines[pos].number);
          if (!label) return false;
          ++pos;
        }
        SdElement e;
        e.alt.push_back(std::move(alt));
        out.push_back(std::move(e));
        continue;
      }
      for (const char* fragment : {"loop", "par", "critical", "opt", "break"}) {
        std::string f(fragment);
        if (t.rfind(f, 0) == 0 && (t.size() == f.size() || t[f.size()] == ' ' || t[f.size()] == '[')) {
          fail(num, "'" + f + "' fragments are not importable without losing meaning",
               "UnsupportedFragment");
          return false;
        }
      }
      auto arrow = t.find("->");
      if (arrow == std::string::npos) {
        fail(num, "expected a message, participant, or fragment");
        return false;
      }
      auto colon = t.find(':', arrow + 2);
      if (colon == std::string::npos) {
        fail(num, "message needs a ': label'");
        return false;
      }
      SdMessage msg;
      msg.from = sd_detail::trim(std::string_view(t).substr(0, arrow));
      msg.to = sd_detail::trim(std::string_view(t).substr(arrow + 2, colon - arrow - 2));
      msg.label = sd_detail::trim(std::string_view(t).substr(colon + 1));
      msg.span = {file, num, 1};
      if (participants.count(msg.from) == 0) {
        fail(num, "unknown participant " + msg.from, "UnknownParticipant");
        return false;
      }
      if (participants.count(msg.to) == 0) {
        fail(num, "unknown participant " + msg.to, "UnknownParticipant");
        return false;
      }
      if (msg.from == msg.to) {
        fail(num, "self-messages do not cross a machine boundary and are not imported",
             "UnsupportedFragment");
        return false;
      }
      if (msg.label.empty()) {
        fail(num, "message label must not be empty");
        return false;
      }
      SdElement e;
      e.message = std::move(msg);
      out.push_back(std::move(e));
      ++pos;
    }
    if (depth > 0) {
      fail(lines.back().number, "alt without matching end");
      return false;
    }
    return true;
  };

  if (!block(doc.elements, 0)) return result;
  result.value = std::move(doc);
  return result;
}

// ---------------------------------------------------------------------------
// Import: message m from A to B becomes its own thing plus the full action
// chain create(A) -> release(A) -> transfer(A) -> transfer(B) -> receive(B)
// -> process(B); chronology is carried by triggers from each preceding
// process to the next create, guarded per alt branch.

struct ImportedMessage {
  int index = 0;
  std::string thing;
  std::string from, to;
  ActionId create, process;
  std::vector<ActionId> chain;  // all six actions in flow order
};

struct SdImport {
  StaticModel model;
  std::vector<ImportedMessage> messages;
};

inline SdImport sd_import(const SdDoc& doc) {
  SdImport imp;
  StaticModel& m = imp.model;
  m.name = doc.name;
  for (const auto& p : doc.participants) m.add_machine(p, std::nullopt);

  std::set<std::string> taken_things;
  auto unique_thing = [&](const std::string& base) {
    std::string name = base;
    int n = 1;
    while (taken_things.count(name) > 0) name = base + "_" + std::to_string(++n);
    taken_things.insert(name);
    return name;
  };

  int counter = 0;
  int alt_counter = 0;

  using Entry = std::vector<std::pair<ActionId, std::optional<Guard>>>;

  std::function<Entry(const std::vector<SdElement>&, Entry)> emit =
      [&](const std::vector<SdElement>& elements, Entry entry) -> Entry {
    for (const auto& el : elements) {
      if (el.message) {
        const SdMessage& msg = *el.message;
        int n = ++counter;
        std::string thing = unique_thing(sd_detail::slug(msg.label));
        m.add_thing(thing, msg.from);
        std::string base = "m" + std::to_string(n);
        ImportedMessage rec;
        rec.index = n;
        rec.thing = thing;
        rec.from = msg.from;
        rec.to = msg.to;
        m.add_action(msg.from, base + "_cr", ActionKind::Create, thing);
        m.add_action(msg.from, base + "_rl", ActionKind::Release, thing);
        m.add_action(msg.from, base + "_to", ActionKind::Transfer, thing);
        m.add_action(msg.to, base + "_ti", ActionKind::Transfer, thing);
        m.add_action(msg.to, base + "_rc", ActionKind::Receive, thing);
        m.add_action(msg.to, base + "_pr", ActionKind::Process, thing);
        rec.create = msg.from + "." + base + "_cr";
        rec.process = msg.to + "." + base + "_pr";
        rec.chain = {rec.create,
                     msg.from + "." + base + "_rl",
                     msg.from + "." + base + "_to",
                     msg.to + "." + base + "_ti",
                     msg.to + "." + base + "_rc",
                     rec.process};
        for (std::size_t i = 0; i + 1 < rec.chain.size(); ++i)
          m.add_flow(rec.chain[i], rec.chain[i + 1]);
        for (const auto& [src, guard] : entry) m.add_trigger(src, rec.create, guard);
        imp.messages.push_back(rec);
        entry = {{rec.process, std::nullopt}};
      } else if (!el.alt.empty()) {
        const SdAlt& alt = el.alt.front();
        std::string key = "alt" + std::to_string(++alt_counter);
        Entry exits;
        std::set<std::string> used_values;
        for (const auto& branch : alt.branches) {
          std::string value = sd_detail::slug(branch.label);
          int n = 1;
          while (used_values.count(value) > 0)
            value = sd_detail::slug(branch.label) + "_" + std::to_string(++n);
          used_values.insert(value);
          Entry branch_entry;
          for (const auto& [src, guard] : entry) {
            (void)guard;  // a message always precedes a nested alt, so no guard stacks here
            branch_entry.push_back({src, Guard{key, value}});
          }
          Entry branch_exits = emit(branch.elements, std::move(branch_entry));
          exits.insert(exits.end(), branch_exits.begin(), branch_exits.end());
        }
        entry = std::move(exits);
      }
    }
    return entry;
  };

  emit(doc.elements, {});
  return imp;
}

inline StaticModel sd_to_tm(const SdDoc& doc) { return sd_import(doc).model; }

// One event per message, spanning its whole chain; lets imported diagrams
// run through behavior inference and the simulator directly.
inline EventOverlay overlay_for_import(const SdImport& imp) {
  EventOverlay ov;
  ov.model_name = imp.model.name;
  for (const auto& msg : imp.messages) {
    EventDef ev;
    ev.id = "M" + std::to_string(msg.index);
    ev.description = msg.thing;
    ev.region.insert(msg.chain.begin(), msg.chain.end());
    ov.events.emplace(ev.id, std::move(ev));
  }
  return ov;
}

}  // namespace tml
