// Copyright 2026 The cobhint Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cobhint/flow.hpp"

namespace cobhint {

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::perform: return "perform";
    case EdgeKind::perform_thru: return "perform_thru";
    case EdgeKind::go_to: return "go_to";
    case EdgeKind::fall_through: return "fall_through";
  }
  return "fall_through";
}

int paragraph_index(const ProgramModel& m, std::string_view name) {
  for (int i = 0; i < static_cast<int>(m.paragraphs.size()); ++i) {
    if (m.paragraphs[i].name == name) return i;
  }
  return -1;
}

namespace {

// Last paragraph belonging to the section that starts at `first`.
int section_end(const ProgramModel& m, int first) {
  int last = first;
  for (int i = first + 1; i < static_cast<int>(m.paragraphs.size()); ++i) {
    if (m.paragraphs[i].is_section) break;
    last = i;
  }
  return last;
}

}  // namespace

std::pair<int, int> perform_range(const ProgramModel& m, const Statement& s) {
  if (s.kind != StatementKind::perform || s.perform.is_inline) return {-1, -1};
  const int first = paragraph_index(m, s.perform.target);
  if (first < 0) return {-1, -1};
  int last = first;
  if (m.paragraphs[first].is_section) last = section_end(m, first);
  if (!s.perform.thru.empty()) {
    const int thru = paragraph_index(m, s.perform.thru);
    if (thru < 0) return {-1, -1};
    last = m.paragraphs[thru].is_section ? section_end(m, thru) : thru;
  }
  if (last < first) return {-1, -1};
  return {first, last};
}

bool ends_without_fall_through(const ProgramModel& m, int paragraph) {
  const Paragraph& p = m.paragraphs[paragraph];
  for (auto it = p.statements.rbegin(); it != p.statements.rend(); ++it) {
    const Statement& s = m.statements[*it];
    if (s.parent >= 0 || s.condition_guard) continue;
    return s.kind == StatementKind::go_to || s.kind == StatementKind::stop_run ||
           s.kind == StatementKind::goback;
  }
  return false;
}

FlowGraph build_flow_graph(const ProgramModel& m) {
  FlowGraph g;
  for (const Paragraph& p : m.paragraphs) g.nodes.push_back(p.name);
  if (!m.paragraphs.empty()) g.entry = 0;

  auto add = [&](FlowEdge e) {
    (e.from < 0 ? g.entry_edges : g.edges).push_back(e);
  };
  for (int k = 0; k < static_cast<int>(m.statements.size()); ++k) {
    const Statement& s = m.statements[k];
    if (s.kind == StatementKind::perform && !s.perform.is_inline) {
      const auto [first, last] = perform_range(m, s);
      if (first < 0) {
        g.dangling.push_back({s.span.start_line,
                              "PERFORM target " + s.perform.target +
                                  (s.perform.thru.empty()
                                       ? ""
                                       : " THRU " + s.perform.thru) +
                                  " is not a paragraph"});
        continue;
      }
      const bool thru = !s.perform.thru.empty();
      add({s.paragraph, first,
           thru ? EdgeKind::perform_thru : EdgeKind::perform,
           thru ? last : -1, k});
    } else if (s.kind == StatementKind::go_to) {
      for (const std::string& target : s.goto_targets) {
        const int to = paragraph_index(m, target);
        if (to < 0) {
          g.dangling.push_back(
              {s.span.start_line, "GO TO target " + target + " is not a paragraph"});
          continue;
        }
        add({s.paragraph, to, EdgeKind::go_to, -1, k});
      }
    }
  }
  for (int i = 0; i + 1 < static_cast<int>(m.paragraphs.size()); ++i) {
    if (!ends_without_fall_through(m, i)) {
      g.edges.push_back({i, i + 1, EdgeKind::fall_through, -1, -1});
    }
  }
  return g;
}

}  // namespace cobhint
