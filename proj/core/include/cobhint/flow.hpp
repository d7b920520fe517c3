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

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cobhint/model.hpp"

namespace cobhint {

enum class EdgeKind { perform, perform_thru, go_to, fall_through };

std::string_view to_string(EdgeKind kind);

struct FlowEdge {
  int from = -1;  // paragraph index; -1 for top-level code
  int to = -1;
  EdgeKind kind = EdgeKind::fall_through;
  int thru_end = -1;   // last paragraph of a PERFORM THRU range
  int statement = -1;  // originating statement, -1 for fall_through
};

struct FlowGraph {
  std::vector<std::string> nodes;  // paragraph names, by index
  std::vector<FlowEdge> edges;     // from >= 0
  std::vector<FlowEdge> entry_edges;  // edges leaving top-level code
  std::vector<ParseNote> dangling;
  int entry = -1;  // first paragraph, or -1 when there is none
};

FlowGraph build_flow_graph(const ProgramModel& model);

// Paragraph index named `name`, or -1. First declaration wins.
int paragraph_index(const ProgramModel& model, std::string_view name);

// Paragraph range [first, last] executed by a PERFORM, or {-1, -1} when the
// target is unknown. A SECTION target expands to the paragraphs it holds.
std::pair<int, int> perform_range(const ProgramModel& model,
                                  const Statement& perform);

// True when the paragraph's last unguarded top-level statement is GO TO,
// STOP RUN or GOBACK, so control never falls into the next paragraph.
bool ends_without_fall_through(const ProgramModel& model, int paragraph);

}  // namespace cobhint
