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

#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cobhint/flow.hpp"
#include "cobhint/model.hpp"
#include "cobhint/symbols.hpp"

namespace cobhint {

struct TraceEvent {
  int statement = -1;
  bool guarded = false;  // reached only under a condition
};

// Linear walk from the entry point: PERFORM ranges are expanded in place,
// unguarded GO TO jumps, guarded GO TO visits its target as a conditional
// branch, and an unguarded STOP RUN or GOBACK ends the walk.
struct Trace {
  std::vector<TraceEvent> events;
  std::vector<bool> visited;  // per paragraph
  bool reached_terminator = false;
  bool truncated = false;  // event budget exhausted
};

Trace execution_trace(const ProgramModel& model);

// Paragraphs entered from the entry by fall-through or GO TO alone, without
// passing through a PERFORM.
std::vector<bool> sequential_set(const ProgramModel& model);

enum class Lookahead { found, conflict, missing };

class Analysis {
 public:
  Analysis(const ProgramModel& model, const SymbolTable& symbols,
           const FlowGraph& flow);

  const ProgramModel& model;
  const SymbolTable& symbols;
  const FlowGraph& flow;

  const Trace& trace() const { return trace_; }

  // ---- data items -------------------------------------------------------
  int item(std::string_view name) const { return symbols.find_data(name); }
  bool is_group(int item) const;
  bool is_numeric(int item) const;
  // Display length of a PIC X/A item, or -1.
  int alphanumeric_length(int item) const;
  std::vector<int> descendants(int item) const;  // excluding 88 levels
  std::vector<int> ancestors(int item) const;
  // Resolves an 88-level name to its conditional variable.
  std::string base_name(std::string_view name) const;

  // ---- statements -------------------------------------------------------
  std::vector<std::string> assigned_items(const Statement& s) const;
  std::vector<std::string> arithmetic_reads(const Statement& s) const;
  // Items read by the statement (sources, conditions, operands).
  std::vector<std::string> read_items(const Statement& s) const;
  // MOVE sources and WRITE ... FROM operands.
  std::vector<std::string> moved_sources(const Statement& s) const;

  bool is_file_op(const Statement& s) const;
  std::vector<std::string> files_of(const Statement& s) const;
  // (mode, file) pairs of an OPEN statement.
  std::vector<std::pair<std::string, std::string>> open_modes(
      const Statement& s) const;

  const CallSite* call_site(int statement) const;
  bool is_dli_call(const Statement& s) const;
  std::string dli_function(const CallSite& call) const;

  std::set<std::string> file_status_names(const FileEntry& file) const;
  std::set<std::string> pcb_status_names(std::string_view pcb) const;
  int pcb_status_item(std::string_view pcb) const;
  bool condition_references(const Statement& s,
                            const std::set<std::string>& names) const;

  std::vector<int> range_statements(int first, int last) const;
  // Statements executed by one iteration of a looping PERFORM, including
  // the paragraphs it performs transitively.
  std::vector<int> loop_body(int perform_statement) const;
  // Statements nested inside `statement` (phrases, branches, inline body).
  bool is_descendant(int statement, int ancestor) const;

  using Pred = std::function<bool(int)>;
  // Follows every successor of `statement` up to `hops` paragraph
  // transitions; `found` only when each path meets `check` before
  // `conflict`.
  Lookahead lookahead(int statement, const Pred& check, const Pred& conflict,
                      int hops = 3) const;

 private:
  enum class Scan { found, conflict, missing, none };
  // `origin` >= 0 skips statements in branches the origin excludes.
  Scan scan_list(const std::vector<int>& list, std::size_t from, int para,
                 bool top, int hops, const Pred& check, const Pred& conflict,
                 int origin = -1) const;
  Scan scan_range(int first, int last, int hops, const Pred& check,
                  const Pred& conflict) const;
  Scan at_end(int para, int hops, const Pred& check,
              const Pred& conflict) const;
  const std::vector<int>& list_of(int para) const;
  // True when `other` sits in a branch that cannot follow `origin`, such as
  // the ELSE of the IF whose THEN holds the origin.
  bool exclusive(int origin, int other) const;

  Trace trace_;
  std::map<std::string, std::string> record_file_;  // FD record -> file
  std::vector<int> call_of_statement_;
  std::vector<int> position_;  // statement -> index in its paragraph list
};

// Identifier names in tokens [from, to) of a statement, skipping subscripts
// and qualifiers; reserved words and literals are dropped.
std::vector<std::string> identifiers_in(const Statement& s, std::size_t from,
                                        std::size_t to);

// Index of the first top-level token equal to `word` at or after `from`,
// or tokens.size().
std::size_t find_keyword(const Statement& s, std::string_view word,
                         std::size_t from = 0);

bool is_dli_function(std::string_view code);
bool is_dli_get(std::string_view code);
bool is_dli_update(std::string_view code);

}  // namespace cobhint
