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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cobhint/lexer.hpp"
#include "cobhint/source.hpp"

namespace cobhint {

struct Division {
  std::string name;  // IDENTIFICATION, ENVIRONMENT, DATA, PROCEDURE
  Span span;
};

enum class DataSection { working_storage, linkage, file_section, local_storage };

struct DataItem {
  std::string name;  // uppercased; FILLER for unnamed entries
  int level = 1;
  std::optional<std::string> picture;
  bool has_value_clause = false;
  DataSection section = DataSection::working_storage;
  Span span;

  std::optional<std::string> redefines;
  std::optional<std::string> value;  // first VALUE operand, literal contents
  std::string usage;                 // empty means DISPLAY
  bool occurs = false;
  std::vector<std::string> index_names;
  std::string fd_file;  // owning FD/SD for file-section records
  int parent = -1;
  std::vector<int> children;

  bool is_filler() const { return name == "FILLER"; }
  bool is_condition() const { return level == 88; }
};

struct FileEntry {
  std::string logical_name;
  std::optional<std::string> status_field;
  std::optional<std::string> organization;
  Span select_span;

  std::string assign;
  std::optional<std::string> access;
  std::optional<std::string> record_key;
  int status_line = 0;               // line holding the FILE STATUS clause
  std::vector<std::string> records;  // 01 records under the matching FD
  bool has_fd = false;
};

enum class StatementKind {
  open, close, read, write, rewrite, move, initialize, compute, add,
  subtract, multiply, divide, perform, go_to, if_, evaluate, call,
  stop_run, goback, other,
};

std::string_view to_string(StatementKind kind);

enum class LoopKind { none, until, varying, times };

struct PerformInfo {
  std::string target;  // empty for inline PERFORM
  std::string thru;
  bool is_inline = false;
  LoopKind loop = LoopKind::none;
  std::vector<Token> condition;  // tokens of the UNTIL condition(s)
  std::vector<std::string> varying;
};

// AT END, NOT AT END, INVALID KEY, ON SIZE ERROR, ...
struct Phrase {
  std::string name;
  Span span;
};

struct Statement {
  StatementKind kind = StatementKind::other;
  std::string verb;               // uppercased leading verb
  std::vector<Token> tokens;      // operand tokens, verb excluded
  std::vector<std::string> operands;
  Span span;                      // lines of the verb and its own operands
  Span extent;                    // also covers nested statements and END-x
  bool condition_guard = false;   // nested under IF/EVALUATE or a phrase
  int paragraph = -1;             // -1 for unnamed top-level code
  int parent = -1;
  int branch = 0;  // THEN=0/ELSE=1, WHEN n, or phrase n+1 within the parent
  bool has_at_end = false;
  bool has_invalid_key = false;
  std::vector<Phrase> phrases;
  PerformInfo perform;
  std::vector<std::string> goto_targets;
};

struct Paragraph {
  std::string name;
  Span span;
  std::vector<int> statements;
  bool is_section = false;
};

struct CallArg {
  std::string name;  // uppercased identifier, or literal contents
  int line = 0;
  bool literal = false;
};

struct CallSite {
  std::string callee;  // literal contents or identifier, uppercased
  bool callee_literal = false;
  Span span;
  int statement = -1;
  std::vector<CallArg> args;
};

struct NamedRef {
  std::string name;
  int line = 0;
};

struct EntryPoint {
  std::string name;
  Span span;
  std::vector<NamedRef> using_args;
};

struct ProgramModel {
  std::string source_id;
  std::string program_id;  // from PROGRAM-ID, if present
  std::vector<Division> divisions;
  std::vector<DataItem> data_items;
  std::vector<FileEntry> file_entries;
  std::vector<Paragraph> paragraphs;
  std::vector<Statement> statements;
  std::vector<CallSite> call_sites;

  std::vector<int> top_level;  // statements before the first paragraph
  std::vector<NamedRef> procedure_using;
  std::vector<EntryPoint> entry_points;
  std::vector<NamedRef> copies;
  std::vector<std::string> mnemonics;
  std::vector<NamedRef> data_sections;  // WORKING-STORAGE, LINKAGE, ...
  int procedure_line = 0;
  std::vector<ParseNote> notes;

  const Division* division(std::string_view name) const;
  bool has_data_section(std::string_view name) const;
};

std::string_view to_string(DataSection section);

}  // namespace cobhint
