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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cobhint/flow.hpp"
#include "cobhint/model.hpp"
#include "cobhint/source.hpp"
#include "cobhint/symbols.hpp"

namespace cobhint {

enum class Category {
  file_status,
  init_omission,
  control_flow,
  ims_interface,
  restart_logic,
  structure,
};

inline constexpr int kCategoryCount = 6;

std::string_view category_code(Category c);   // FILE_STATUS, ...
std::string_view category_label(Category c);  // display text
// Throws ConfigError for an unknown code.
Category category_from_code(std::string_view code);
const std::vector<Category>& all_categories();

enum class Severity { error, warning };

std::string_view to_string(Severity s);

struct RuleDescriptor {
  std::string rule_id;
  Category category = Category::structure;
  std::string title;
  Severity severity = Severity::error;
  bool injectable = false;
  std::string description;
};

// The static catalog ordered by rule id.
const std::vector<RuleDescriptor>& list_rules();
const RuleDescriptor* find_rule(std::string_view rule_id);

struct Finding {
  std::string rule_id;
  Category category = Category::structure;
  Span span;
  std::string message;
  std::vector<std::string> evidence;
  std::string program_id;

  friend bool operator==(const Finding&, const Finding&) = default;
};

using RuleSet = std::optional<std::set<std::string>>;

// Findings sorted by (start line, rule id). `enabled` unset runs every rule.
// Rules whose prerequisites are missing append a line to `skip_notes`.
std::vector<Finding> run_rules(const ProgramModel& model,
                               const SymbolTable& symbols,
                               const FlowGraph& flow,
                               const RuleSet& enabled = std::nullopt,
                               std::vector<std::string>* skip_notes = nullptr);

// parse_source + build_symbol_table + build_flow_graph + run_rules, with
// findings tagged by the source id.
std::vector<Finding> check_program(const SourceProgram& program,
                                   const RuleSet& enabled = std::nullopt,
                                   std::vector<std::string>* skip_notes = nullptr);

bool has_errors(const std::vector<Finding>& findings);

// Parses "A1,A2" into a rule set; throws ConfigError on unknown ids.
std::set<std::string> parse_rule_list(std::string_view list);

// Schema v1 document with sorted keys.
std::string findings_to_json(std::string_view program_id,
                             const std::vector<Finding>& findings);
// Inverse of findings_to_json; throws ProtocolError on malformed input.
std::vector<Finding> findings_from_json(std::string_view text,
                                        std::string* program_id = nullptr);

}  // namespace cobhint
