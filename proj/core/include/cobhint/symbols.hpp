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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cobhint/model.hpp"

namespace cobhint {

enum class BindingKind { data_item, file, paragraph, index_name, mnemonic };

struct Binding {
  BindingKind kind = BindingKind::data_item;
  int index = -1;  // into the owning ProgramModel vector; -1 for names only
};

struct Collision {
  std::string name;
  BindingKind kind = BindingKind::paragraph;
  std::vector<int> lines;
};

enum class RefContext { file_status, perform_target, goto_target, procedure };

struct UnresolvedRef {
  std::string name;
  int line = 0;
  RefContext context = RefContext::procedure;
  int statement = -1;
};

class SymbolTable {
 public:
  static std::string normalize(std::string_view name);

  void bind(std::string_view name, Binding binding);

  // Every binding for the name, in declaration order.
  const std::vector<Binding>& lookup(std::string_view name) const;
  bool declared(std::string_view name) const { return !lookup(name).empty(); }

  int find_data(std::string_view name) const;
  int find_file(std::string_view name) const;
  int find_paragraph(std::string_view name) const;

  std::vector<Collision> collisions;
  std::vector<UnresolvedRef> unresolved;

 private:
  int find(std::string_view name, BindingKind kind) const;
  std::map<std::string, std::vector<Binding>, std::less<>> table_;
};

SymbolTable build_symbol_table(const ProgramModel& model);

// Identifier-like words of a statement that should name declared items:
// reserved words, literals, figuratives and FUNCTION names are dropped.
std::vector<const Token*> referenced_identifiers(const Statement& statement);

}  // namespace cobhint
