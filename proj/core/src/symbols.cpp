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

#include "cobhint/symbols.hpp"

#include <set>
#include <utility>

#include "cobhint/keywords.hpp"
#include "text_util.hpp"

namespace cobhint {

std::string SymbolTable::normalize(std::string_view name) {
  return to_upper(trim(name));
}

void SymbolTable::bind(std::string_view name, Binding binding) {
  table_[normalize(name)].push_back(binding);
}

const std::vector<Binding>& SymbolTable::lookup(std::string_view name) const {
  static const std::vector<Binding> kEmpty;
  auto it = table_.find(normalize(name));
  return it == table_.end() ? kEmpty : it->second;
}

int SymbolTable::find(std::string_view name, BindingKind kind) const {
  for (const Binding& b : lookup(name)) {
    if (b.kind == kind) return b.index;
  }
  return -1;
}

int SymbolTable::find_data(std::string_view name) const {
  return find(name, BindingKind::data_item);
}

int SymbolTable::find_file(std::string_view name) const {
  return find(name, BindingKind::file);
}

int SymbolTable::find_paragraph(std::string_view name) const {
  return find(name, BindingKind::paragraph);
}

std::vector<const Token*> referenced_identifiers(const Statement& s) {
  std::set<std::size_t> skip;
  const auto& t = s.tokens;
  if (s.kind == StatementKind::perform && !s.perform.is_inline && !t.empty()) {
    skip.insert(0);
    if (t.size() > 2 && (t[1].is_word("THRU") || t[1].is_word("THROUGH"))) {
      skip.insert(2);
    }
  }
  if (s.kind == StatementKind::go_to) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i].is_word("DEPENDING")) break;
      skip.insert(i);
    }
  }
  std::vector<const Token*> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Token& tok = t[i];
    if (!tok.is_word() || skip.count(i) != 0) continue;
    if (tok.upper == "FUNCTION") {
      ++i;  // intrinsic function name
      continue;
    }
    if (is_reserved(tok.upper)) continue;
    out.push_back(&tok);
  }
  return out;
}

SymbolTable build_symbol_table(const ProgramModel& m) {
  SymbolTable st;
  for (int i = 0; i < static_cast<int>(m.data_items.size()); ++i) {
    const DataItem& d = m.data_items[i];
    if (!d.is_filler()) st.bind(d.name, {BindingKind::data_item, i});
    for (const std::string& idx : d.index_names) {
      st.bind(idx, {BindingKind::index_name, i});
    }
  }
  for (int i = 0; i < static_cast<int>(m.file_entries.size()); ++i) {
    st.bind(m.file_entries[i].logical_name, {BindingKind::file, i});
  }
  for (int i = 0; i < static_cast<int>(m.paragraphs.size()); ++i) {
    st.bind(m.paragraphs[i].name, {BindingKind::paragraph, i});
  }
  for (const std::string& mn : m.mnemonics) {
    st.bind(mn, {BindingKind::mnemonic, -1});
  }

  // Collisions: repeated paragraph names and repeated non-FILLER data names.
  std::map<std::string, std::vector<int>> para_lines;
  for (const Paragraph& p : m.paragraphs) {
    para_lines[p.name].push_back(p.span.start_line);
  }
  for (auto& [name, lines] : para_lines) {
    if (lines.size() > 1) {
      st.collisions.push_back({name, BindingKind::paragraph, lines});
    }
  }
  std::map<std::string, std::vector<int>> data_lines;
  for (const DataItem& d : m.data_items) {
    if (!d.is_filler()) data_lines[d.name].push_back(d.span.start_line);
  }
  for (auto& [name, lines] : data_lines) {
    if (lines.size() > 1) {
      st.collisions.push_back({name, BindingKind::data_item, lines});
    }
  }

  for (const FileEntry& f : m.file_entries) {
    if (f.status_field && st.find_data(*f.status_field) < 0) {
      st.unresolved.push_back(
          {*f.status_field, f.status_line, RefContext::file_status, -1});
    }
  }
  for (int k = 0; k < static_cast<int>(m.statements.size()); ++k) {
    const Statement& s = m.statements[k];
    if (s.kind == StatementKind::perform && !s.perform.is_inline) {
      for (const std::string* name : {&s.perform.target, &s.perform.thru}) {
        if (!name->empty() && st.find_paragraph(*name) < 0) {
          st.unresolved.push_back(
              {*name, s.span.start_line, RefContext::perform_target, k});
        }
      }
    }
    if (s.kind == StatementKind::go_to) {
      for (const std::string& name : s.goto_targets) {
        if (st.find_paragraph(name) < 0) {
          st.unresolved.push_back(
              {name, s.span.start_line, RefContext::goto_target, k});
        }
      }
    }
    std::set<std::string> seen;
    for (const Token* tok : referenced_identifiers(s)) {
      if (st.declared(tok->upper) || !seen.insert(tok->upper).second) continue;
      st.unresolved.push_back({tok->upper, tok->line, RefContext::procedure, k});
    }
  }
  return st;
}

}  // namespace cobhint
