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

#include "cobhint/rules.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "json.hpp"

#include "cobhint/analysis.hpp"
#include "cobhint/errors.hpp"
#include "cobhint/parser.hpp"
#include "text_util.hpp"

namespace cobhint {

// ---- categories -------------------------------------------------------------

std::string_view category_code(Category c) {
  switch (c) {
    case Category::file_status: return "FILE_STATUS";
    case Category::init_omission: return "INIT_OMISSION";
    case Category::control_flow: return "CONTROL_FLOW";
    case Category::ims_interface: return "IMS_INTERFACE";
    case Category::restart_logic: return "RESTART_LOGIC";
    case Category::structure: return "STRUCTURE";
  }
  return "STRUCTURE";
}

std::string_view category_label(Category c) {
  switch (c) {
    case Category::file_status: return "File status handling";
    case Category::init_omission: return "Initialization omissions";
    case Category::control_flow: return "Control flow";
    case Category::ims_interface: return "IMS call interface";
    case Category::restart_logic: return "Checkpoint and restart";
    case Category::structure: return "Program structure";
  }
  return "Program structure";
}

const std::vector<Category>& all_categories() {
  static const std::vector<Category> kAll = {
      Category::file_status,   Category::init_omission,
      Category::control_flow,  Category::ims_interface,
      Category::restart_logic, Category::structure};
  return kAll;
}

Category category_from_code(std::string_view code) {
  for (Category c : all_categories()) {
    if (category_code(c) == code) return c;
  }
  throw ConfigError("unknown category code: " + std::string(code));
}

std::string_view to_string(Severity s) {
  return s == Severity::error ? "error" : "warning";
}

// ---- catalog ------------------------------------------------------------------

namespace {

RuleDescriptor rule(const char* id, Category c, const char* title,
                    bool injectable, const char* description,
                    Severity severity = Severity::error) {
  return {id, c, title, severity, injectable, description};
}

std::vector<RuleDescriptor> make_catalog() {
  using C = Category;
  std::vector<RuleDescriptor> r = {
      rule("A1", C::file_status, "select-missing-file-status", true,
           "A SELECT entry has no FILE STATUS clause, so I/O outcomes for the "
           "file cannot be tested."),
      rule("A2", C::file_status, "status-unchecked-after-open", true,
           "An OPEN is not followed by an IF or EVALUATE on the file's status "
           "field before the next file or DL/I operation on some path."),
      rule("A3", C::file_status, "status-unchecked-after-read", true,
           "A READ has neither AT END nor INVALID KEY and the file's declared "
           "status field is not tested afterwards."),
      rule("A4", C::file_status, "status-unchecked-after-write", true,
           "A WRITE has no INVALID KEY phrase and the file's declared status "
           "field is not tested afterwards."),
      rule("A5", C::file_status, "file-used-before-open", true,
           "A READ, WRITE or REWRITE runs on a file before any OPEN of it on "
           "the path from the entry point."),
      rule("A6", C::file_status, "file-never-closed", true,
           "A file is opened on the path from the entry point but never "
           "closed afterwards."),
      rule("A7", C::file_status, "open-mode-mismatch", false,
           "A WRITE targets a file opened INPUT, or a READ targets a file "
           "opened OUTPUT or EXTEND."),
      rule("A8", C::file_status, "double-open", false,
           "A file is opened a second time without an intervening CLOSE."),
      rule("B1", C::init_omission, "uninitialized-numeric-used", true,
           "A numeric WORKING-STORAGE item without VALUE is read in "
           "arithmetic before anything assigns it."),
      rule("B2", C::init_omission, "accumulator-not-reset", false,
           "An item accumulated inside an inner loop is read in the outer "
           "loop but never reset between activations of the inner loop."),
      rule("B3", C::init_omission, "group-used-uninitialized", true,
           "A group item is moved or written before INITIALIZE or a "
           "member-wise assignment sets it."),
      rule("B4", C::init_omission, "status-field-undeclared", true,
           "The item named in FILE STATUS is not declared."),
      rule("B5", C::init_omission, "move-truncation-risk", false,
           "A MOVE copies a longer alphanumeric item into a shorter one.",
           Severity::warning),
      rule("B6", C::init_omission, "redefines-overlap-write", false,
           "An item is read, written through a REDEFINES alias, and read again "
           "without being set in between."),
      rule("C1", C::control_flow, "perform-thru-overlap", true,
           "A PERFORM THRU range shares paragraphs with a different performed "
           "range."),
      rule("C2", C::control_flow, "fall-through-into-performed-paragraph", true,
           "A paragraph that is a PERFORM target is also entered sequentially "
           "from the program entry."),
      rule("C3", C::control_flow, "goto-escapes-thru-range", false,
           "A GO TO inside a performed range jumps to a paragraph outside the "
           "range."),
      rule("C4", C::control_flow, "missing-terminator", true,
           "No STOP RUN or GOBACK is reachable from the program entry."),
      rule("C5", C::control_flow, "unreachable-paragraph", true,
           "A paragraph other than the entry is never reached from the entry "
           "point; paragraphs of an unreached section are reported once, at the "
           "section."),
      rule("C6", C::control_flow, "suspect-infinite-loop", true,
           "No item in a PERFORM UNTIL condition is assigned inside the loop "
           "body."),
      rule("D1", C::ims_interface, "pcb-undeclared", true,
           "A DL/I call names a PCB that is not in the ENTRY or PROCEDURE "
           "DIVISION USING list; reported once per PCB."),
      rule("D2", C::ims_interface, "status-unchecked-after-dli-call", true,
           "The PCB status code is not tested between a DL/I call and the next "
           "DL/I call or file operation."),
      rule("D3", C::ims_interface, "ssa-undeclared", true,
           "A segment search argument of a DL/I call is not declared."),
      rule("D4", C::ims_interface, "dli-call-arity", true,
           "A DL/I call passes fewer than three arguments."),
      rule("D5", C::ims_interface, "unknown-dli-function", true,
           "The function code of a DL/I call is not a known DL/I function."),
      rule("D6", C::ims_interface, "io-area-undeclared", false,
           "The I/O area argument of a DL/I call is not declared."),
      rule("E1", C::restart_logic, "chkp-without-xrst", true,
           "The program takes checkpoints but never issues XRST."),
      rule("E2", C::restart_logic, "xrst-not-first", true,
           "Another DL/I call runs before XRST on the path from the entry "
           "point."),
      rule("E3", C::restart_logic, "static-checkpoint-id", false,
           "Several CHKP calls use the same constant checkpoint id."),
      rule("E4", C::restart_logic, "update-loop-without-chkp", true,
           "A loop issues ISRT, REPL or DLET calls but never takes a "
           "checkpoint."),
      rule("E5", C::restart_logic, "no-reposition-after-restart", false,
           "XRST is the first DL/I call, but an update call follows it before "
           "any GU or GN repositions the database."),
      rule("F1", C::structure, "undeclared-identifier", true,
           "A procedure-division identifier or PERFORM/GO TO target is not "
           "declared."),
      rule("F2", C::structure, "duplicate-paragraph-name", false,
           "Two paragraphs share one name."),
      rule("F3", C::structure, "elementary-item-missing-picture", false,
           "An elementary data item has no PICTURE clause."),
      rule("F4", C::structure, "division-order", false,
           "A required division is missing or divisions are out of order."),
      rule("F5", C::structure, "unresolved-copy", false,
           "A COPY member is referenced; copybooks are not expanded.",
           Severity::warning),
      rule("F6", C::structure, "working-storage-missing", false,
           "Items are referenced but the program has no WORKING-STORAGE "
           "SECTION."),
  };
  std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) {
    return a.rule_id < b.rule_id;
  });
  return r;
}

}  // namespace

const std::vector<RuleDescriptor>& list_rules() {
  static const std::vector<RuleDescriptor> kCatalog = make_catalog();
  return kCatalog;
}

const RuleDescriptor* find_rule(std::string_view id) {
  for (const RuleDescriptor& r : list_rules()) {
    if (r.rule_id == id) return &r;
  }
  return nullptr;
}

std::set<std::string> parse_rule_list(std::string_view list) {
  std::set<std::string> out;
  for (const std::string& part : split(list, ',')) {
    const std::string id = to_upper(trim(part));
    if (id.empty()) continue;
    if (find_rule(id) == nullptr) throw ConfigError("unknown rule id: " + id);
    out.insert(id);
  }
  return out;
}

bool has_errors(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(), [](const Finding& f) {
    const RuleDescriptor* r = find_rule(f.rule_id);
    return r == nullptr || r->severity == Severity::error;
  });
}

// ---- checks -------------------------------------------------------------------

namespace {

bool is_storage(DataSection s) {
  return s == DataSection::working_storage || s == DataSection::local_storage;
}

std::string in_quotes(std::string_view s) { return "'" + std::string(s) + "'"; }

class Checker {
 public:
  Checker(const ProgramModel& m, const SymbolTable& st, const FlowGraph& fg,
          const RuleSet& enabled, std::vector<std::string>* skips)
      : m_(m), st_(st), a_(m, st, fg), enabled_(enabled), skips_(skips) {
    for (const DataItem& d : m.data_items) {
      if (d.redefines) redefined_.insert(*d.redefines);
    }
  }

  std::vector<Finding> run() {
    const bool has_code = !m_.statements.empty();
    const bool truncated = a_.trace().truncated;
    struct Entry {
      const char* id;
      void (Checker::*fn)();
      bool needs_code;
      bool needs_trace;
    };
    static const Entry kRules[] = {
        {"A1", &Checker::a1, false, false}, {"A2", &Checker::a2, true, false},
        {"A3", &Checker::a3, true, false},  {"A4", &Checker::a4, true, false},
        {"A5", &Checker::a5, true, true},   {"A6", &Checker::a6, true, true},
        {"A7", &Checker::a7, true, true},   {"A8", &Checker::a8, true, true},
        {"B1", &Checker::b1, true, true},   {"B2", &Checker::b2, true, false},
        {"B3", &Checker::b3, true, true},   {"B4", &Checker::b4, false, false},
        {"B5", &Checker::b5, true, false},  {"B6", &Checker::b6, true, true},
        {"C1", &Checker::c1, true, false},  {"C2", &Checker::c2, true, false},
        {"C3", &Checker::c3, true, false},  {"C4", &Checker::c4, true, true},
        {"C5", &Checker::c5, true, true},   {"C6", &Checker::c6, true, false},
        {"D1", &Checker::d1, true, false},  {"D2", &Checker::d2, true, false},
        {"D3", &Checker::d3, true, false},  {"D4", &Checker::d4, true, false},
        {"D5", &Checker::d5, true, false},  {"D6", &Checker::d6, true, false},
        {"E1", &Checker::e1, true, false},  {"E2", &Checker::e2, true, true},
        {"E3", &Checker::e3, true, false},  {"E4", &Checker::e4, true, false},
        {"E5", &Checker::e5, true, true},   {"F1", &Checker::f1, false, false},
        {"F2", &Checker::f2, false, false}, {"F3", &Checker::f3, false, false},
        {"F4", &Checker::f4, false, false}, {"F5", &Checker::f5, false, false},
        {"F6", &Checker::f6, false, false},
    };
    for (const Entry& e : kRules) {
      if (enabled_ && enabled_->count(e.id) == 0) continue;
      if (e.needs_code && !has_code) {
        skip(e.id, "no procedure code");
        continue;
      }
      if (e.needs_trace && truncated) {
        skip(e.id, "execution trace truncated");
        continue;
      }
      rule_ = find_rule(e.id);
      (this->*e.fn)();
    }
    std::stable_sort(out_.begin(), out_.end(),
                     [](const Finding& x, const Finding& y) {
                       if (x.span.start_line != y.span.start_line) {
                         return x.span.start_line < y.span.start_line;
                       }
                       if (x.rule_id != y.rule_id) return x.rule_id < y.rule_id;
                       return x.span.end_line < y.span.end_line;
                     });
    std::vector<Finding> unique;
    std::set<std::tuple<std::string, int, int>> seen;
    for (Finding& f : out_) {
      if (seen.insert({f.rule_id, f.span.start_line, f.span.end_line}).second) {
        unique.push_back(std::move(f));
      }
    }
    return unique;
  }

 private:
  void skip(const char* id, const char* why) {
    if (skips_) skips_->push_back(std::string(id) + " skipped: " + why);
  }

  void emit(Span span, std::string message, std::vector<std::string> evidence) {
    Finding f;
    f.rule_id = rule_->rule_id;
    f.category = rule_->category;
    f.span = span;
    f.message = std::move(message);
    f.evidence = std::move(evidence);
    f.program_id = m_.source_id;
    out_.push_back(std::move(f));
  }

  const Statement& stmt(int k) const { return m_.statements[k]; }
  int index_of(const Statement& s) const {
    return static_cast<int>(&s - m_.statements.data());
  }

  bool conflict_op(int k) const {
    return a_.is_file_op(stmt(k)) || a_.is_dli_call(stmt(k));
  }

  // True when the item, an ancestor or a descendant takes part in REDEFINES.
  bool redefines_involved(int i) const {
    auto touches = [&](int j) {
      const DataItem& d = m_.data_items[j];
      return d.redefines.has_value() || redefined_.count(d.name) != 0;
    };
    if (touches(i)) return true;
    for (int p : a_.ancestors(i)) {
      if (touches(p)) return true;
    }
    for (int c : a_.descendants(i)) {
      if (touches(c)) return true;
    }
    return false;
  }

  // The item or one of its ancestors is in `names`.
  bool covered(int i, const std::set<std::string>& names) const {
    if (names.count(m_.data_items[i].name) != 0) return true;
    for (int p : a_.ancestors(i)) {
      if (names.count(m_.data_items[p].name) != 0) return true;
    }
    return false;
  }

  // Status-check lookahead for one file after statement k.
  Lookahead status_lookahead(int k, const FileEntry& f) const {
    const std::set<std::string> names = a_.file_status_names(f);
    return a_.lookahead(
        k, [&](int j) { return a_.condition_references(stmt(j), names); },
        [&](int j) { return conflict_op(j); });
  }

  const FileEntry* file(std::string_view name) const {
    const int i = st_.find_file(name);
    return i < 0 ? nullptr : &m_.file_entries[i];
  }

  // Files without a usable status field are left to A1 and B4.
  bool status_declared(const FileEntry* f) const {
    return f != nullptr && f->status_field &&
           st_.find_data(*f->status_field) >= 0;
  }

  // ---- FILE_STATUS --------------------------------------------------------

  void a1() {
    for (const FileEntry& f : m_.file_entries) {
      if (f.status_field) continue;
      emit(f.select_span,
           "SELECT for file " + f.logical_name + " has no FILE STATUS clause.",
           {f.logical_name});
    }
  }

  void a2() {
    for (const Statement& s : m_.statements) {
      if (s.kind != StatementKind::open) continue;
      for (const std::string& name : a_.files_of(s)) {
        const FileEntry* f = file(name);
        if (!status_declared(f)) continue;
        if (status_lookahead(index_of(s), *f) == Lookahead::found) continue;
        emit(s.span,
             "OPEN of file " + name + " is not followed by a test of " +
                 *f->status_field + ".",
             {name, *f->status_field});
      }
    }
  }

  void unchecked_io(StatementKind kind, bool allow_at_end, const char* verb) {
    for (const Statement& s : m_.statements) {
      if (s.kind != kind || s.has_invalid_key) continue;
      if (allow_at_end && s.has_at_end) continue;
      for (const std::string& name : a_.files_of(s)) {
        const FileEntry* f = file(name);
        if (!status_declared(f) ||
            status_lookahead(index_of(s), *f) == Lookahead::found) {
          continue;
        }
        emit(s.span,
             std::string(verb) + " on file " + name +
                 (allow_at_end ? " has no AT END or INVALID KEY phrase"
                               : " has no INVALID KEY phrase") +
                 " and its status is not tested.",
             {name});
      }
    }
  }

  void a3() { unchecked_io(StatementKind::read, true, "READ"); }
  void a4() { unchecked_io(StatementKind::write, false, "WRITE"); }

  void a5() {
    std::set<std::string> opened;
    std::set<std::string> reported;
    for (const TraceEvent& e : a_.trace().events) {
      const Statement& s = stmt(e.statement);
      const auto files = a_.files_of(s);
      if (s.kind == StatementKind::open) {
        opened.insert(files.begin(), files.end());
        continue;
      }
      if (s.kind != StatementKind::read && s.kind != StatementKind::write &&
          s.kind != StatementKind::rewrite) {
        continue;
      }
      for (const std::string& f : files) {
        if (opened.count(f) != 0 || !reported.insert(f).second) continue;
        emit(s.span, s.verb + " on file " + f + " runs before any OPEN of it.",
             {f});
      }
    }
  }

  void a6() {
    std::map<std::string, int> first_open;
    std::set<std::string> closed;
    for (const TraceEvent& e : a_.trace().events) {
      const Statement& s = stmt(e.statement);
      if (s.kind == StatementKind::open) {
        for (const std::string& f : a_.files_of(s)) {
          first_open.emplace(f, e.statement);
        }
      } else if (s.kind == StatementKind::close) {
        for (const std::string& f : a_.files_of(s)) {
          if (first_open.count(f) != 0) closed.insert(f);
        }
      }
    }
    for (const auto& [f, k] : first_open) {
      if (closed.count(f) != 0) continue;
      emit(stmt(k).span, "File " + f + " is opened but never closed.", {f});
    }
  }

  void a7() {
    std::map<std::string, std::string> mode;
    for (const TraceEvent& e : a_.trace().events) {
      const Statement& s = stmt(e.statement);
      if (s.kind == StatementKind::open) {
        for (const auto& [m, f] : a_.open_modes(s)) mode[f] = m;
        continue;
      }
      if (s.kind == StatementKind::close) {
        for (const std::string& f : a_.files_of(s)) mode.erase(f);
        continue;
      }
      const bool is_write = s.kind == StatementKind::write ||
                            s.kind == StatementKind::rewrite;
      if (!is_write && s.kind != StatementKind::read) continue;
      for (const std::string& f : a_.files_of(s)) {
        auto it = mode.find(f);
        if (it == mode.end()) continue;
        const std::string& m = it->second;
        const bool bad = is_write ? (m == "INPUT" || (s.kind == StatementKind::rewrite &&
                                                      m != "I-O"))
                                  : (m == "OUTPUT" || m == "EXTEND");
        if (!bad) continue;
        emit(s.span, s.verb + " on file " + f + ", which is opened " + m + ".",
             {f, m});
      }
    }
  }

  void a8() {
    std::set<std::string> open;
    for (const TraceEvent& e : a_.trace().events) {
      const Statement& s = stmt(e.statement);
      if (s.kind == StatementKind::close) {
        for (const std::string& f : a_.files_of(s)) open.erase(f);
        continue;
      }
      if (s.kind != StatementKind::open || e.guarded) continue;
      for (const std::string& f : a_.files_of(s)) {
        if (!open.insert(f).second) {
          emit(s.span,
               "File " + f + " is opened again without an intervening CLOSE.",
               {f});
        }
      }
    }
  }

  // ---- INIT_OMISSION ------------------------------------------------------

  void b1() {
    std::set<std::string> assigned;
    std::set<std::string> reported;
    for (const TraceEvent& e : a_.trace().events) {
      const Statement& s = stmt(e.statement);
      for (const std::string& name : a_.arithmetic_reads(s)) {
        const int i = a_.item(name);
        if (i < 0 || !a_.is_numeric(i)) continue;
        const DataItem& d = m_.data_items[i];
        if (!is_storage(d.section) || d.has_value_clause) continue;
        if (covered(i, assigned) || redefines_involved(i)) continue;
        if (!reported.insert(name).second) continue;
        emit(s.span,
             "Numeric item " + name +
                 " is used in arithmetic before it is initialized.",
             {name});
      }
      for (const std::string& name : a_.assigned_items(s)) assigned.insert(name);
    }
  }

  static bool is_looping(const Statement& s) {
    return s.kind == StatementKind::perform && s.perform.loop != LoopKind::none;
  }

  void b2() {
    for (int outer = 0; outer < static_cast<int>(m_.statements.size()); ++outer) {
      if (!is_looping(stmt(outer))) continue;
      const std::vector<int> outer_body = a_.loop_body(outer);
      for (int inner : outer_body) {
        if (!is_looping(stmt(inner))) continue;
        const std::vector<int> inner_body = a_.loop_body(inner);
        const std::set<int> inner_set(inner_body.begin(), inner_body.end());
        for (int k : inner_body) {
          const Statement& s = stmt(k);
          if (s.verb != "ADD" || find_keyword(s, "GIVING") < s.tokens.size()) {
            continue;
          }
          for (const std::string& acc : a_.assigned_items(s)) {
            if (a_.item(acc) < 0) continue;
            bool reset = false;
            bool read_after = false;
            for (int j : outer_body) {
              if (inner_set.count(j) != 0 || j == inner) continue;
              const Statement& o = stmt(j);
              const auto assigned = a_.assigned_items(o);
              if (o.verb != "ADD" && o.verb != "SUBTRACT" &&
                  std::find(assigned.begin(), assigned.end(), acc) !=
                      assigned.end()) {
                reset = true;
              }
              const auto reads = a_.read_items(o);
              if (std::find(reads.begin(), reads.end(), acc) != reads.end()) {
                read_after = true;
              }
            }
            if (reset || !read_after) continue;
            emit(s.span,
                 "Accumulator " + acc +
                     " is never reset between activations of its loop.",
                 {acc});
          }
        }
      }
    }
  }

  void b3() {
    std::set<std::string> assigned;
    std::set<std::string> reported;
    for (const TraceEvent& e : a_.trace().events) {
      const Statement& s = stmt(e.statement);
      for (const std::string& name : a_.moved_sources(s)) {
        const int g = a_.item(name);
        if (g < 0 || !a_.is_group(g)) continue;
        if (!is_storage(m_.data_items[g].section)) continue;
        if (covered(g, assigned) || redefines_involved(g)) continue;
        bool all_set = true;
        for (int d : a_.descendants(g)) {
          if (a_.is_group(d)) continue;
          const DataItem& di = m_.data_items[d];
          if (!di.has_value_clause && !covered(d, assigned)) all_set = false;
        }
        if (all_set || !reported.insert(name).second) continue;
        emit(s.span,
             "Group item " + name + " is used before it is initialized.",
             {name});
      }
      for (const std::string& name : a_.assigned_items(s)) assigned.insert(name);
    }
  }

  void b4() {
    for (const FileEntry& f : m_.file_entries) {
      if (!f.status_field || st_.find_data(*f.status_field) >= 0) continue;
      const int line = f.status_line > 0 ? f.status_line : f.select_span.start_line;
      emit({line, line},
           "FILE STATUS field " + *f.status_field + " of file " +
               f.logical_name + " is not declared.",
           {*f.status_field, f.logical_name});
    }
  }

  void b5() {
    for (const Statement& s : m_.statements) {
      if (s.verb != "MOVE") continue;
      const auto sources = identifiers_in(s, 0, find_keyword(s, "TO"));
      if (sources.size() != 1) continue;
      const int src_len = a_.alphanumeric_length(a_.item(sources[0]));
      if (src_len < 0) continue;
      for (const std::string& t :
           identifiers_in(s, find_keyword(s, "TO") + 1, s.tokens.size())) {
        const int len = a_.alphanumeric_length(a_.item(t));
        if (len < 0 || len >= src_len) continue;
        emit(s.span,
             "MOVE from " + sources[0] + " (" + std::to_string(src_len) +
                 " characters) to " + t + " (" + std::to_string(len) +
                 " characters) may truncate.",
             {sources[0], t});
      }
    }
  }

  void b6() {
    for (const DataItem& alias : m_.data_items) {
      if (!alias.redefines) continue;
      const int o = a_.item(*alias.redefines);
      const int r = a_.item(alias.name);
      if (o < 0 || r < 0) continue;
      auto family = [&](int root) {
        std::set<std::string> names = {m_.data_items[root].name};
        for (int d : a_.descendants(root)) names.insert(m_.data_items[d].name);
        return names;
      };
      const std::set<std::string> orig = family(o);
      const std::set<std::string> alias_names = family(r);
      auto hits = [](const std::vector<std::string>& v,
                     const std::set<std::string>& names) {
        return std::any_of(v.begin(), v.end(),
                           [&](const std::string& n) { return names.count(n); });
      };
      bool read_orig = false;
      bool pending = false;
      for (const TraceEvent& e : a_.trace().events) {
        const Statement& s = stmt(e.statement);
        const auto reads = a_.read_items(s);
        const auto writes = a_.assigned_items(s);
        if (hits(reads, orig)) {
          if (pending) {
            emit(s.span,
                 "Item " + m_.data_items[o].name +
                     " is read after a write through its alias " + alias.name +
                     " without being set again.",
                 {m_.data_items[o].name, alias.name});
            break;
          }
          read_orig = true;
        }
        if (hits(writes, orig)) {
          read_orig = false;
          pending = false;
        } else if (hits(writes, alias_names) && read_orig) {
          pending = true;
        }
      }
    }
  }

  // ---- CONTROL_FLOW -------------------------------------------------------

  struct Range {
    int statement;
    int first;
    int last;
  };

  std::vector<Range> performed_ranges() const {
    std::vector<Range> out;
    for (int k = 0; k < static_cast<int>(m_.statements.size()); ++k) {
      const auto [first, last] = perform_range(m_, stmt(k));
      if (first >= 0) out.push_back({k, first, last});
    }
    return out;
  }

  void c1() {
    const std::vector<Range> ranges = performed_ranges();
    for (const Range& r : ranges) {
      const Statement& s = stmt(r.statement);
      if (s.perform.thru.empty()) continue;
      for (const Range& o : ranges) {
        if (o.first == r.first && o.last == r.last) continue;
        if (o.first > r.last || r.first > o.last) continue;
        emit(s.span,
             "PERFORM " + s.perform.target + " THRU " + s.perform.thru +
                 " overlaps the range performed at line " +
                 std::to_string(stmt(o.statement).span.start_line) + ".",
             {s.perform.target, s.perform.thru});
        break;
      }
    }
  }

  void c2() {
    // One finding at the first such paragraph; the rest are evidence.
    const std::vector<bool> seq = sequential_set(m_);
    std::set<int> hit;
    for (const Range& r : performed_ranges()) {
      if (seq[r.first]) hit.insert(r.first);
    }
    if (hit.empty()) return;
    std::vector<std::string> names;
    for (int p : hit) names.push_back(m_.paragraphs[p].name);
    const Paragraph& p = m_.paragraphs[*hit.begin()];
    emit({p.span.start_line, p.span.start_line},
         "Paragraph " + p.name +
             " is a PERFORM target but is also entered sequentially from "
             "the program entry.",
         names);
  }

  void c3() {
    std::set<int> reported;
    for (const Range& r : performed_ranges()) {
      if (r.first == r.last) continue;
      const Statement& perf = stmt(r.statement);
      for (int k : a_.range_statements(r.first, r.last)) {
        const Statement& s = stmt(k);
        if (s.kind != StatementKind::go_to) continue;
        for (const std::string& t : s.goto_targets) {
          const int p = paragraph_index(m_, t);
          if (p < 0 || (p >= r.first && p <= r.last)) continue;
          if (!reported.insert(k).second) continue;
          emit(s.span,
               "GO TO " + t + " leaves the range " +
                   m_.paragraphs[r.first].name + " THRU " +
                   m_.paragraphs[r.last].name + " performed at line " +
                   std::to_string(perf.span.start_line) + ".",
               {t});
        }
      }
    }
  }

  void c4() {
    if (a_.trace().reached_terminator) return;
    const int line = m_.procedure_line > 0 ? m_.procedure_line
                                           : stmt(0).span.start_line;
    emit({line, line},
         "No STOP RUN or GOBACK is reachable from the program entry.", {});
  }

  void c5() {
    const auto& visited = a_.trace().visited;
    int section = -1;
    for (int p = 1; p < static_cast<int>(m_.paragraphs.size()); ++p) {
      const Paragraph& para = m_.paragraphs[p];
      if (para.is_section) section = p;
      if (visited[p]) continue;
      // Paragraphs of an unreached section are covered by its report.
      if (!para.is_section && section >= 0 && !visited[section]) continue;
      emit({para.span.start_line, para.span.start_line},
           "Paragraph " + para.name + " is never reached from the program entry.",
           {para.name});
    }
  }

  // The item, an ancestor or a descendant is in `names`.
  bool related_assigned(int i, const std::set<std::string>& names) const {
    if (covered(i, names)) return true;
    for (int d : a_.descendants(i)) {
      if (names.count(m_.data_items[d].name) != 0) return true;
    }
    return false;
  }

  void c6() {
    for (int k = 0; k < static_cast<int>(m_.statements.size()); ++k) {
      const Statement& s = stmt(k);
      if (s.kind != StatementKind::perform || s.perform.loop != LoopKind::until) {
        continue;
      }
      std::vector<std::string> items;
      for (const Token& t : s.perform.condition) {
        if (!t.is_word() || a_.item(t.upper) < 0) continue;
        const std::string base = a_.base_name(t.upper);
        if (std::find(items.begin(), items.end(), base) == items.end()) {
          items.push_back(base);
        }
      }
      if (items.empty()) continue;
      std::set<std::string> assigned;
      for (int j : a_.loop_body(k)) {
        for (const std::string& n : a_.assigned_items(stmt(j))) assigned.insert(n);
      }
      const bool changed = std::any_of(items.begin(), items.end(), [&](auto& n) {
        return related_assigned(a_.item(n), assigned);
      });
      if (changed) continue;
      emit(s.span,
           "PERFORM UNTIL condition on " + join(items, ", ") +
               " is never changed inside the loop.",
           items);
    }
  }

  // ---- IMS_INTERFACE ------------------------------------------------------

  std::vector<const CallSite*> dli_calls() const {
    std::vector<const CallSite*> out;
    for (const CallSite& c : m_.call_sites) {
      if (c.statement >= 0 && a_.is_dli_call(stmt(c.statement))) {
        out.push_back(&c);
      }
    }
    return out;
  }

  void d1() {
    std::set<std::string> allowed;
    for (const EntryPoint& e : m_.entry_points) {
      for (const NamedRef& r : e.using_args) allowed.insert(r.name);
    }
    for (const NamedRef& r : m_.procedure_using) allowed.insert(r.name);
    if (allowed.empty()) {
      for (const DataItem& d : m_.data_items) {
        if (d.section == DataSection::linkage && d.level == 1) {
          allowed.insert(d.name);
        }
      }
    }
    std::set<std::string> reported;
    for (const CallSite* c : dli_calls()) {
      if (c->args.size() < 2 || c->args[1].literal) continue;
      const std::string& pcb = c->args[1].name;
      if (allowed.count(pcb) != 0 || !reported.insert(pcb).second) continue;
      emit(c->span,
           "PCB " + pcb +
               " is not declared in the LINKAGE SECTION or the ENTRY USING list.",
           {pcb});
    }
  }

  void d2() {
    for (const CallSite* c : dli_calls()) {
      if (c->args.size() < 2 || c->args[1].literal) continue;
      const std::string& pcb = c->args[1].name;
      const std::set<std::string> names = a_.pcb_status_names(pcb);
      if (names.empty()) continue;
      const Lookahead r = a_.lookahead(
          c->statement,
          [&](int j) { return a_.condition_references(stmt(j), names); },
          [&](int j) { return conflict_op(j); });
      if (r == Lookahead::found) continue;
      const std::string status = m_.data_items[a_.pcb_status_item(pcb)].name;
      emit(c->span,
           "Status code " + status + " of PCB " + pcb +
               " is not tested after the DL/I call.",
           {pcb, status});
    }
  }

  void undeclared_args(std::size_t from, std::size_t to, const char* what) {
    for (const CallSite* c : dli_calls()) {
      for (std::size_t i = from; i < std::min(to, c->args.size()); ++i) {
        const CallArg& arg = c->args[i];
        if (arg.literal || st_.declared(arg.name)) continue;
        emit(c->span,
             std::string(what) + " " + arg.name +
                 " of the DL/I call is not declared.",
             {arg.name});
      }
    }
  }

  void d3() { undeclared_args(3, SIZE_MAX, "SSA"); }
  void d6() { undeclared_args(2, 3, "I/O area"); }

  void d4() {
    for (const CallSite* c : dli_calls()) {
      if (c->args.size() >= 3) continue;
      emit(c->span,
           "CALL " + in_quotes(c->callee) + " passes " +
               std::to_string(c->args.size()) +
               " arguments where at least 3 are required.",
           {c->callee});
    }
  }

  void d5() {
    for (const CallSite* c : dli_calls()) {
      const std::string fn = a_.dli_function(*c);
      if (fn.empty() || is_dli_function(fn)) continue;
      emit(c->span, "DL/I function code " + in_quotes(fn) + " is not a known function.",
           {c->args[0].name, fn});
    }
  }

  // ---- RESTART_LOGIC ------------------------------------------------------

  std::string function_of(int statement) const {
    const CallSite* c = a_.call_site(statement);
    return c == nullptr ? std::string() : a_.dli_function(*c);
  }

  void e1() {
    const CallSite* first_chkp = nullptr;
    for (const CallSite* c : dli_calls()) {
      const std::string fn = a_.dli_function(*c);
      if (fn == "XRST") return;
      if (fn == "CHKP" && first_chkp == nullptr) first_chkp = c;
    }
    if (first_chkp == nullptr) return;
    emit(first_chkp->span,
         "The program issues CHKP but never calls XRST to restart.", {"CHKP"});
  }

  void e2() {
    const CallSite* xrst = nullptr;
    for (const CallSite* c : dli_calls()) {
      if (a_.dli_function(*c) == "XRST") {
        xrst = c;
        break;
      }
    }
    if (xrst == nullptr) return;
    for (const TraceEvent& e : a_.trace().events) {
      const Statement& s = stmt(e.statement);
      if (!a_.is_dli_call(s)) continue;
      const std::string fn = function_of(e.statement);
      if (fn == "XRST") return;
      emit(xrst->span,
           "XRST is not the first DL/I call; " + (fn.empty() ? "a call" : fn) +
               " at line " + std::to_string(s.span.start_line) +
               " runs before it.",
           {"XRST", fn});
      return;
    }
    // XRST never reached from the entry point.
    emit(xrst->span, "XRST is not reached before the other DL/I calls.",
         {"XRST"});
  }

  // Literal text or item name of a constant checkpoint id, or empty.
  std::string static_id(const CallArg& arg,
                        const std::set<std::string>& assigned) const {
    if (arg.literal) return "'" + arg.name + "'";
    const int i = a_.item(arg.name);
    if (i < 0 || related_assigned(i, assigned)) return {};
    const DataItem& d = m_.data_items[i];
    if (d.has_value_clause) return d.name;
    const auto desc = a_.descendants(i);
    if (desc.empty()) return {};
    for (int c : desc) {
      if (!a_.is_group(c) && !m_.data_items[c].has_value_clause) return {};
    }
    return d.name;
  }

  void e3() {
    std::set<std::string> assigned;
    for (const Statement& s : m_.statements) {
      for (const std::string& n : a_.assigned_items(s)) assigned.insert(n);
    }
    std::map<std::string, int> seen;
    for (const CallSite* c : dli_calls()) {
      if (a_.dli_function(*c) != "CHKP" || c->args.size() < 3) continue;
      // Basic CHKP passes the id area third; the symbolic form passes a
      // length first.
      const CallArg& arg = c->args.size() > 3 ? c->args[3] : c->args[2];
      const std::string id = static_id(arg, assigned);
      if (id.empty()) continue;
      auto [it, fresh] = seen.emplace(id, c->span.start_line);
      if (fresh) continue;
      emit(c->span,
           "Checkpoint id " + id + " is also used by the CHKP at line " +
               std::to_string(it->second) + ".",
           {arg.name});
    }
  }

  void e4() {
    for (int k = 0; k < static_cast<int>(m_.statements.size()); ++k) {
      if (!is_looping(stmt(k))) continue;
      int update = -1;
      bool chkp = false;
      for (int j : a_.loop_body(k)) {
        if (!a_.is_dli_call(stmt(j))) continue;
        const std::string fn = function_of(j);
        if (fn == "CHKP") chkp = true;
        if (is_dli_update(fn) && update < 0) update = j;
      }
      if (update < 0 || chkp) continue;
      emit(stmt(k).span,
           "Loop issuing " + function_of(update) + " at line " +
               std::to_string(stmt(update).span.start_line) +
               " never takes a checkpoint.",
           {function_of(update)});
    }
  }

  void e5() {
    int xrst = -1;
    for (const TraceEvent& e : a_.trace().events) {
      if (!a_.is_dli_call(stmt(e.statement))) continue;
      const std::string fn = function_of(e.statement);
      if (xrst < 0) {
        if (fn != "XRST") return;  // ordering is E2's finding
        xrst = e.statement;
        continue;
      }
      if (is_dli_get(fn)) return;
      if (!is_dli_update(fn)) continue;
      emit(stmt(xrst).span,
           "After XRST the program issues " + fn + " at line " +
               std::to_string(stmt(e.statement).span.start_line) +
               " before repositioning with a get call.",
           {"XRST", fn});
      return;
    }
  }

  // ---- STRUCTURE ----------------------------------------------------------

  // I/O areas and SSAs of DL/I calls are reported by D3 and D6.
  bool dli_data_arg(const UnresolvedRef& u) const {
    if (u.statement < 0 || !a_.is_dli_call(stmt(u.statement))) return false;
    const CallSite* c = a_.call_site(u.statement);
    if (c == nullptr) return false;
    for (std::size_t i = 2; i < c->args.size(); ++i) {
      if (!c->args[i].literal && c->args[i].name == u.name) return true;
    }
    return false;
  }

  void f1() {
    for (const UnresolvedRef& u : st_.unresolved) {
      if (dli_data_arg(u)) continue;
      std::string msg;
      switch (u.context) {
        case RefContext::procedure:
          msg = "Identifier " + u.name + " is not declared.";
          break;
        case RefContext::perform_target:
          msg = "PERFORM target " + u.name + " is not a paragraph or section.";
          break;
        case RefContext::goto_target:
          msg = "GO TO target " + u.name + " is not a paragraph or section.";
          break;
        case RefContext::file_status:
          continue;  // reported by B4
      }
      emit({u.line, u.line}, msg, {u.name});
    }
  }

  void f2() {
    for (const Collision& c : st_.collisions) {
      if (c.kind != BindingKind::paragraph) continue;
      for (std::size_t i = 1; i < c.lines.size(); ++i) {
        emit({c.lines[i], c.lines[i]},
             "Paragraph " + c.name + " is declared more than once.", {c.name});
      }
    }
  }

  void f3() {
    for (int i = 0; i < static_cast<int>(m_.data_items.size()); ++i) {
      const DataItem& d = m_.data_items[i];
      if (d.level == 88 || d.level == 66 || d.picture || a_.is_group(i)) continue;
      if (d.usage == "INDEX" || d.usage == "POINTER" || d.usage == "COMP-1" ||
          d.usage == "COMP-2" || d.usage == "PROCEDURE-POINTER" ||
          d.usage == "FUNCTION-POINTER") {
        continue;
      }
      emit(d.span, "Elementary item " + d.name + " has no PICTURE clause.",
           {d.name});
    }
  }

  void f4() {
    if (m_.divisions.empty()) return;
    static const char* kOrder[] = {"IDENTIFICATION", "ENVIRONMENT", "DATA",
                                   "PROCEDURE"};
    auto rank = [](const std::string& name) {
      for (int i = 0; i < 4; ++i) {
        if (name == kOrder[i]) return i;
      }
      return -1;
    };
    for (const char* required : {"IDENTIFICATION", "PROCEDURE"}) {
      if (m_.division(required) != nullptr) continue;
      emit({1, 1}, std::string(required) + " DIVISION is missing.", {required});
    }
    int highest = -1;
    const Division* prev = nullptr;
    for (const Division& d : m_.divisions) {
      const int r = rank(d.name);
      if (r < highest && prev != nullptr) {
        emit({d.span.start_line, d.span.start_line},
             d.name + " DIVISION appears after " + prev->name + " DIVISION.",
             {d.name});
      } else if (r > highest) {
        highest = r;
        prev = &d;
      }
    }
  }

  void f5() {
    for (const NamedRef& c : m_.copies) {
      emit({c.line, c.line}, "COPY member " + c.name + " is not expanded.",
           {c.name});
    }
  }

  void f6() {
    if (m_.has_data_section("WORKING-STORAGE")) return;
    for (const UnresolvedRef& u : st_.unresolved) {
      if (u.context != RefContext::procedure) continue;
      emit({u.line, u.line},
           "Item " + u.name +
               " is referenced but the program has no WORKING-STORAGE SECTION.",
           {u.name});
      return;
    }
  }

  const ProgramModel& m_;
  const SymbolTable& st_;
  Analysis a_;
  const RuleSet& enabled_;
  std::vector<std::string>* skips_;
  std::set<std::string> redefined_;
  const RuleDescriptor* rule_ = nullptr;
  std::vector<Finding> out_;
};

}  // namespace

std::vector<Finding> run_rules(const ProgramModel& model,
                               const SymbolTable& symbols,
                               const FlowGraph& flow, const RuleSet& enabled,
                               std::vector<std::string>* skip_notes) {
  return Checker(model, symbols, flow, enabled, skip_notes).run();
}

std::vector<Finding> check_program(const SourceProgram& program,
                                   const RuleSet& enabled,
                                   std::vector<std::string>* skip_notes) {
  const ProgramModel model = parse_source(program);
  const SymbolTable symbols = build_symbol_table(model);
  const FlowGraph flow = build_flow_graph(model);
  return run_rules(model, symbols, flow, enabled, skip_notes);
}

// ---- JSON -------------------------------------------------------------------

std::string findings_to_json(std::string_view program_id,
                             const std::vector<Finding>& findings) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["program_id"] = program_id;
  doc["findings"] = nlohmann::json::array();
  for (const Finding& f : findings) {
    doc["findings"].push_back({{"rule_id", f.rule_id},
                               {"category", category_code(f.category)},
                               {"start_line", f.span.start_line},
                               {"end_line", f.span.end_line},
                               {"message", f.message},
                               {"evidence", f.evidence}});
  }
  return doc.dump(2) + "\n";
}

std::vector<Finding> findings_from_json(std::string_view text,
                                        std::string* program_id) {
  try {
    const nlohmann::json doc = nlohmann::json::parse(text);
    if (doc.at("schema_version").get<int>() != 1) {
      throw ProtocolError("unsupported findings schema", std::string(text));
    }
    const std::string pid = doc.at("program_id").get<std::string>();
    if (program_id) *program_id = pid;
    std::vector<Finding> out;
    for (const auto& j : doc.at("findings")) {
      Finding f;
      f.rule_id = j.at("rule_id").get<std::string>();
      f.category = category_from_code(j.at("category").get<std::string>());
      f.span = {j.at("start_line").get<int>(), j.at("end_line").get<int>()};
      f.message = j.at("message").get<std::string>();
      f.evidence = j.at("evidence").get<std::vector<std::string>>();
      f.program_id = pid;
      out.push_back(std::move(f));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed findings document: ") + e.what(),
                        std::string(text));
  } catch (const ConfigError& e) {
    throw ProtocolError(e.what(), std::string(text));
  }
}

}  // namespace cobhint
