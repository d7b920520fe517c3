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

#include "cobhint/parser.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>

#include "cobhint/keywords.hpp"
#include "cobhint/lexer.hpp"
#include "text_util.hpp"

namespace cobhint {

std::string_view to_string(StatementKind kind) {
  switch (kind) {
    case StatementKind::open: return "open";
    case StatementKind::close: return "close";
    case StatementKind::read: return "read";
    case StatementKind::write: return "write";
    case StatementKind::rewrite: return "rewrite";
    case StatementKind::move: return "move";
    case StatementKind::initialize: return "initialize";
    case StatementKind::compute: return "compute";
    case StatementKind::add: return "add";
    case StatementKind::subtract: return "subtract";
    case StatementKind::multiply: return "multiply";
    case StatementKind::divide: return "divide";
    case StatementKind::perform: return "perform";
    case StatementKind::go_to: return "go_to";
    case StatementKind::if_: return "if";
    case StatementKind::evaluate: return "evaluate";
    case StatementKind::call: return "call";
    case StatementKind::stop_run: return "stop_run";
    case StatementKind::goback: return "goback";
    case StatementKind::other: return "other";
  }
  return "other";
}

std::string_view to_string(DataSection section) {
  switch (section) {
    case DataSection::working_storage: return "working_storage";
    case DataSection::linkage: return "linkage";
    case DataSection::file_section: return "file_section";
    case DataSection::local_storage: return "local_storage";
  }
  return "working_storage";
}

const Division* ProgramModel::division(std::string_view name) const {
  for (const Division& d : divisions) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

bool ProgramModel::has_data_section(std::string_view name) const {
  return std::any_of(data_sections.begin(), data_sections.end(),
                     [&](const NamedRef& r) { return r.name == name; });
}

namespace {

using Tokens = std::vector<Token>;

bool word_at(const Tokens& t, std::size_t i, std::string_view w) {
  return i < t.size() && t[i].is_word(w);
}

bool period_at(const Tokens& t, std::size_t i) {
  return i < t.size() && t[i].is_period();
}

std::string operand_text(const Token& t) {
  return t.kind == TokenKind::literal ? t.text : t.upper;
}

StatementKind kind_for_verb(std::string_view verb) {
  if (verb == "OPEN") return StatementKind::open;
  if (verb == "CLOSE") return StatementKind::close;
  if (verb == "READ") return StatementKind::read;
  if (verb == "WRITE") return StatementKind::write;
  if (verb == "REWRITE") return StatementKind::rewrite;
  if (verb == "MOVE") return StatementKind::move;
  if (verb == "INITIALIZE") return StatementKind::initialize;
  if (verb == "COMPUTE") return StatementKind::compute;
  if (verb == "ADD") return StatementKind::add;
  if (verb == "SUBTRACT") return StatementKind::subtract;
  if (verb == "MULTIPLY") return StatementKind::multiply;
  if (verb == "DIVIDE") return StatementKind::divide;
  if (verb == "PERFORM") return StatementKind::perform;
  if (verb == "GO") return StatementKind::go_to;
  if (verb == "IF") return StatementKind::if_;
  if (verb == "EVALUATE") return StatementKind::evaluate;
  if (verb == "CALL") return StatementKind::call;
  if (verb == "GOBACK") return StatementKind::goback;
  return StatementKind::other;
}

// Removes COPY and EXEC ... END-EXEC sequences from the stream.
Tokens strip_directives(const Tokens& in, ProgramModel& m) {
  Tokens out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const Token& t = in[i];
    if (t.is_word("COPY") && i + 1 < in.size() &&
        (in[i + 1].is_word() || in[i + 1].kind == TokenKind::literal)) {
      const Token& member = in[i + 1];
      m.copies.push_back({member.kind == TokenKind::literal
                              ? to_upper(literal_value(member))
                              : member.upper,
                          t.line});
      std::size_t j = i + 2;
      while (j < in.size() && !in[j].is_period()) ++j;
      i = j;  // the directive's own period is consumed
      continue;
    }
    if (t.is_word("EXEC")) {
      std::size_t j = i + 1;
      while (j < in.size() && !in[j].is_word("END-EXEC")) ++j;
      m.notes.push_back({t.line, "EXEC block skipped"});
      i = j;
      continue;
    }
    out.push_back(t);
  }
  return out;
}

bool is_division_name(std::string_view w) {
  return w == "IDENTIFICATION" || w == "ID" || w == "ENVIRONMENT" ||
         w == "DATA" || w == "PROCEDURE";
}

std::string canonical_division(std::string_view w) {
  return w == "ID" ? "IDENTIFICATION" : std::string(w);
}

struct DivisionRange {
  std::string name;
  std::size_t header = 0;  // index of the division name token
  std::size_t begin = 0;   // first token after the header sentence
  std::size_t end = 0;
};

// Splits [begin, end) at periods; returns half-open ranges excluding the
// period token.
std::vector<std::pair<std::size_t, std::size_t>> sentences(
    const Tokens& t, std::size_t begin, std::size_t end) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = begin;
  for (std::size_t i = begin; i < end; ++i) {
    if (t[i].is_period()) {
      if (i > start) out.emplace_back(start, i);
      start = i + 1;
    }
  }
  if (start < end) out.emplace_back(start, end);
  return out;
}

// Collects identifier arguments after USING, skipping passing-mode words,
// qualification and subscripts.
std::vector<CallArg> using_args(const Tokens& t, std::size_t from) {
  std::vector<CallArg> args;
  std::size_t i = from;
  while (i < t.size()) {
    const Token& tok = t[i];
    if (tok.kind == TokenKind::lparen) {
      int depth = 0;
      while (i < t.size()) {
        if (t[i].kind == TokenKind::lparen) ++depth;
        if (t[i].kind == TokenKind::rparen && --depth == 0) break;
        ++i;
      }
      ++i;
      continue;
    }
    if (tok.is_word("BY") || tok.is_word("REFERENCE") ||
        tok.is_word("CONTENT") || tok.is_word("VALUE") ||
        tok.is_word("OMITTED")) {
      ++i;
      continue;
    }
    if (tok.is_word("ADDRESS") || tok.is_word("LENGTH")) {
      i += word_at(t, i + 1, "OF") ? 2 : 1;
      continue;
    }
    if (tok.is_word("OF") || tok.is_word("IN")) {
      i += 2;  // qualifier names the parent, not a new argument
      continue;
    }
    if (tok.is_word("RETURNING") || tok.is_word("ON") ||
        tok.is_word("NOT") || tok.is_word("EXCEPTION") ||
        tok.is_word("OVERFLOW") || tok.is_word("GIVING")) {
      break;
    }
    if (tok.kind == TokenKind::literal) {
      args.push_back({literal_value(tok), tok.line, true});
    } else if (tok.is_word() || tok.kind == TokenKind::number) {
      args.push_back({tok.upper, tok.line, false});
    }
    ++i;
  }
  return args;
}

enum class ScopeKind { if_, evaluate, perform, search, phrase };

struct Scope {
  ScopeKind kind;
  int stmt;
  int phrase = -1;  // index into the owner's phrase list
  int branch = 0;   // ELSE or WHEN count seen so far
};

enum class PhraseClass { at_end, invalid_key, size_error, overflow, exception };

bool accepts(std::string_view verb, PhraseClass c) {
  switch (c) {
    case PhraseClass::at_end:
      return verb == "READ" || verb == "RETURN" || verb == "SEARCH";
    case PhraseClass::invalid_key:
      return verb == "READ" || verb == "WRITE" || verb == "REWRITE" ||
             verb == "DELETE" || verb == "START";
    case PhraseClass::size_error:
      return verb == "ADD" || verb == "SUBTRACT" || verb == "MULTIPLY" ||
             verb == "DIVIDE" || verb == "COMPUTE";
    case PhraseClass::overflow:
      return verb == "STRING" || verb == "UNSTRING" || verb == "CALL";
    case PhraseClass::exception:
      return verb == "CALL" || verb == "ACCEPT" || verb == "DISPLAY";
  }
  return false;
}

struct PhraseMatch {
  std::string name;
  PhraseClass cls;
  std::size_t length;
  bool positive;
};

std::optional<PhraseMatch> match_phrase(const Tokens& t, std::size_t i) {
  std::size_t j = i;
  bool negative = false;
  if (word_at(t, j, "NOT")) {
    negative = true;
    ++j;
  }
  auto make = [&](std::string base, PhraseClass c, std::size_t end) {
    return PhraseMatch{(negative ? "NOT " : "") + base, c, end - i, !negative};
  };
  if (word_at(t, j, "AT") && word_at(t, j + 1, "END")) {
    return make("AT END", PhraseClass::at_end, j + 2);
  }
  if (negative && word_at(t, j, "END")) {
    return make("AT END", PhraseClass::at_end, j + 1);
  }
  if (word_at(t, j, "INVALID")) {
    return make("INVALID KEY", PhraseClass::invalid_key,
                j + (word_at(t, j + 1, "KEY") ? 2 : 1));
  }
  std::size_t k = j;
  if (word_at(t, k, "ON")) ++k;
  if (word_at(t, k, "SIZE") && word_at(t, k + 1, "ERROR")) {
    return make("ON SIZE ERROR", PhraseClass::size_error, k + 2);
  }
  if (word_at(t, k, "OVERFLOW")) {
    return make("ON OVERFLOW", PhraseClass::overflow, k + 1);
  }
  if (word_at(t, k, "EXCEPTION")) {
    return make("ON EXCEPTION", PhraseClass::exception, k + 1);
  }
  return std::nullopt;
}

class Parser {
 public:
  Parser(ProgramModel& m, Tokens tokens) : m_(m), t_(std::move(tokens)) {}

  void run() {
    std::vector<DivisionRange> ranges = find_divisions();
    for (const DivisionRange& r : ranges) {
      if (r.name == "IDENTIFICATION") {
        parse_identification(r);
      } else if (r.name == "ENVIRONMENT") {
        parse_environment(r);
      } else if (r.name == "DATA") {
        parse_data(r);
      } else if (r.name == "PROCEDURE") {
        parse_procedure(r);
      }
    }
    link_files();
    finish_statements();
  }

 private:
  // ---- divisions --------------------------------------------------------

  std::vector<DivisionRange> find_divisions() {
    std::vector<DivisionRange> ranges;
    for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
      if (!t_[i].is_word() || !is_division_name(t_[i].upper)) continue;
      if (!t_[i + 1].is_word("DIVISION")) continue;
      DivisionRange r;
      r.name = canonical_division(t_[i].upper);
      r.header = i;
      std::size_t j = i + 2;
      while (j < t_.size() && !t_[j].is_period()) ++j;
      r.begin = std::min(j + 1, t_.size());
      ranges.push_back(r);
      i = j;
    }
    for (std::size_t k = 0; k < ranges.size(); ++k) {
      ranges[k].end = k + 1 < ranges.size() ? ranges[k + 1].header : t_.size();
    }
    for (const DivisionRange& r : ranges) {
      const int start = t_[r.header].line;
      const int end = r.end > r.header ? t_[r.end - 1].line : start;
      if (m_.division(r.name) != nullptr) {
        m_.notes.push_back({start, "duplicate " + r.name + " DIVISION"});
        continue;
      }
      m_.divisions.push_back({r.name, {start, std::max(start, end)}});
    }
    return ranges;
  }

  void parse_identification(const DivisionRange& r) {
    for (std::size_t i = r.begin; i < r.end; ++i) {
      if (!t_[i].is_word("PROGRAM-ID")) continue;
      std::size_t j = i + 1;
      if (period_at(t_, j)) ++j;
      if (j < r.end) {
        const Token& name = t_[j];
        m_.program_id = name.kind == TokenKind::literal
                            ? to_upper(literal_value(name))
                            : name.upper;
      }
      return;
    }
  }

  // ---- environment ------------------------------------------------------

  void parse_environment(const DivisionRange& r) {
    bool special_names = false;
    for (auto [b, e] : sentences(t_, r.begin, r.end)) {
      const Token& first = t_[b];
      if (first.is_word("SELECT")) {
        special_names = false;
        parse_select(b, e);
        continue;
      }
      if (first.is_word("SPECIAL-NAMES")) {
        special_names = true;
        continue;
      }
      if (first.is_word("FILE-CONTROL") || first.is_word("I-O-CONTROL") ||
          word_at(t_, b + 1, "SECTION")) {
        special_names = false;
        continue;
      }
      if (special_names) {
        for (std::size_t i = b + 1; i + 1 < e; ++i) {
          if (t_[i].is_word("IS") && t_[i + 1].is_word() &&
              !is_reserved(t_[i + 1].upper)) {
            m_.mnemonics.push_back(t_[i + 1].upper);
          }
        }
      }
    }
  }

  void parse_select(std::size_t b, std::size_t e) {
    std::size_t i = b + 1;
    if (word_at(t_, i, "OPTIONAL")) ++i;
    if (i >= e || !t_[i].is_word()) {
      m_.notes.push_back({t_[b].line, "SELECT without a file name"});
      return;
    }
    FileEntry f;
    f.logical_name = t_[i].upper;
    f.select_span = {t_[b].line, t_[e - 1].line};
    if (e < t_.size() && t_[e].is_period()) f.select_span.end_line = t_[e].line;
    ++i;
    while (i < e) {
      const Token& tok = t_[i];
      if (tok.is_word("ASSIGN")) {
        ++i;
        if (word_at(t_, i, "TO")) ++i;
        if (i < e) f.assign = operand_text(t_[i]);
        ++i;
      } else if (tok.is_word("ORGANIZATION")) {
        ++i;
        if (word_at(t_, i, "IS")) ++i;
        if (word_at(t_, i, "LINE")) ++i;
        if (i < e) f.organization = t_[i].upper;
        ++i;
      } else if (tok.is_word("INDEXED") || tok.is_word("SEQUENTIAL") ||
                 tok.is_word("RELATIVE")) {
        if (!f.organization) f.organization = tok.upper;
        ++i;
      } else if (tok.is_word("ACCESS")) {
        ++i;
        if (word_at(t_, i, "MODE")) ++i;
        if (word_at(t_, i, "IS")) ++i;
        if (i < e) f.access = t_[i].upper;
        ++i;
      } else if (tok.is_word("ALTERNATE")) {
        // ALTERNATE RECORD KEY IS x [WITH DUPLICATES]
        i += 1;
        while (i < e && (t_[i].is_word("RECORD") || t_[i].is_word("KEY") ||
                         t_[i].is_word("IS"))) {
          ++i;
        }
        ++i;
      } else if (tok.is_word("RECORD")) {
        ++i;
        if (word_at(t_, i, "KEY")) ++i;
        if (word_at(t_, i, "IS")) ++i;
        if (i < e) f.record_key = t_[i].upper;
        ++i;
      } else if (tok.is_word("FILE") && word_at(t_, i + 1, "STATUS")) {
        f.status_line = tok.line;
        i += 2;
        if (word_at(t_, i, "IS")) ++i;
        if (i < e && t_[i].is_word()) f.status_field = t_[i].upper;
        ++i;
      } else if (tok.is_word("STATUS")) {
        f.status_line = tok.line;
        ++i;
        if (word_at(t_, i, "IS")) ++i;
        if (i < e && t_[i].is_word()) f.status_field = t_[i].upper;
        ++i;
      } else {
        ++i;
      }
    }
    for (const FileEntry& other : m_.file_entries) {
      if (other.logical_name == f.logical_name) {
        m_.notes.push_back(
            {t_[b].line, "duplicate SELECT for " + f.logical_name});
        return;
      }
    }
    m_.file_entries.push_back(std::move(f));
  }

  // ---- data -------------------------------------------------------------

  static bool is_entry_clause(std::string_view w) {
    return w == "PIC" || w == "PICTURE" || w == "VALUE" || w == "VALUES" ||
           w == "REDEFINES" || w == "OCCURS" || w == "USAGE" ||
           w == "COMP" || w == "COMP-1" || w == "COMP-2" || w == "COMP-3" ||
           w == "COMP-4" || w == "COMP-5" || w == "COMPUTATIONAL" ||
           w == "COMPUTATIONAL-3" || w == "BINARY" ||
           w == "PACKED-DECIMAL" || w == "INDEX" || w == "POINTER" ||
           w == "DISPLAY" || w == "SIGN" || w == "JUSTIFIED" || w == "JUST" ||
           w == "BLANK" || w == "SYNC" || w == "SYNCHRONIZED" ||
           w == "EXTERNAL" || w == "GLOBAL" || w == "RENAMES";
  }

  static bool is_usage_word(std::string_view w) {
    return w == "COMP" || w == "COMP-1" || w == "COMP-2" || w == "COMP-3" ||
           w == "COMP-4" || w == "COMP-5" || w == "COMPUTATIONAL" ||
           w == "COMPUTATIONAL-3" || w == "BINARY" ||
           w == "PACKED-DECIMAL" || w == "INDEX" || w == "POINTER" ||
           w == "DISPLAY";
  }

  void parse_data(const DivisionRange& r) {
    DataSection section = DataSection::working_storage;
    std::string current_fd;
    std::vector<int> stack;  // open group items, innermost last
    int last_non88 = -1;
    for (auto [b, e] : sentences(t_, r.begin, r.end)) {
      const Token& first = t_[b];
      if (first.is_word() && word_at(t_, b + 1, "SECTION")) {
        const std::string& name = first.upper;
        m_.data_sections.push_back({name, first.line});
        if (name == "WORKING-STORAGE") {
          section = DataSection::working_storage;
        } else if (name == "LINKAGE") {
          section = DataSection::linkage;
        } else if (name == "FILE") {
          section = DataSection::file_section;
        } else if (name == "LOCAL-STORAGE") {
          section = DataSection::local_storage;
        } else {
          m_.notes.push_back({first.line, "unsupported section " + name});
        }
        current_fd.clear();
        stack.clear();
        last_non88 = -1;
        continue;
      }
      if (first.is_word("FD") || first.is_word("SD")) {
        if (b + 1 >= e) continue;
        current_fd = t_[b + 1].upper;
        stack.clear();
        last_non88 = -1;
        continue;
      }
      if (first.kind != TokenKind::number) {
        m_.notes.push_back({first.line, "unrecognized data entry"});
        continue;
      }
      const int level = std::atoi(first.text.c_str());
      const bool valid = (level >= 1 && level <= 49) || level == 66 ||
                         level == 77 || level == 88;
      if (!valid) {
        m_.notes.push_back(
            {first.line, "invalid level number " + first.text});
        continue;
      }
      DataItem item;
      item.level = level;
      item.section = section;
      item.span = {first.line, t_[e - 1].line};
      if (e < t_.size() && t_[e].is_period()) item.span.end_line = t_[e].line;
      std::size_t i = b + 1;
      if (i < e && t_[i].is_word() &&
          (t_[i].upper == "FILLER" || !is_entry_clause(t_[i].upper))) {
        item.name = t_[i].upper;
        ++i;
      } else {
        item.name = "FILLER";
      }
      parse_entry_clauses(item, i, e);

      const int index = static_cast<int>(m_.data_items.size());
      if (level == 88) {
        item.parent = last_non88;
      } else if (level == 66) {
        item.parent = -1;
      } else if (level == 1 || level == 77) {
        stack.clear();
      } else {
        while (!stack.empty() && m_.data_items[stack.back()].level >= level) {
          stack.pop_back();
        }
        item.parent = stack.empty() ? -1 : stack.back();
      }
      if (section == DataSection::file_section && !current_fd.empty()) {
        item.fd_file = current_fd;
      }
      if (item.parent >= 0) m_.data_items[item.parent].children.push_back(index);
      if (level != 88 && level != 66) {
        stack.push_back(index);
        last_non88 = index;
      }
      m_.data_items.push_back(std::move(item));
    }
  }

  void parse_entry_clauses(DataItem& item, std::size_t i, std::size_t e) {
    while (i < e) {
      const Token& tok = t_[i];
      if (tok.kind == TokenKind::picture) {
        item.picture = tok.upper;
        ++i;
      } else if (tok.is_word("REDEFINES")) {
        if (i + 1 < e) item.redefines = t_[i + 1].upper;
        i += 2;
      } else if (tok.is_word("VALUE") || tok.is_word("VALUES")) {
        item.has_value_clause = true;
        ++i;
        if (word_at(t_, i, "IS") || word_at(t_, i, "ARE")) ++i;
        if (word_at(t_, i, "ALL")) ++i;
        if (i < e) {
          const Token& v = t_[i];
          item.value = v.kind == TokenKind::literal ? literal_value(v) : v.upper;
        }
        // Remaining VALUE operands (88 lists, THRU ranges) are skipped.
        while (i < e && !(t_[i].is_word() && is_entry_clause(t_[i].upper))) ++i;
      } else if (tok.is_word("OCCURS")) {
        item.occurs = true;
        ++i;
        while (i < e && !(t_[i].is_word() && is_entry_clause(t_[i].upper))) {
          if (t_[i].is_word("INDEXED")) {
            ++i;
            if (word_at(t_, i, "BY")) ++i;
            while (i < e && t_[i].is_word() && !is_entry_clause(t_[i].upper) &&
                   !is_reserved(t_[i].upper)) {
              item.index_names.push_back(t_[i].upper);
              ++i;
            }
            continue;
          }
          ++i;
        }
      } else if (tok.is_word("USAGE")) {
        ++i;
        if (word_at(t_, i, "IS")) ++i;
        if (i < e) item.usage = t_[i].upper;
        ++i;
      } else if (tok.is_word() && is_usage_word(tok.upper)) {
        item.usage = tok.upper;
        ++i;
      } else {
        ++i;
      }
    }
    if (item.usage == "DISPLAY") item.usage.clear();
  }

  // ---- procedure --------------------------------------------------------

  void parse_procedure(const DivisionRange& r) {
    m_.procedure_line = t_[r.header].line;
    // Header: PROCEDURE DIVISION [USING a b ...].
    const Tokens header(t_.begin() + static_cast<std::ptrdiff_t>(r.header),
                        t_.begin() + static_cast<std::ptrdiff_t>(r.begin));
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (!header[i].is_word("USING")) continue;
      for (const CallArg& a : using_args(header, i + 1)) {
        if (!a.literal) m_.procedure_using.push_back({a.name, a.line});
      }
      break;
    }

    begin_ = r.begin;
    end_ = r.end;
    bool sentence_start = true;
    std::size_t i = r.begin;
    while (i < r.end) {
      const Token& tok = t_[i];
      if (sentence_start && try_header(i)) continue;
      if (tok.is_period()) {
        close_all(i, true);
        if (cur_ >= 0) extend_extent(cur_, tok.line);
        cur_ = -1;
        sentence_start = true;
        ++i;
        continue;
      }
      sentence_start = false;
      if (tok.is_word()) {
        const std::string& w = tok.upper;
        if (w == "DECLARATIVES" ||
            (w == "END" && word_at(t_, i + 1, "DECLARATIVES"))) {
          while (i < r.end && !t_[i].is_period()) ++i;
          continue;
        }
        if (is_scope_terminator(w)) {
          handle_terminator(i);
          ++i;
          continue;
        }
        if (w == "ELSE") {
          handle_else(i);
          ++i;
          continue;
        }
        if (w == "WHEN") {
          handle_when(i);
          ++i;
          continue;
        }
        if (auto ph = match_phrase(t_, i); ph && handle_phrase(i, *ph)) {
          i += ph->length;
          continue;
        }
        if (w == "NEXT" && word_at(t_, i + 1, "SENTENCE")) {
          start_statement(i, "NEXT SENTENCE");
          i += 2;
          continue;
        }
        if (is_verb(w)) {
          start_statement(i, w);
          ++i;
          continue;
        }
      }
      add_operand(i);
      ++i;
    }
    close_all(r.end, false);
    cur_ = -1;
  }

  bool try_header(std::size_t& i) {
    const Token& tok = t_[i];
    if (tok.kind != TokenKind::word && tok.kind != TokenKind::number) {
      return false;
    }
    bool section = false;
    std::size_t next = 0;
    if (period_at(t_, i + 1) && !(tok.is_word() && is_verb(tok.upper))) {
      next = i + 2;
    } else if (word_at(t_, i + 1, "SECTION") && period_at(t_, i + 2)) {
      section = true;
      next = i + 3;
    } else if (word_at(t_, i + 1, "SECTION") && i + 2 < t_.size() &&
               t_[i + 2].kind == TokenKind::number && period_at(t_, i + 3)) {
      section = true;
      next = i + 4;
    } else {
      return false;
    }
    if (tok.is_word("DECLARATIVES")) return false;
    close_all(i, false);
    cur_ = -1;
    Paragraph p;
    p.name = tok.upper;
    p.span = {tok.line, tok.line};
    p.is_section = section;
    m_.paragraphs.push_back(std::move(p));
    i = next;
    return true;
  }

  int current_paragraph() const {
    return m_.paragraphs.empty() ? -1
                                 : static_cast<int>(m_.paragraphs.size()) - 1;
  }

  bool guarded_now() const {
    for (const Scope& s : scopes_) {
      if (s.kind != ScopeKind::perform) return true;
    }
    return false;
  }

  void start_statement(std::size_t i, std::string verb) {
    const Token& tok = t_[i];
    Statement s;
    s.verb = std::move(verb);
    s.kind = kind_for_verb(s.verb);
    s.span = {tok.line, tok.line};
    s.extent = s.span;
    s.paragraph = current_paragraph();
    s.parent = scopes_.empty() ? -1 : scopes_.back().stmt;
    s.branch = current_branch();
    s.condition_guard = guarded_now();
    const int index = static_cast<int>(m_.statements.size());
    m_.statements.push_back(std::move(s));
    if (index_para(index) >= 0) {
      m_.paragraphs[index_para(index)].statements.push_back(index);
    } else {
      m_.top_level.push_back(index);
    }
    cur_ = index;
    cur_owns_tokens_ = true;

    const std::string& v = m_.statements[index].verb;
    if (v == "IF") {
      scopes_.push_back({ScopeKind::if_, index});
    } else if (v == "EVALUATE") {
      scopes_.push_back({ScopeKind::evaluate, index});
    } else if (v == "SEARCH") {
      scopes_.push_back({ScopeKind::search, index});
    } else if (v == "PERFORM" && perform_is_inline(i + 1)) {
      m_.statements[index].perform.is_inline = true;
      scopes_.push_back({ScopeKind::perform, index});
    }
  }

  int index_para(int stmt) const { return m_.statements[stmt].paragraph; }

  int current_branch() const {
    if (scopes_.empty()) return 0;
    const Scope& s = scopes_.back();
    return s.kind == ScopeKind::phrase ? s.phrase + 1 : s.branch;
  }

  bool perform_is_inline(std::size_t k) const {
    if (k >= end_ || t_[k].is_period()) return true;
    const Token& first = t_[k];
    if (first.is_word()) {
      const std::string& w = first.upper;
      if (w == "UNTIL" || w == "VARYING" || w == "WITH" || w == "TEST" ||
          w == "FOREVER" || is_verb(w) || is_scope_terminator(w)) {
        return true;
      }
      return word_at(t_, k + 1, "TIMES");
    }
    if (first.kind == TokenKind::number) return word_at(t_, k + 1, "TIMES");
    return true;
  }

  void add_operand(std::size_t i) {
    if (cur_ < 0) {
      // Stray tokens outside a recognizable statement.
      const Token& tok = t_[i];
      Statement s;
      s.span = {tok.line, tok.line};
      s.extent = s.span;
      s.paragraph = current_paragraph();
      s.parent = scopes_.empty() ? -1 : scopes_.back().stmt;
      s.branch = current_branch();
      s.condition_guard = guarded_now();
      const int index = static_cast<int>(m_.statements.size());
      m_.statements.push_back(std::move(s));
      if (index_para(index) >= 0) {
        m_.paragraphs[index_para(index)].statements.push_back(index);
      } else {
        m_.top_level.push_back(index);
      }
      cur_ = index;
      cur_owns_tokens_ = true;
    }
    Statement& s = m_.statements[cur_];
    s.tokens.push_back(t_[i]);
    if (cur_owns_tokens_) s.span.end_line = std::max(s.span.end_line, t_[i].line);
    extend_extent(cur_, t_[i].line);
  }

  void extend_extent(int stmt, int line) {
    Statement& s = m_.statements[stmt];
    s.extent.end_line = std::max(s.extent.end_line, line);
  }

  int prev_line(std::size_t i) const {
    return i > begin_ ? t_[i - 1].line : t_[begin_].line;
  }

  // Closes the innermost scope. `closer` is the token that ends it.
  void pop_scope(std::size_t closer, bool include_closer) {
    const Scope s = scopes_.back();
    scopes_.pop_back();
    const int end_line =
        include_closer && closer < end_ ? t_[closer].line : prev_line(closer);
    extend_extent(s.stmt, end_line);
    if (s.kind == ScopeKind::phrase && s.phrase >= 0) {
      Phrase& ph = m_.statements[s.stmt].phrases[s.phrase];
      ph.span.end_line = std::max(ph.span.start_line, prev_line(closer));
    }
  }

  void close_all(std::size_t closer, bool include_closer) {
    while (!scopes_.empty()) pop_scope(closer, include_closer);
  }

  void handle_terminator(std::size_t i) {
    cur_ = -1;
    const std::string& w = t_[i].upper;
    const std::string verb = w.substr(4);
    ScopeKind kind = ScopeKind::phrase;
    if (verb == "IF") kind = ScopeKind::if_;
    if (verb == "EVALUATE") kind = ScopeKind::evaluate;
    if (verb == "PERFORM") kind = ScopeKind::perform;
    if (verb == "SEARCH") kind = ScopeKind::search;

    for (std::size_t k = scopes_.size(); k-- > 0;) {
      const Scope& s = scopes_[k];
      const bool match =
          kind == ScopeKind::phrase
              ? s.kind == ScopeKind::phrase && m_.statements[s.stmt].verb == verb
              : s.kind == kind;
      if (!match) continue;
      while (scopes_.size() > k + 1) pop_scope(i, false);
      pop_scope(i, true);
      return;
    }
    // A terminator for a statement without an open scope, e.g. END-CALL.
    for (int k = static_cast<int>(m_.statements.size()) - 1; k >= 0; --k) {
      Statement& s = m_.statements[k];
      if (s.paragraph != current_paragraph()) break;
      if (s.verb == verb) {
        extend_extent(k, t_[i].line);
        return;
      }
    }
    m_.notes.push_back({t_[i].line, "unmatched " + w});
  }

  void handle_else(std::size_t i) {
    cur_ = -1;
    for (std::size_t k = scopes_.size(); k-- > 0;) {
      if (scopes_[k].kind != ScopeKind::if_) continue;
      while (scopes_.size() > k + 1) pop_scope(i, false);
      scopes_.back().branch = 1;
      extend_extent(scopes_.back().stmt, t_[i].line);
      return;
    }
    m_.notes.push_back({t_[i].line, "ELSE without IF"});
  }

  void handle_when(std::size_t i) {
    cur_ = -1;
    for (std::size_t k = scopes_.size(); k-- > 0;) {
      const ScopeKind kind = scopes_[k].kind;
      if (kind != ScopeKind::evaluate && kind != ScopeKind::search) continue;
      while (scopes_.size() > k + 1) pop_scope(i, false);
      ++scopes_.back().branch;
      // WHEN operands are recorded on the EVALUATE/SEARCH itself.
      cur_ = scopes_.back().stmt;
      cur_owns_tokens_ = false;
      extend_extent(cur_, t_[i].line);
      return;
    }
    add_operand(i);
  }

  bool handle_phrase(std::size_t i, const PhraseMatch& ph) {
    int owner = -1;
    if (cur_ >= 0 && cur_owns_tokens_ &&
        accepts(m_.statements[cur_].verb, ph.cls)) {
      owner = cur_;
    } else {
      for (std::size_t k = scopes_.size(); k-- > 0;) {
        const Scope& s = scopes_[k];
        if (s.kind == ScopeKind::phrase &&
            accepts(m_.statements[s.stmt].verb, ph.cls)) {
          owner = s.stmt;
          while (scopes_.size() > k) pop_scope(i, false);
          break;
        }
      }
    }
    if (owner < 0) return false;
    cur_ = -1;
    Statement& s = m_.statements[owner];
    const int line = t_[i].line;
    s.phrases.push_back({ph.name, {line, line}});
    if (ph.positive && ph.cls == PhraseClass::at_end) s.has_at_end = true;
    if (ph.positive && ph.cls == PhraseClass::invalid_key) {
      s.has_invalid_key = true;
    }
    extend_extent(owner, t_[i + ph.length - 1].line);
    scopes_.push_back({ScopeKind::phrase, owner,
                       static_cast<int>(s.phrases.size()) - 1});
    return true;
  }

  // ---- post-processing --------------------------------------------------

  void link_files() {
    for (FileEntry& f : m_.file_entries) {
      for (const DataItem& d : m_.data_items) {
        if (d.fd_file == f.logical_name && d.level == 1) {
          f.records.push_back(d.name);
          f.has_fd = true;
        }
      }
    }
  }

  void finish_statements() {
    for (int k = 0; k < static_cast<int>(m_.statements.size()); ++k) {
      Statement& s = m_.statements[k];
      for (const Token& tok : s.tokens) s.operands.push_back(operand_text(tok));
      if (s.verb == "STOP") {
        if (!s.tokens.empty() && s.tokens[0].is_word("RUN")) {
          s.kind = StatementKind::stop_run;
        }
      } else if (s.kind == StatementKind::perform) {
        finish_perform(s);
      } else if (s.kind == StatementKind::go_to) {
        for (const Token& tok : s.tokens) {
          if (tok.is_word("TO")) continue;
          if (tok.is_word("DEPENDING")) break;
          if (tok.is_word() || tok.kind == TokenKind::number) {
            s.goto_targets.push_back(tok.upper);
          }
        }
      } else if (s.kind == StatementKind::call) {
        finish_call(s, k);
      } else if (s.verb == "ENTRY") {
        EntryPoint ep;
        ep.span = s.span;
        if (!s.tokens.empty()) ep.name = to_upper(literal_value(s.tokens[0]));
        for (std::size_t j = 0; j < s.tokens.size(); ++j) {
          if (!s.tokens[j].is_word("USING")) continue;
          for (const CallArg& a : using_args(s.tokens, j + 1)) {
            if (!a.literal) ep.using_args.push_back({a.name, a.line});
          }
          break;
        }
        m_.entry_points.push_back(std::move(ep));
      }
    }
    // Children always follow their parent, so one reverse sweep suffices.
    for (int k = static_cast<int>(m_.statements.size()) - 1; k >= 0; --k) {
      Statement& s = m_.statements[k];
      s.extent.start_line = std::min(s.extent.start_line, s.span.start_line);
      s.extent.end_line = std::max(s.extent.end_line, s.span.end_line);
      if (s.parent >= 0) {
        Statement& p = m_.statements[s.parent];
        p.extent.end_line = std::max(p.extent.end_line, s.extent.end_line);
      }
    }
    for (Paragraph& p : m_.paragraphs) {
      for (int k : p.statements) {
        p.span.end_line =
            std::max(p.span.end_line, m_.statements[k].extent.end_line);
      }
    }
  }

  static void finish_perform(Statement& s) {
    PerformInfo& info = s.perform;
    const Tokens& t = s.tokens;
    std::size_t i = 0;
    if (!info.is_inline && !t.empty()) {
      info.target = t[0].upper;
      i = 1;
      if (i + 1 < t.size() &&
          (t[i].is_word("THRU") || t[i].is_word("THROUGH"))) {
        info.thru = t[i + 1].upper;
        i += 2;
      }
    }
    bool in_condition = false;
    for (; i < t.size(); ++i) {
      const Token& tok = t[i];
      if (tok.is_word("TIMES")) {
        if (info.loop == LoopKind::none) info.loop = LoopKind::times;
        in_condition = false;
      } else if (tok.is_word("VARYING") || tok.is_word("AFTER")) {
        // AFTER also appears in WITH TEST AFTER.
        if (tok.is_word("AFTER") &&
            (i == 0 || t[i - 1].is_word("TEST"))) {
          continue;
        }
        info.loop = LoopKind::varying;
        in_condition = false;
        if (i + 1 < t.size() && t[i + 1].is_word()) {
          info.varying.push_back(t[i + 1].upper);
        }
      } else if (tok.is_word("UNTIL")) {
        if (info.loop == LoopKind::none) info.loop = LoopKind::until;
        in_condition = true;
      } else if (in_condition) {
        info.condition.push_back(tok);
      }
    }
  }

  void finish_call(const Statement& s, int index) {
    if (s.tokens.empty()) return;
    CallSite c;
    const Token& callee = s.tokens[0];
    c.callee_literal = callee.kind == TokenKind::literal;
    c.callee = c.callee_literal ? to_upper(literal_value(callee)) : callee.upper;
    c.span = s.span;
    c.statement = index;
    for (std::size_t j = 1; j < s.tokens.size(); ++j) {
      if (!s.tokens[j].is_word("USING")) continue;
      c.args = using_args(s.tokens, j + 1);
      break;
    }
    m_.call_sites.push_back(std::move(c));
  }

  ProgramModel& m_;
  Tokens t_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
  std::vector<Scope> scopes_;
  int cur_ = -1;
  bool cur_owns_tokens_ = true;
};

}  // namespace

ProgramModel parse_source(const SourceProgram& program) {
  validate_encoding(program.text);
  ProgramModel m;
  m.source_id = program.id;
  const std::vector<LogicalLine> lines = normalize_lines(program, &m.notes);
  Tokens tokens = strip_directives(tokenize(lines, &m.notes), m);
  Parser(m, std::move(tokens)).run();
  return m;
}

}  // namespace cobhint
