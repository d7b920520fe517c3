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

#include "cobhint/analysis.hpp"

#include <algorithm>

#include "cobhint/keywords.hpp"
#include "text_util.hpp"

namespace cobhint {

// ---- free helpers ---------------------------------------------------------

std::vector<std::string> identifiers_in(const Statement& s, std::size_t from,
                                        std::size_t to) {
  std::vector<std::string> out;
  const auto& t = s.tokens;
  to = std::min(to, t.size());
  int depth = 0;
  for (std::size_t i = from; i < to; ++i) {
    const Token& tok = t[i];
    if (tok.kind == TokenKind::lparen) {
      ++depth;
      continue;
    }
    if (tok.kind == TokenKind::rparen) {
      depth = std::max(0, depth - 1);
      continue;
    }
    if (depth > 0 || !tok.is_word()) continue;
    if (tok.upper == "OF" || tok.upper == "IN" || tok.upper == "FUNCTION") {
      ++i;
      continue;
    }
    if (is_reserved(tok.upper)) continue;
    out.push_back(tok.upper);
  }
  return out;
}

std::size_t find_keyword(const Statement& s, std::string_view word,
                         std::size_t from) {
  int depth = 0;
  for (std::size_t i = from; i < s.tokens.size(); ++i) {
    const Token& tok = s.tokens[i];
    if (tok.kind == TokenKind::lparen) ++depth;
    if (tok.kind == TokenKind::rparen) depth = std::max(0, depth - 1);
    if (depth == 0 && tok.upper == word &&
        (tok.kind == TokenKind::word || tok.kind == TokenKind::op)) {
      return i;
    }
  }
  return s.tokens.size();
}

bool is_dli_get(std::string_view c) {
  return c == "GU" || c == "GN" || c == "GNP" || c == "GHU" || c == "GHN" ||
         c == "GHNP";
}

bool is_dli_update(std::string_view c) {
  return c == "ISRT" || c == "DLET" || c == "REPL";
}

bool is_dli_function(std::string_view c) {
  return is_dli_get(c) || is_dli_update(c) || c == "CHKP" || c == "XRST";
}

// ---- trace ----------------------------------------------------------------

namespace {

constexpr std::size_t kEventBudget = 200000;
constexpr int kMaxDepth = 64;

class Walker {
 public:
  Walker(const ProgramModel& m, Trace& out) : m_(m), out_(out) {
    out_.visited.assign(m.paragraphs.size(), false);
  }

  void run() {
    const int n = static_cast<int>(m_.paragraphs.size());
    int jump = -1;
    const Outcome o = walk_list(m_.top_level, false, n - 1, jump);
    if (o == Outcome::stop || n == 0) return;
    walk_range(o == Outcome::jump ? jump : 0, n - 1, false);
  }

 private:
  enum class Outcome { normal, stop, jump };

  Outcome walk_range(int first, int last, bool guarded) {
    if (depth_ >= kMaxDepth) return Outcome::normal;
    ++depth_;
    const int n = static_cast<int>(m_.paragraphs.size());
    std::vector<bool> walked(m_.paragraphs.size(), false);
    int p = first;
    Outcome result = Outcome::normal;
    while (p >= 0 && p < n) {
      if (walked[p]) break;  // a GO TO loop; assume it eventually exits
      walked[p] = true;
      out_.visited[p] = true;
      int jump = -1;
      const Outcome o = walk_list(m_.paragraphs[p].statements, guarded,
                                  std::max(last, p), jump);
      if (o == Outcome::stop) {
        result = Outcome::stop;
        break;
      }
      if (o == Outcome::jump) {
        p = jump;
        continue;
      }
      if (p == last) break;
      ++p;
    }
    --depth_;
    return result;
  }

  Outcome walk_list(const std::vector<int>& list, bool guarded, int range_last,
                    int& jump) {
    for (int k : list) {
      if (out_.events.size() >= kEventBudget) {
        out_.truncated = true;
        return Outcome::stop;
      }
      const Statement& s = m_.statements[k];
      const bool g = guarded || s.condition_guard;
      out_.events.push_back({k, g});
      switch (s.kind) {
        case StatementKind::perform: {
          if (s.perform.is_inline) break;
          const auto range = perform_range(m_, s);
          if (range.first < 0 || active_.count(range) != 0) break;
          active_.insert(range);
          const Outcome o = walk_range(range.first, range.second, g);
          active_.erase(range);
          if (o == Outcome::stop) return Outcome::stop;
          break;
        }
        case StatementKind::go_to: {
          std::vector<int> targets;
          for (const std::string& name : s.goto_targets) {
            const int t = paragraph_index(m_, name);
            if (t >= 0) targets.push_back(t);
          }
          if (!g && targets.size() == 1 && s.goto_targets.size() == 1) {
            jump = targets[0];
            return Outcome::jump;
          }
          for (int t : targets) {
            const std::pair<int, int> key{t, -1 - range_last};
            if (active_.count(key) != 0) continue;
            active_.insert(key);
            const Outcome o = walk_range(t, std::max(t, range_last), true);
            active_.erase(key);
            if (o == Outcome::stop && out_.truncated) return Outcome::stop;
          }
          break;
        }
        case StatementKind::stop_run:
        case StatementKind::goback:
          out_.reached_terminator = true;
          if (!g) return Outcome::stop;
          break;
        default:
          break;
      }
    }
    return Outcome::normal;
  }

  const ProgramModel& m_;
  Trace& out_;
  std::set<std::pair<int, int>> active_;
  int depth_ = 0;
};

bool unguarded_top(const Statement& s) {
  return s.parent < 0 && !s.condition_guard;
}

}  // namespace

Trace execution_trace(const ProgramModel& model) {
  Trace t;
  Walker(model, t).run();
  return t;
}

std::vector<bool> sequential_set(const ProgramModel& m) {
  const int n = static_cast<int>(m.paragraphs.size());
  std::vector<bool> seq(m.paragraphs.size(), false);
  // Returns -2 on a terminator, -1 to fall through, else a GO TO target.
  auto exit_of = [&](const std::vector<int>& list) {
    for (int k : list) {
      const Statement& s = m.statements[k];
      if (!unguarded_top(s)) continue;
      if (s.kind == StatementKind::stop_run || s.kind == StatementKind::goback) {
        return -2;
      }
      if (s.kind == StatementKind::go_to && s.goto_targets.size() == 1) {
        const int t = paragraph_index(m, s.goto_targets[0]);
        return t >= 0 ? t : -2;
      }
    }
    return -1;
  };
  int p = 0;
  const int top = exit_of(m.top_level);
  if (top == -2) return seq;
  if (top >= 0) p = top;
  while (p >= 0 && p < n && !seq[p]) {
    seq[p] = true;
    const int e = exit_of(m.paragraphs[p].statements);
    if (e == -2) break;
    p = e >= 0 ? e : p + 1;
  }
  return seq;
}

// ---- Analysis ---------------------------------------------------------------

Analysis::Analysis(const ProgramModel& m, const SymbolTable& st,
                   const FlowGraph& fg)
    : model(m), symbols(st), flow(fg), trace_(execution_trace(m)) {
  for (const FileEntry& f : m.file_entries) {
    for (const std::string& r : f.records) record_file_[r] = f.logical_name;
  }
  call_of_statement_.assign(m.statements.size(), -1);
  for (int i = 0; i < static_cast<int>(m.call_sites.size()); ++i) {
    const int s = m.call_sites[i].statement;
    if (s >= 0) call_of_statement_[s] = i;
  }
  position_.assign(m.statements.size(), 0);
  for (const Paragraph& p : m.paragraphs) {
    for (std::size_t j = 0; j < p.statements.size(); ++j) {
      position_[p.statements[j]] = static_cast<int>(j);
    }
  }
  for (std::size_t j = 0; j < m.top_level.size(); ++j) {
    position_[m.top_level[j]] = static_cast<int>(j);
  }
}

bool Analysis::is_group(int i) const {
  if (i < 0) return false;
  for (int c : model.data_items[i].children) {
    if (!model.data_items[c].is_condition()) return true;
  }
  return false;
}

bool Analysis::is_numeric(int i) const {
  if (i < 0 || is_group(i)) return false;
  const DataItem& d = model.data_items[i];
  if (d.usage == "COMP-1" || d.usage == "COMP-2" || d.usage == "INDEX") {
    return true;
  }
  if (!d.picture) return false;
  const std::string& pic = *d.picture;
  if (pic.find('9') == std::string::npos) return false;
  for (char c : pic) {
    const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (u == 'X' || u == 'A' || u == 'B' || u == 'N' || u == 'Z' ||
        u == '*' || u == ',' || u == '/' || u == '$' || u == '+' ||
        u == '-' || u == '.') {
      return false;  // alphanumeric or edited
    }
  }
  return true;
}

int Analysis::alphanumeric_length(int i) const {
  if (i < 0 || is_group(i)) return -1;
  const DataItem& d = model.data_items[i];
  if (!d.picture) return -1;
  const std::string& pic = *d.picture;
  int len = 0;
  std::size_t k = 0;
  while (k < pic.size()) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(pic[k])));
    if (c != 'X' && c != 'A') return -1;
    ++k;
    if (k < pic.size() && pic[k] == '(') {
      const std::size_t close = pic.find(')', k);
      if (close == std::string::npos) return -1;
      len += std::atoi(pic.substr(k + 1, close - k - 1).c_str());
      k = close + 1;
    } else {
      len += 1;
    }
  }
  return len;
}

std::vector<int> Analysis::descendants(int i) const {
  std::vector<int> out;
  if (i < 0) return out;
  std::vector<int> stack(model.data_items[i].children.rbegin(),
                         model.data_items[i].children.rend());
  while (!stack.empty()) {
    const int c = stack.back();
    stack.pop_back();
    if (model.data_items[c].is_condition()) continue;
    out.push_back(c);
    const auto& ch = model.data_items[c].children;
    stack.insert(stack.end(), ch.rbegin(), ch.rend());
  }
  return out;
}

std::vector<int> Analysis::ancestors(int i) const {
  std::vector<int> out;
  int p = i >= 0 ? model.data_items[i].parent : -1;
  while (p >= 0) {
    out.push_back(p);
    p = model.data_items[p].parent;
  }
  return out;
}

std::string Analysis::base_name(std::string_view name) const {
  const int i = item(name);
  if (i >= 0 && model.data_items[i].is_condition() &&
      model.data_items[i].parent >= 0) {
    return model.data_items[model.data_items[i].parent].name;
  }
  return std::string(name);
}

std::vector<std::string> Analysis::assigned_items(const Statement& s) const {
  std::vector<std::string> out;
  const std::size_t n = s.tokens.size();
  auto add = [&](const std::vector<std::string>& names) {
    out.insert(out.end(), names.begin(), names.end());
  };
  auto add_status = [&]() {
    for (const std::string& f : files_of(s)) {
      const int fi = symbols.find_file(f);
      if (fi >= 0 && model.file_entries[fi].status_field) {
        out.push_back(*model.file_entries[fi].status_field);
      }
    }
  };
  const std::string& v = s.verb;
  if (v == "MOVE") {
    add(identifiers_in(s, find_keyword(s, "TO") + 1, n));
  } else if (v == "INITIALIZE") {
    add(identifiers_in(s, 0, find_keyword(s, "REPLACING")));
  } else if (v == "SET") {
    const std::size_t end = std::min({find_keyword(s, "TO"),
                                      find_keyword(s, "UP"),
                                      find_keyword(s, "DOWN")});
    add(identifiers_in(s, 0, end));
  } else if (v == "ADD" || v == "SUBTRACT") {
    const std::size_t g = find_keyword(s, "GIVING");
    if (g < n) {
      add(identifiers_in(s, g + 1, n));
    } else {
      add(identifiers_in(s, find_keyword(s, v == "ADD" ? "TO" : "FROM") + 1, n));
    }
  } else if (v == "MULTIPLY" || v == "DIVIDE") {
    const std::size_t g = find_keyword(s, "GIVING");
    if (g < n) {
      add(identifiers_in(s, g + 1, n));
    } else {
      add(identifiers_in(s, find_keyword(s, v == "MULTIPLY" ? "BY" : "INTO") + 1, n));
    }
  } else if (v == "COMPUTE") {
    std::size_t eq = find_keyword(s, "=");
    eq = std::min(eq, find_keyword(s, "EQUAL"));
    add(identifiers_in(s, 0, eq));
  } else if (v == "ACCEPT") {
    add(identifiers_in(s, 0, find_keyword(s, "FROM")));
  } else if (v == "READ" || v == "RETURN") {
    const std::size_t into = find_keyword(s, "INTO");
    if (into < n) add(identifiers_in(s, into + 1, std::min(n, into + 2)));
    for (const std::string& f : files_of(s)) {
      const int fi = symbols.find_file(f);
      if (fi >= 0) add(model.file_entries[fi].records);
    }
    add_status();
  } else if (is_file_op(s)) {
    add_status();
  } else if (v == "CALL") {
    if (const CallSite* c = call_site(static_cast<int>(&s - model.statements.data()))) {
      for (const CallArg& a : c->args) {
        if (!a.literal) out.push_back(a.name);
      }
    }
    const std::size_t r = find_keyword(s, "RETURNING");
    if (r < n) add(identifiers_in(s, r + 1, std::min(n, r + 2)));
  } else if (v == "STRING" || v == "UNSTRING") {
    const std::size_t into = find_keyword(s, "INTO");
    if (into < n) add(identifiers_in(s, into + 1, n));
  } else if (v == "INSPECT") {
    if (!s.tokens.empty() && s.tokens[0].is_word()) out.push_back(s.tokens[0].upper);
    const std::size_t t = find_keyword(s, "TALLYING");
    if (t < n) add(identifiers_in(s, t + 1, std::min(n, t + 2)));
  } else if (v == "PERFORM") {
    add(s.perform.varying);
  } else if (v == "SEARCH") {
    const std::size_t vy = find_keyword(s, "VARYING");
    if (vy < n) add(identifiers_in(s, vy + 1, std::min(n, vy + 2)));
  }
  for (std::string& name : out) name = base_name(name);
  return out;
}

std::vector<std::string> Analysis::arithmetic_reads(const Statement& s) const {
  const std::size_t n = s.tokens.size();
  const std::string& v = s.verb;
  std::vector<std::string> out;
  if (v == "ADD" || v == "SUBTRACT" || v == "MULTIPLY" || v == "DIVIDE") {
    const std::size_t g = find_keyword(s, "GIVING");
    out = identifiers_in(s, 0, g);
    const std::size_t r = find_keyword(s, "REMAINDER");
    if (r < g) out = identifiers_in(s, 0, r);
  } else if (v == "COMPUTE") {
    std::size_t eq = find_keyword(s, "=");
    eq = std::min(eq, find_keyword(s, "EQUAL"));
    if (eq < n) out = identifiers_in(s, eq + 1, n);
  }
  return out;
}

std::vector<std::string> Analysis::read_items(const Statement& s) const {
  std::vector<std::string> out;
  if (s.kind == StatementKind::perform && !s.perform.is_inline) {
    for (const Token& t : s.perform.condition) {
      if (t.is_word() && item(t.upper) >= 0) out.push_back(base_name(t.upper));
    }
    return out;
  }
  const std::vector<std::string> assigned = assigned_items(s);
  const std::vector<std::string> arith = arithmetic_reads(s);
  for (const Token* tok : referenced_identifiers(s)) {
    if (item(tok->upper) < 0) continue;
    const std::string base = base_name(tok->upper);
    const bool target =
        std::find(assigned.begin(), assigned.end(), base) != assigned.end();
    const bool arith_read =
        std::find(arith.begin(), arith.end(), tok->upper) != arith.end();
    if (target && !arith_read) continue;
    out.push_back(base);
  }
  return out;
}

std::vector<std::string> Analysis::moved_sources(const Statement& s) const {
  if (s.verb == "MOVE") return identifiers_in(s, 0, find_keyword(s, "TO"));
  if (s.verb == "WRITE" || s.verb == "REWRITE") {
    const std::size_t f = find_keyword(s, "FROM");
    return identifiers_in(s, f + 1, std::min(s.tokens.size(), f + 2));
  }
  return {};
}

bool Analysis::is_file_op(const Statement& s) const {
  switch (s.kind) {
    case StatementKind::open:
    case StatementKind::close:
    case StatementKind::read:
    case StatementKind::write:
    case StatementKind::rewrite:
      return true;
    default:
      return s.verb == "DELETE" || s.verb == "START";
  }
}

std::vector<std::string> Analysis::files_of(const Statement& s) const {
  std::vector<std::string> out;
  if (s.kind == StatementKind::open || s.kind == StatementKind::close) {
    for (const Token& t : s.tokens) {
      if (t.is_word() && symbols.find_file(t.upper) >= 0) out.push_back(t.upper);
    }
  } else if (s.kind == StatementKind::read || s.verb == "DELETE" ||
             s.verb == "START") {
    if (!s.tokens.empty() && symbols.find_file(s.tokens[0].upper) >= 0) {
      out.push_back(s.tokens[0].upper);
    }
  } else if (s.kind == StatementKind::write || s.kind == StatementKind::rewrite) {
    if (!s.tokens.empty()) {
      auto it = record_file_.find(s.tokens[0].upper);
      if (it != record_file_.end()) out.push_back(it->second);
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> Analysis::open_modes(
    const Statement& s) const {
  std::vector<std::pair<std::string, std::string>> out;
  std::string mode;
  for (const Token& t : s.tokens) {
    if (!t.is_word()) continue;
    if (t.upper == "INPUT" || t.upper == "OUTPUT" || t.upper == "I-O" ||
        t.upper == "EXTEND") {
      mode = t.upper;
    } else if (symbols.find_file(t.upper) >= 0) {
      out.emplace_back(mode, t.upper);
    }
  }
  return out;
}

const CallSite* Analysis::call_site(int statement) const {
  if (statement < 0 || statement >= static_cast<int>(call_of_statement_.size())) {
    return nullptr;
  }
  const int c = call_of_statement_[statement];
  return c < 0 ? nullptr : &model.call_sites[c];
}

bool Analysis::is_dli_call(const Statement& s) const {
  if (s.kind != StatementKind::call) return false;
  const CallSite* c = call_site(static_cast<int>(&s - model.statements.data()));
  return c != nullptr && c->callee_literal &&
         (c->callee == "CBLTDLI" || c->callee == "CEETDLI");
}

std::string Analysis::dli_function(const CallSite& call) const {
  if (call.args.empty()) return {};
  const CallArg& a = call.args[0];
  if (a.literal) return to_upper(trim(a.name));
  const int i = item(a.name);
  if (i < 0 || !model.data_items[i].value) return {};
  return to_upper(trim(*model.data_items[i].value));
}

std::set<std::string> Analysis::file_status_names(const FileEntry& f) const {
  std::set<std::string> names;
  if (!f.status_field) return names;
  names.insert(*f.status_field);
  const int i = item(*f.status_field);
  if (i >= 0) {
    for (int c : model.data_items[i].children) {
      if (model.data_items[c].is_condition()) names.insert(model.data_items[c].name);
    }
  }
  return names;
}

int Analysis::pcb_status_item(std::string_view pcb) const {
  const int p = item(pcb);
  if (p < 0) return -1;
  std::vector<int> elementary;
  for (int d : descendants(p)) {
    if (!is_group(d)) elementary.push_back(d);
  }
  for (int d : elementary) {
    if (model.data_items[d].name.find("STATUS") != std::string::npos) return d;
  }
  if (elementary.size() >= 3 && alphanumeric_length(elementary[2]) == 2) {
    return elementary[2];
  }
  return -1;
}

std::set<std::string> Analysis::pcb_status_names(std::string_view pcb) const {
  std::set<std::string> names;
  const int st = pcb_status_item(pcb);
  if (st < 0) return names;
  names.insert(model.data_items[st].name);
  for (int c : model.data_items[st].children) {
    if (model.data_items[c].is_condition()) names.insert(model.data_items[c].name);
  }
  return names;
}

bool Analysis::condition_references(const Statement& s,
                                    const std::set<std::string>& names) const {
  if (s.kind != StatementKind::if_ && s.kind != StatementKind::evaluate) {
    return false;
  }
  for (const Token& t : s.tokens) {
    if (t.is_word() && names.count(t.upper) != 0) return true;
  }
  return false;
}

std::vector<int> Analysis::range_statements(int first, int last) const {
  std::vector<int> out;
  for (int p = first; p >= 0 && p <= last &&
                      p < static_cast<int>(model.paragraphs.size());
       ++p) {
    const auto& list = model.paragraphs[p].statements;
    out.insert(out.end(), list.begin(), list.end());
  }
  return out;
}

bool Analysis::is_descendant(int statement, int ancestor) const {
  int p = model.statements[statement].parent;
  while (p >= 0) {
    if (p == ancestor) return true;
    p = model.statements[p].parent;
  }
  return false;
}

std::vector<int> Analysis::loop_body(int k) const {
  const Statement& s = model.statements[k];
  std::vector<int> body;
  std::set<std::pair<int, int>> seen;
  if (s.perform.is_inline) {
    for (int j = k + 1; j < static_cast<int>(model.statements.size()); ++j) {
      if (is_descendant(j, k)) body.push_back(j);
    }
  } else {
    const auto range = perform_range(model, s);
    if (range.first < 0) return body;
    seen.insert(range);
    body = range_statements(range.first, range.second);
  }
  for (std::size_t i = 0; i < body.size() && body.size() < 20000; ++i) {
    const Statement& b = model.statements[body[i]];
    if (b.kind != StatementKind::perform || b.perform.is_inline) continue;
    const auto range = perform_range(model, b);
    if (range.first < 0 || !seen.insert(range).second) continue;
    const std::vector<int> more = range_statements(range.first, range.second);
    body.insert(body.end(), more.begin(), more.end());
  }
  return body;
}

// ---- lookahead --------------------------------------------------------------

bool Analysis::exclusive(int origin, int other) const {
  std::map<int, int> chain;  // ancestor -> branch holding the origin
  for (int x = origin; model.statements[x].parent >= 0;
       x = model.statements[x].parent) {
    chain[model.statements[x].parent] = model.statements[x].branch;
  }
  for (int x = other; model.statements[x].parent >= 0;
       x = model.statements[x].parent) {
    auto it = chain.find(model.statements[x].parent);
    if (it != chain.end() && it->second != model.statements[x].branch) {
      return true;
    }
  }
  return false;
}

const std::vector<int>& Analysis::list_of(int para) const {
  return para < 0 ? model.top_level : model.paragraphs[para].statements;
}

Lookahead Analysis::lookahead(int statement, const Pred& check,
                              const Pred& conflict, int hops) const {
  const Statement& s = model.statements[statement];
  const Scan r = scan_list(list_of(s.paragraph), position_[statement] + 1,
                           s.paragraph, true, hops, check, conflict, statement);
  switch (r) {
    case Scan::found: return Lookahead::found;
    case Scan::conflict: return Lookahead::conflict;
    default: return Lookahead::missing;
  }
}

Analysis::Scan Analysis::scan_list(const std::vector<int>& list,
                                   std::size_t from, int para, bool top,
                                   int hops, const Pred& check,
                                   const Pred& conflict, int origin) const {
  for (std::size_t j = from; j < list.size(); ++j) {
    const int k = list[j];
    if (origin >= 0 && exclusive(origin, k)) continue;
    const Statement& s = model.statements[k];
    if (check(k)) return Scan::found;
    if (conflict(k)) return Scan::conflict;
    if (s.kind == StatementKind::perform && !s.perform.is_inline && hops > 0) {
      const auto range = perform_range(model, s);
      if (range.first >= 0) {
        const Scan r = scan_range(range.first, range.second, hops - 1, check,
                                  conflict);
        if (r != Scan::none) return r;
      }
    }
    const bool unguarded = s.parent < 0 && !s.condition_guard;
    if (unguarded && s.kind == StatementKind::go_to &&
        s.goto_targets.size() == 1) {
      const int t = paragraph_index(model, s.goto_targets[0]);
      if (t < 0 || hops == 0) return Scan::missing;
      return scan_list(list_of(t), 0, t, true, hops - 1, check, conflict);
    }
    if (unguarded && (s.kind == StatementKind::stop_run ||
                      s.kind == StatementKind::goback)) {
      return Scan::missing;
    }
  }
  if (!top) return Scan::none;
  return at_end(para, hops, check, conflict);
}

Analysis::Scan Analysis::scan_range(int first, int last, int hops,
                                    const Pred& check,
                                    const Pred& conflict) const {
  for (int p = first; p <= last; ++p) {
    const Scan r = scan_list(list_of(p), 0, p, false, hops, check, conflict);
    if (r != Scan::none) return r;
  }
  return Scan::none;
}

Analysis::Scan Analysis::at_end(int para, int hops, const Pred& check,
                                const Pred& conflict) const {
  if (hops <= 0) return Scan::missing;
  const int n = static_cast<int>(model.paragraphs.size());
  if (para < 0) {
    if (n == 0) return Scan::missing;
    return scan_list(list_of(0), 0, 0, true, hops - 1, check, conflict);
  }
  std::vector<int> callers;
  for (int k = 0; k < static_cast<int>(model.statements.size()); ++k) {
    const Statement& s = model.statements[k];
    if (s.kind != StatementKind::perform || s.perform.is_inline) continue;
    if (perform_range(model, s).second == para) callers.push_back(k);
  }
  std::vector<Scan> results;
  if (!callers.empty()) {
    for (int c : callers) {
      const Statement& cs = model.statements[c];
      results.push_back(scan_list(list_of(cs.paragraph), position_[c] + 1,
                                  cs.paragraph, true, hops - 1, check,
                                  conflict));
    }
  } else if (para + 1 < n && !ends_without_fall_through(model, para)) {
    results.push_back(
        scan_list(list_of(para + 1), 0, para + 1, true, hops - 1, check, conflict));
  } else {
    return Scan::missing;
  }
  bool all_found = true;
  for (Scan r : results) {
    if (r == Scan::conflict) return Scan::conflict;
    if (r != Scan::found) all_found = false;
  }
  return all_found ? Scan::found : Scan::missing;
}

}  // namespace cobhint
