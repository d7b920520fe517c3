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

#include "cobhint/faults.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <regex>
#include <set>
#include <thread>
#include <tuple>

#include "json.hpp"

#include "cobhint/analysis.hpp"
#include "cobhint/errors.hpp"
#include "cobhint/flow.hpp"
#include "cobhint/parser.hpp"
#include "cobhint/rules.hpp"
#include "cobhint/symbols.hpp"
#include "text_util.hpp"

namespace cobhint {

using nlohmann::json;

// ---- generator --------------------------------------------------------------

std::uint64_t SplitMix64::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix(state_);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

namespace {

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

}  // namespace

// ---- spec -------------------------------------------------------------------

std::vector<std::string> injectable_rule_ids() {
  std::vector<std::string> ids;
  for (const RuleDescriptor& r : list_rules()) {
    if (r.injectable) ids.push_back(r.rule_id);
  }
  return ids;
}

void validate(const FaultSpec& spec) {
  if (spec.faults_min < 1) {
    throw ConfigError("faults per program must be >= 1");
  }
  if (spec.faults_max < spec.faults_min) {
    throw ConfigError("faults per program: maximum below minimum");
  }
  for (const std::string& id : spec.rule_ids) {
    const RuleDescriptor* r = find_rule(id);
    if (r == nullptr) throw ConfigError("unknown rule id: " + id);
    if (!r->injectable) throw ConfigError("rule " + id + " is not injectable");
  }
}

// ---- candidate sites ----------------------------------------------------------

namespace {

bool ends_with_period(std::string_view code) {
  const std::string_view t = trim(code);
  return !t.empty() && t.back() == '.';
}

class SiteFinder {
 public:
  explicit SiteFinder(const SourceProgram& program)
      : program_(program),
        lines_(split_physical_lines(program.text)),
        model_(parse_source(program)),
        symbols_(build_symbol_table(model_)),
        flow_(build_flow_graph(model_)),
        an_(model_, symbols_, flow_) {}

  std::vector<FaultSite> sites(std::string_view rule);

 private:
  bool fixed() const { return program_.format == SourceFormat::fixed; }

  std::string line(int n) const {
    return n >= 1 && n <= static_cast<int>(lines_.size()) ? lines_[n - 1]
                                                           : std::string();
  }
  std::string code(int n) const {
    const std::string l = line(n);
    if (!fixed()) return l;
    if (l.size() <= 7) return {};
    return l.substr(7, std::min<std::size_t>(65, l.size() - 7));
  }
  bool fits(const std::string& text) const {
    std::string t = text;
    rtrim_in_place(t);
    return !fixed() || t.size() <= 72;
  }
  std::string indent_of(int n) const {
    const std::string l = line(n);
    std::size_t i = 0;
    while (i < l.size() && l[i] == ' ') ++i;
    return l.substr(0, i);
  }
  std::string lone_period() const {
    return fixed() ? std::string(11, ' ') + "." : std::string(".");
  }

  std::vector<int> with_descendants(int k) const {
    std::vector<int> out{k};
    for (int j = 0; j < static_cast<int>(model_.statements.size()); ++j) {
      if (j != k && an_.is_descendant(j, k)) out.push_back(j);
    }
    return out;
  }

  bool procedure_region_free(int first, int last,
                             const std::vector<int>& allowed) const {
    auto inside = [&](int l) { return l >= first && l <= last; };
    if (inside(model_.procedure_line)) return false;
    for (const Paragraph& p : model_.paragraphs) {
      if (inside(p.span.start_line)) return false;
    }
    for (int j = 0; j < static_cast<int>(model_.statements.size()); ++j) {
      if (std::find(allowed.begin(), allowed.end(), j) != allowed.end()) {
        continue;
      }
      const Statement& s = model_.statements[j];
      if (inside(s.span.start_line)) return false;
      for (const Token& t : s.tokens) {
        if (inside(t.line)) return false;
      }
    }
    return true;
  }

  bool data_region_free(int first, int last,
                        const std::vector<int>& allowed) const {
    auto overlaps = [&](const Span& s) {
      return s.start_line <= last && s.end_line >= first;
    };
    for (int j = 0; j < static_cast<int>(model_.data_items.size()); ++j) {
      if (std::find(allowed.begin(), allowed.end(), j) != allowed.end()) {
        continue;
      }
      if (overlaps(model_.data_items[j].span)) return false;
    }
    for (const FileEntry& f : model_.file_entries) {
      if (overlaps(f.select_span)) return false;
    }
    return true;
  }

  // Blanks [first, last]; a sentence-ending period survives on the last line.
  FaultSite blank(std::string_view rule, int first, int last, bool keep_period,
                  std::string note) const {
    FaultSite site;
    site.rule_id = std::string(rule);
    site.region = {first, last};
    site.note = std::move(note);
    bool period = false;
    for (int l = first; l <= last; ++l) {
      period = period || ends_with_period(code(l));
      site.edits.emplace_back(l, std::string());
    }
    if (keep_period && period) site.edits.back().second = lone_period();
    return site;
  }

  std::optional<FaultSite> remove_statement(std::string_view rule, int k,
                                            std::string note) const {
    const Statement& s = model_.statements[k];
    const int first = s.span.start_line;
    const int last = std::max(s.extent.end_line, s.span.end_line);
    if (first <= 0 || !procedure_region_free(first, last, with_descendants(k))) {
      return std::nullopt;
    }
    bool sole = s.parent >= 0;
    if (sole) {
      for (int j = 0; j < static_cast<int>(model_.statements.size()); ++j) {
        const Statement& o = model_.statements[j];
        if (j != k && o.parent == s.parent && o.branch == s.branch) {
          sole = false;
          break;
        }
      }
    }
    FaultSite site = blank(rule, first, last, true, std::move(note));
    if (sole) {
      // A branch may not be left empty.
      const bool period = ends_with_period(site.edits.back().second);
      for (auto& e : site.edits) e.second.clear();
      site.edits.front().second =
          indent_of(first) + "CONTINUE" + (period ? "." : "");
    }
    return site;
  }

  // The statement that directly follows `k` at the same nesting level.
  int next_sibling(int k) const {
    const Statement& s = model_.statements[k];
    for (int j = k + 1; j < static_cast<int>(model_.statements.size()); ++j) {
      if (an_.is_descendant(j, k)) continue;
      const Statement& o = model_.statements[j];
      if (o.paragraph == s.paragraph && o.parent == s.parent &&
          o.branch == s.branch) {
        return j;
      }
      return -1;
    }
    return -1;
  }

  void status_check_after(std::string_view rule, int k,
                          const std::set<std::string>& names,
                          const std::string& what,
                          std::vector<FaultSite>& out) const {
    if (names.empty()) return;
    const int j = next_sibling(k);
    if (j < 0) return;
    const Statement& c = model_.statements[j];
    if (c.kind != StatementKind::if_ && c.kind != StatementKind::evaluate) return;
    if (!an_.condition_references(c, names)) return;
    if (auto site = remove_statement(
            rule, j,
            "deleted the status test after " + what + " at line " +
                std::to_string(model_.statements[k].span.start_line))) {
      out.push_back(std::move(*site));
    }
  }

  static std::string escape_regex(const std::string& name) {
    std::string escaped;
    for (char c : name) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') {
        escaped += '\\';
      }
      escaped += c;
    }
    return escaped;
  }

  std::string word_regex(const std::string& name) const {
    return "(^|[^A-Za-z0-9-])(" + escape_regex(name) + ")(?=[^A-Za-z0-9-]|$)";
  }

  void a1(std::vector<FaultSite>& out);
  void a2(std::vector<FaultSite>& out);
  void a3(std::vector<FaultSite>& out);
  void a4(std::vector<FaultSite>& out);
  void simple_statements(std::string_view rule, StatementKind kind,
                         std::vector<FaultSite>& out);
  void a6(std::vector<FaultSite>& out);
  void b1(std::vector<FaultSite>& out);
  void b4(std::vector<FaultSite>& out);
  void c1(std::vector<FaultSite>& out);
  void c2(std::vector<FaultSite>& out);
  void c4(std::vector<FaultSite>& out);
  void c5(std::vector<FaultSite>& out);
  void c6(std::vector<FaultSite>& out);
  void d1(std::vector<FaultSite>& out);
  void d2(std::vector<FaultSite>& out);
  void d3(std::vector<FaultSite>& out);
  void d4(std::vector<FaultSite>& out);
  void d5(std::vector<FaultSite>& out);
  void dli_removal(std::string_view rule, std::string_view function,
                   std::vector<FaultSite>& out);
  void e2(std::vector<FaultSite>& out);
  void f1(std::vector<FaultSite>& out);

  const SourceProgram& program_;
  std::vector<std::string> lines_;
  ProgramModel model_;
  SymbolTable symbols_;
  FlowGraph flow_;
  Analysis an_;
};

std::vector<FaultSite> SiteFinder::sites(std::string_view rule) {
  std::vector<FaultSite> out;
  if (rule == "A1") a1(out);
  else if (rule == "A2") a2(out);
  else if (rule == "A3") a3(out);
  else if (rule == "A4") a4(out);
  else if (rule == "A5") simple_statements(rule, StatementKind::open, out);
  else if (rule == "A6") a6(out);
  else if (rule == "B1") b1(out);
  else if (rule == "B3") simple_statements(rule, StatementKind::initialize, out);
  else if (rule == "B4") b4(out);
  else if (rule == "C1") c1(out);
  else if (rule == "C2") c2(out);
  else if (rule == "C4") c4(out);
  else if (rule == "C5") c5(out);
  else if (rule == "C6") c6(out);
  else if (rule == "D1") d1(out);
  else if (rule == "D2") d2(out);
  else if (rule == "D3") d3(out);
  else if (rule == "D4") d4(out);
  else if (rule == "D5") d5(out);
  else if (rule == "E1") dli_removal(rule, "XRST", out);
  else if (rule == "E2") e2(out);
  else if (rule == "E4") dli_removal(rule, "CHKP", out);
  else if (rule == "F1") f1(out);
  return out;
}

void SiteFinder::a1(std::vector<FaultSite>& out) {
  static const std::regex kClause(
      R"(^(FILE\s+)?STATUS(\s+IS)?\s+[A-Z0-9-]+\s*\.?$)");
  for (const FileEntry& f : model_.file_entries) {
    if (!f.status_field || f.status_line <= 0) continue;
    if (f.status_line == f.select_span.start_line) continue;
    const std::string text = to_upper(trim(code(f.status_line)));
    if (!std::regex_match(text, kClause)) continue;
    out.push_back(blank("A1", f.status_line, f.status_line, true,
                        "deleted the FILE STATUS clause of " + f.logical_name));
  }
}

void SiteFinder::a2(std::vector<FaultSite>& out) {
  for (int k = 0; k < static_cast<int>(model_.statements.size()); ++k) {
    const Statement& s = model_.statements[k];
    if (s.kind != StatementKind::open) continue;
    std::set<std::string> names;
    for (const auto& [mode, file] : an_.open_modes(s)) {
      const int fi = symbols_.find_file(file);
      if (fi < 0) continue;
      const auto n = an_.file_status_names(model_.file_entries[fi]);
      names.insert(n.begin(), n.end());
    }
    status_check_after("A2", k, names, "OPEN", out);
  }
}

void SiteFinder::a4(std::vector<FaultSite>& out) {
  for (int k = 0; k < static_cast<int>(model_.statements.size()); ++k) {
    const Statement& s = model_.statements[k];
    if (s.kind != StatementKind::write || s.has_invalid_key) continue;
    std::set<std::string> names;
    for (const std::string& file : an_.files_of(s)) {
      const int fi = symbols_.find_file(file);
      if (fi < 0) continue;
      const auto n = an_.file_status_names(model_.file_entries[fi]);
      names.insert(n.begin(), n.end());
    }
    status_check_after("A4", k, names, "WRITE", out);
  }
}

void SiteFinder::d2(std::vector<FaultSite>& out) {
  for (int k = 0; k < static_cast<int>(model_.statements.size()); ++k) {
    const Statement& s = model_.statements[k];
    if (!an_.is_dli_call(s)) continue;
    const CallSite* call = an_.call_site(k);
    if (call == nullptr || call->args.size() < 2) continue;
    status_check_after("D2", k, an_.pcb_status_names(call->args[1].name),
                       an_.dli_function(*call) + " call", out);
  }
}

void SiteFinder::a3(std::vector<FaultSite>& out) {
  for (int k = 0; k < static_cast<int>(model_.statements.size()); ++k) {
    const Statement& s = model_.statements[k];
    if (s.kind != StatementKind::read || s.has_invalid_key) continue;
    for (std::size_t p = 0; p < s.phrases.size(); ++p) {
      if (s.phrases[p].name != "AT END") continue;
      const int first = s.phrases[p].span.start_line;
      if (first <= s.span.start_line) continue;
      int last = first;
      std::vector<int> allowed{k};
      for (int j = k + 1; j < static_cast<int>(model_.statements.size()); ++j) {
        const Statement& o = model_.statements[j];
        if (o.parent == k && o.branch == static_cast<int>(p) + 1) {
          for (int d : with_descendants(j)) {
            allowed.push_back(d);
            last = std::max(last, model_.statements[d].extent.end_line);
            last = std::max(last, model_.statements[d].span.end_line);
          }
        }
      }
      // Other phrases of the READ must stay outside the region.
      bool clash = false;
      for (std::size_t q = 0; q < s.phrases.size(); ++q) {
        if (q != p && s.phrases[q].span.start_line >= first &&
            s.phrases[q].span.start_line <= last) {
          clash = true;
        }
      }
      if (clash || last >= s.extent.end_line ||
          !procedure_region_free(first, last, allowed)) {
        continue;
      }
      out.push_back(blank("A3", first, last, true,
                          "deleted the AT END phrase of the READ at line " +
                              std::to_string(s.span.start_line)));
    }
  }
}

void SiteFinder::simple_statements(std::string_view rule, StatementKind kind,
                                   std::vector<FaultSite>& out) {
  for (int k = 0; k < static_cast<int>(model_.statements.size()); ++k) {
    const Statement& s = model_.statements[k];
    if (s.kind != kind) continue;
    if (auto site = remove_statement(
            rule, k,
            "deleted " + s.verb + " " + join(s.operands, " ") + " at line " +
                std::to_string(s.span.start_line))) {
      out.push_back(std::move(*site));
    }
  }
}

void SiteFinder::a6(std::vector<FaultSite>& out) {
  simple_statements("A6", StatementKind::close, out);
  // A multi-file CLOSE loses a single file name.
  for (const Statement& s : model_.statements) {
    if (s.kind != StatementKind::close || s.operands.size() < 2) continue;
    if (s.span.start_line != s.span.end_line) continue;
    const std::string text = line(s.span.start_line);
    for (const std::string& file : s.operands) {
      const std::regex re(
          R"(\s+)" + escape_regex(file) + "(?=[^A-Za-z0-9-]|$)",
          std::regex::icase);
      const auto begin = std::sregex_iterator(text.begin(), text.end(), re);
      if (std::distance(begin, std::sregex_iterator()) != 1) continue;
      FaultSite site;
      site.rule_id = "A6";
      site.region = s.span;
      site.note = "dropped " + file + " from the CLOSE at line " +
                  std::to_string(s.span.start_line);
      site.edits.emplace_back(s.span.start_line,
                              std::regex_replace(text, re, ""));
      out.push_back(std::move(site));
    }
  }
}

void SiteFinder::b1(std::vector<FaultSite>& out) {
  static const std::regex kValue(
      R"(\s+VALUE(\s+IS)?\s+(ZEROES|ZEROS|ZERO|SPACES|SPACE|'[^']*'|"[^"]*"|[-+]?[0-9]*\.?[0-9]+))",
      std::regex::icase);
  for (const DataItem& d : model_.data_items) {
    if (d.is_condition() || !d.has_value_clause || d.occurs) continue;
    if (d.section != DataSection::working_storage &&
        d.section != DataSection::local_storage) {
      continue;
    }
    if (d.span.start_line != d.span.end_line) continue;
    const int item = symbols_.find_data(d.name);
    if (item < 0 || !an_.is_numeric(item)) continue;
    const std::string text = line(d.span.start_line);
    std::smatch m;
    if (!std::regex_search(text, m, kValue)) continue;
    FaultSite site;
    site.rule_id = "B1";
    site.region = d.span;
    site.note = "deleted the VALUE clause of " + d.name;
    site.edits.emplace_back(d.span.start_line,
                            m.prefix().str() + m.suffix().str());
    out.push_back(std::move(site));
  }
}

void SiteFinder::b4(std::vector<FaultSite>& out) {
  for (const FileEntry& f : model_.file_entries) {
    if (!f.status_field || f.status_line <= 0) continue;
    if (symbols_.find_data(*f.status_field) < 0) continue;
    std::string misspelt = *f.status_field + "X";
    if (symbols_.declared(misspelt)) misspelt = *f.status_field + "Z";
    if (symbols_.declared(misspelt) || misspelt.size() > 30) continue;
    const std::string text = line(f.status_line);
    const std::regex re(word_regex(*f.status_field), std::regex::icase);
    if (std::distance(std::sregex_iterator(text.begin(), text.end(), re),
                      std::sregex_iterator()) != 1) {
      continue;
    }
    const std::string edited = std::regex_replace(
        text, re, "$1" + misspelt, std::regex_constants::format_first_only);
    if (!fits(edited)) continue;
    FaultSite site;
    site.rule_id = "B4";
    site.region = {f.status_line, f.status_line};
    site.note = "FILE STATUS of " + f.logical_name + " now names " + misspelt;
    site.edits.emplace_back(f.status_line, edited);
    out.push_back(std::move(site));
  }
}

void SiteFinder::c1(std::vector<FaultSite>& out) {
  const int n = static_cast<int>(model_.statements.size());
  for (int k = 0; k < n; ++k) {
    const Statement& s = model_.statements[k];
    if (s.kind != StatementKind::perform || s.perform.thru.empty()) continue;
    const auto [a, b] = perform_range(model_, s);
    if (a < 0 || b < a) continue;
    int thru_line = 0;
    for (const Token& t : s.tokens) {
      if (t.is_word(s.perform.thru)) thru_line = t.line;
    }
    if (thru_line == 0) continue;
    std::set<int> targets;
    for (int j = 0; j < n; ++j) {
      const Statement& o = model_.statements[j];
      if (j == k || o.kind != StatementKind::perform || o.perform.is_inline) {
        continue;
      }
      const auto [c, d] = perform_range(model_, o);
      if (c > b) targets.insert(c);
    }
    for (int c : targets) {
      const std::string& name = model_.paragraphs[c].name;
      const std::regex re("(THRU|THROUGH)(\\s+)" + s.perform.thru +
                              "(?=[^A-Za-z0-9-]|$)",
                          std::regex::icase);
      const std::string text = line(thru_line);
      const std::string edited =
          std::regex_replace(text, re, "$1$2" + name,
                             std::regex_constants::format_first_only);
      if (edited == text || !fits(edited)) continue;
      FaultSite site;
      site.rule_id = "C1";
      site.region = {thru_line, thru_line};
      site.note = "PERFORM " + s.perform.target + " THRU " + s.perform.thru +
                  " now ends at " + name;
      site.edits.emplace_back(thru_line, edited);
      out.push_back(std::move(site));
    }
  }
}

void SiteFinder::c2(std::vector<FaultSite>& out) {
  // A leading SECTION header owns no statements; skip to its first paragraph.
  auto main = std::find_if(model_.paragraphs.begin(), model_.paragraphs.end(),
                           [](const Paragraph& p) { return !p.statements.empty(); });
  if (main == model_.paragraphs.end()) return;
  const std::vector<int>& list = main->statements;
  for (auto it = list.rbegin(); it != list.rend(); ++it) {
    const Statement& s = model_.statements[*it];
    if (s.parent >= 0) continue;
    if (s.kind == StatementKind::stop_run || s.kind == StatementKind::goback) {
      if (auto site = remove_statement(
              "C2", *it,
              "deleted the " + s.verb + " that ends the main paragraph")) {
        out.push_back(std::move(*site));
      }
    }
    break;
  }
}

void SiteFinder::c4(std::vector<FaultSite>& out) {
  FaultSite all;
  all.rule_id = "C4";
  int count = 0;
  for (int k = 0; k < static_cast<int>(model_.statements.size()); ++k) {
    const Statement& s = model_.statements[k];
    if (s.kind != StatementKind::stop_run && s.kind != StatementKind::goback) {
      continue;
    }
    auto site = remove_statement("C4", k, "");
    if (!site) return;
    all.edits.insert(all.edits.end(), site->edits.begin(), site->edits.end());
    ++count;
  }
  if (count == 0) return;
  all.region = {all.edits.front().first, all.edits.back().first};
  all.note = "deleted all " + std::to_string(count) +
             " STOP RUN and GOBACK statements";
  out.push_back(std::move(all));
}

void SiteFinder::c5(std::vector<FaultSite>& out) {
  for (int p = 1; p < static_cast<int>(model_.paragraphs.size()); ++p) {
    int performer = -1;
    int uses = 0;
    for (int k = 0; k < static_cast<int>(model_.statements.size()); ++k) {
      const Statement& s = model_.statements[k];
      if (s.kind == StatementKind::perform && !s.perform.is_inline) {
        const auto [a, b] = perform_range(model_, s);
        if (a <= p && p <= b) {
          ++uses;
          performer = k;
        }
      }
      if (s.kind == StatementKind::go_to) {
        for (const std::string& t : s.goto_targets) {
          if (paragraph_index(model_, t) == p) uses += 2;
        }
      }
    }
    if (uses != 1) continue;
    if (model_.statements[performer].perform.target !=
        model_.paragraphs[p].name) {
      continue;
    }
    if (auto site = remove_statement(
            "C5", performer,
            "deleted the only PERFORM of " + model_.paragraphs[p].name)) {
      out.push_back(std::move(*site));
    }
  }
}

void SiteFinder::c6(std::vector<FaultSite>& out) {
  for (int k = 0; k < static_cast<int>(model_.statements.size()); ++k) {
    const Statement& s = model_.statements[k];
    if (s.kind != StatementKind::perform || s.perform.loop != LoopKind::until) {
      continue;
    }
    std::set<std::string> bases;
    for (const Token& t : s.perform.condition) {
      if (t.is_word() && symbols_.find_data(t.upper) >= 0) {
        bases.insert(an_.base_name(t.upper));
      }
    }
    if (bases.empty()) continue;
    std::vector<int> assigners;
    for (int j : an_.loop_body(k)) {
      for (const std::string& a : an_.assigned_items(model_.statements[j])) {
        if (bases.count(an_.base_name(a)) != 0) {
          assigners.push_back(j);
          break;
        }
      }
    }
    if (assigners.size() != 1) continue;
    const Statement& a = model_.statements[assigners.front()];
    if (a.kind == StatementKind::read || a.kind == StatementKind::call) continue;
    if (auto site = remove_statement(
            "C6", assigners.front(),
            "deleted the only update of the loop condition of the PERFORM "
            "at line " + std::to_string(s.span.start_line))) {
      out.push_back(std::move(*site));
    }
  }
}

void SiteFinder::d1(std::vector<FaultSite>& out) {
  auto consider = [&](const std::vector<NamedRef>& args, int header_line,
                      const std::string& where) {
    if (args.size() < 2) return;
    for (const NamedRef& a : args) {
      if (a.line == header_line) continue;
      std::string t = to_upper(trim(code(a.line)));
      if (!t.empty() && t.back() == '.') t.pop_back();
      if (std::string(trim(t)) != a.name) continue;
      out.push_back(blank("D1", a.line, a.line, true,
                          "removed " + a.name + " from the " + where +
                              " USING list"));
    }
  };
  for (const EntryPoint& e : model_.entry_points) {
    consider(e.using_args, e.span.start_line, "ENTRY");
  }
  consider(model_.procedure_using, model_.procedure_line, "PROCEDURE DIVISION");
}

void SiteFinder::d3(std::vector<FaultSite>& out) {
  std::set<std::string> seen;
  for (const CallSite& call : model_.call_sites) {
    if (call.statement < 0 || !an_.is_dli_call(model_.statements[call.statement])) {
      continue;
    }
    for (std::size_t i = 3; i < call.args.size(); ++i) {
      const CallArg& a = call.args[i];
      if (a.literal || !seen.insert(a.name).second) continue;
      const int item = symbols_.find_data(a.name);
      if (item < 0 || model_.data_items[item].level != 1) continue;
      std::vector<int> allowed{item};
      std::vector<int> stack{item};
      int last = model_.data_items[item].span.end_line;
      while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        for (int c : model_.data_items[x].children) {
          allowed.push_back(c);
          stack.push_back(c);
          last = std::max(last, model_.data_items[c].span.end_line);
        }
      }
      const int first = model_.data_items[item].span.start_line;
      if (!data_region_free(first, last, allowed)) continue;
      out.push_back(blank("D3", first, last, false,
                          "deleted the declaration of SSA " + a.name));
    }
  }
}

void SiteFinder::d4(std::vector<FaultSite>& out) {
  for (const CallSite& call : model_.call_sites) {
    if (call.statement < 0 || call.args.size() < 3) continue;
    const Statement& s = model_.statements[call.statement];
    if (!an_.is_dli_call(s)) continue;
    const int first = call.args[2].line;
    const int last = call.args.back().line;
    if (first <= call.args[1].line || first <= s.span.start_line) continue;
    std::set<std::string> dropped;
    for (std::size_t i = 2; i < call.args.size(); ++i) {
      dropped.insert(call.args[i].name);
    }
    bool ok = true;
    for (int l = first; l <= last && ok; ++l) {
      std::string t = to_upper(code(l));
      std::replace(t.begin(), t.end(), ',', ' ');
      for (const std::string& w : split(std::string(trim(t)), ' ')) {
        std::string word = w;
        if (!word.empty() && word.back() == '.') word.pop_back();
        if (!word.empty() && dropped.count(word) == 0) ok = false;
      }
    }
    if (!ok || !procedure_region_free(first, last, with_descendants(call.statement))) {
      continue;
    }
    out.push_back(blank("D4", first, last, true,
                        "dropped the trailing arguments of the " +
                            an_.dli_function(call) + " call at line " +
                            std::to_string(s.span.start_line)));
  }
}

void SiteFinder::d5(std::vector<FaultSite>& out) {
  std::set<std::string> seen;
  for (const CallSite& call : model_.call_sites) {
    if (call.statement < 0 || call.args.empty()) continue;
    if (!an_.is_dli_call(model_.statements[call.statement])) continue;
    const CallArg& fn = call.args.front();
    if (fn.literal || !seen.insert(fn.name).second) continue;
    const int item = symbols_.find_data(fn.name);
    if (item < 0) continue;
    const DataItem& d = model_.data_items[item];
    if (!d.value || d.span.start_line != d.span.end_line) continue;
    const std::string old_code(trim(*d.value));
    if (old_code.size() < 2) continue;
    std::string new_code = old_code;
    std::swap(new_code[new_code.size() - 1], new_code[new_code.size() - 2]);
    if (new_code == old_code || is_dli_function(new_code)) continue;
    std::string text = line(d.span.start_line);
    const std::size_t pos = text.find("'" + old_code);
    if (pos == std::string::npos) continue;
    text.replace(pos + 1, old_code.size(), new_code);
    FaultSite site;
    site.rule_id = "D5";
    site.region = d.span;
    site.note = "function code of " + fn.name + " changed from " + old_code +
                " to " + new_code;
    site.edits.emplace_back(d.span.start_line, text);
    out.push_back(std::move(site));
  }
}

void SiteFinder::dli_removal(std::string_view rule, std::string_view function,
                             std::vector<FaultSite>& out) {
  for (const CallSite& call : model_.call_sites) {
    if (call.statement < 0) continue;
    if (!an_.is_dli_call(model_.statements[call.statement])) continue;
    if (an_.dli_function(call) != function) continue;
    if (auto site = remove_statement(
            rule, call.statement,
            "deleted the " + std::string(function) + " call at line " +
                std::to_string(call.span.start_line))) {
      out.push_back(std::move(*site));
    }
  }
}

void SiteFinder::e2(std::vector<FaultSite>& out) {
  std::set<int> xrst_paragraphs;
  for (const CallSite& call : model_.call_sites) {
    if (call.statement < 0) continue;
    const Statement& s = model_.statements[call.statement];
    if (an_.is_dli_call(s) && an_.dli_function(call) == "XRST") {
      xrst_paragraphs.insert(s.paragraph);
    }
  }
  if (xrst_paragraphs.empty() || model_.paragraphs.empty()) return;
  std::vector<int> top;
  for (int k : model_.paragraphs.front().statements) {
    if (model_.statements[k].parent < 0) top.push_back(k);
  }
  for (std::size_t i = 0; i + 1 < top.size(); ++i) {
    const Statement& a = model_.statements[top[i]];
    const Statement& b = model_.statements[top[i + 1]];
    if (a.kind != StatementKind::perform || a.perform.is_inline) continue;
    const auto [first, last] = perform_range(model_, a);
    bool holds = false;
    for (int p : xrst_paragraphs) holds = holds || (first <= p && p <= last);
    if (!holds) continue;
    const int la = a.span.start_line;
    const int lb = b.span.start_line;
    if (a.extent.end_line != la || b.extent.end_line != lb || lb != la + 1) {
      continue;
    }
    if (!procedure_region_free(la, lb, {top[i], top[i + 1]})) continue;
    FaultSite site;
    site.rule_id = "E2";
    site.region = {la, lb};
    site.note = "moved PERFORM " + a.perform.target + " after the " + b.verb +
                " on line " + std::to_string(lb);
    std::string first_text = line(lb);
    std::string second_text = line(la);
    // The sentence-ending period stays on the lower line.
    if (ends_with_period(code(lb)) && !ends_with_period(code(la))) {
      rtrim_in_place(first_text);
      first_text.pop_back();
      rtrim_in_place(second_text);
      second_text += ".";
    }
    site.edits.emplace_back(la, first_text);
    site.edits.emplace_back(lb, second_text);
    out.push_back(std::move(site));
  }
}

void SiteFinder::f1(std::vector<FaultSite>& out) {
  for (int k = 0; k < static_cast<int>(model_.statements.size()); ++k) {
    const Statement& s = model_.statements[k];
    if (s.kind != StatementKind::move) continue;
    if (s.span.start_line != s.span.end_line) continue;
    for (const std::string& src : an_.moved_sources(s)) {
      if (symbols_.find_data(src) < 0) continue;
      std::string misspelt = src + "X";
      if (symbols_.declared(misspelt)) misspelt = src + "Z";
      if (symbols_.declared(misspelt) || misspelt.size() > 30) continue;
      const std::string text = line(s.span.start_line);
      const std::regex re(word_regex(src), std::regex::icase);
      const auto begin = std::sregex_iterator(text.begin(), text.end(), re);
      if (std::distance(begin, std::sregex_iterator()) != 1) continue;
      const std::string edited = std::regex_replace(
          text, re, "$1" + misspelt, std::regex_constants::format_first_only);
      if (!fits(edited)) continue;
      FaultSite site;
      site.rule_id = "F1";
      site.region = s.span;
      site.note = "misspelled " + src + " as " + misspelt;
      site.edits.emplace_back(s.span.start_line, edited);
      out.push_back(std::move(site));
      break;
    }
  }
}

}  // namespace

std::vector<FaultSite> candidate_sites(const SourceProgram& program,
                                       std::string_view rule_id) {
  SiteFinder finder(program);
  return finder.sites(rule_id);
}

std::string apply_site(const SourceProgram& program, const FaultSite& site) {
  std::vector<std::string> lines = split_physical_lines(program.text);
  for (const auto& [n, text] : site.edits) {
    if (n >= 1 && n <= static_cast<int>(lines.size())) lines[n - 1] = text;
  }
  std::string out = join(lines, "\n");
  if (!program.text.empty() && (program.text.back() == '\n' ||
                                program.text.back() == '\r')) {
    out += "\n";
  }
  return out;
}

// ---- injection ----------------------------------------------------------------

namespace {

using FindingKey = std::tuple<std::string, int, int, std::string>;

std::set<FindingKey> keys_of(const std::vector<Finding>& findings) {
  std::set<FindingKey> keys;
  for (const Finding& f : findings) {
    keys.emplace(f.rule_id, f.span.start_line, f.span.end_line, f.message);
  }
  return keys;
}

// The one finding added by a mutation, when it is the only change and has
// the wanted rule.
std::optional<FindingKey> sole_addition(const std::set<FindingKey>& before,
                                        const std::set<FindingKey>& after,
                                        const std::string& rule) {
  if (after.size() != before.size() + 1) return std::nullopt;
  std::optional<FindingKey> added;
  for (const FindingKey& k : after) {
    if (before.count(k) != 0) continue;
    if (added) return std::nullopt;
    added = k;
  }
  if (!added || std::get<0>(*added) != rule) return std::nullopt;
  return added;
}

Span hull(Span a, int start, int end) {
  return {std::min(a.start_line, start), std::max(a.end_line, end)};
}

std::string text_fingerprint(const SourceProgram& p) {
  return p.id + "\x1f" + std::to_string(std::hash<std::string>{}(p.text)) +
         "\x1f" + std::to_string(p.text.size());
}

}  // namespace

FaultInjector::FaultInjector(FaultSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  if (spec_.rule_ids.empty()) spec_.rule_ids = injectable_rule_ids();
  std::sort(spec_.rule_ids.begin(), spec_.rule_ids.end());
  spec_.rule_ids.erase(std::unique(spec_.rule_ids.begin(), spec_.rule_ids.end()),
                       spec_.rule_ids.end());
}

const std::map<std::string, std::vector<FaultSite>>& FaultInjector::valid_sites(
    const SourceProgram& clean) {
  const std::string key = text_fingerprint(clean);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const std::vector<Finding> base = check_program(clean);
  if (has_errors(base)) {
    throw ConfigError("fixture " + clean.id +
                      " is not clean; it already has error findings");
  }
  const std::set<FindingKey> base_keys = keys_of(base);
  SiteFinder finder(clean);
  std::map<std::string, std::vector<FaultSite>> valid;
  for (const std::string& rule : spec_.rule_ids) {
    for (FaultSite& site : finder.sites(rule)) {
      SourceProgram mutated = clean;
      mutated.text = apply_site(clean, site);
      if (sole_addition(base_keys, keys_of(check_program(mutated)), rule)) {
        valid[rule].push_back(std::move(site));
      }
    }
  }
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(key, std::move(valid)).first->second;
}

InjectionResult FaultInjector::inject(const SourceProgram& clean,
                                      std::uint64_t index,
                                      const std::string& program_id) {
  const auto& sites = valid_sites(clean);
  SplitMix64 rng(spec_.seed ^ SplitMix64::mix(index + 1));
  const int k = spec_.faults_min +
                static_cast<int>(rng.below(static_cast<std::uint64_t>(
                    spec_.faults_max - spec_.faults_min + 1)));

  InjectionResult result;
  result.program = clean;
  result.program.id = program_id.empty() ? clean.id : program_id;
  result.program.origin = SourceOrigin::injected;
  result.truth.program_id = result.program.id;
  result.truth.fixture = clean.id;

  std::vector<std::string> order;
  for (const std::string& rule : spec_.rule_ids) {
    if (sites.count(rule) != 0) order.push_back(rule);
  }
  shuffle(order, rng);

  std::set<FindingKey> current = keys_of(check_program(result.program));
  std::set<int> reserved;  // lines no later edit may touch
  std::set<std::string> used;
  auto place = [&](const std::string& rule) {
    std::vector<const FaultSite*> candidates;
    for (const FaultSite& s : sites.at(rule)) candidates.push_back(&s);
    shuffle(candidates, rng);
    for (const FaultSite* site : candidates) {
      bool clash = false;
      for (const auto& [n, text] : site->edits) {
        if (reserved.count(n) != 0) clash = true;
      }
      if (clash) continue;
      SourceProgram mutated = result.program;
      mutated.text = apply_site(result.program, *site);
      const std::set<FindingKey> after = keys_of(check_program(mutated));
      const auto added = sole_addition(current, after, rule);
      if (!added) continue;
      const Span span =
          hull(site->region, std::get<1>(*added), std::get<2>(*added));
      // Later edits may land inside the hull but not on these lines.
      for (const auto& [n, text] : site->edits) reserved.insert(n);
      for (int l = std::get<1>(*added); l <= std::get<2>(*added); ++l) {
        reserved.insert(l);
      }
      result.program = std::move(mutated);
      current = after;
      result.truth.injected.push_back({rule, span, site->note});
      return true;
    }
    return false;
  };
  auto full = [&] {
    return static_cast<int>(result.truth.injected.size()) >= k;
  };
  // Distinct rules first; a rule repeats only when the others run out.
  for (const std::string& rule : order) {
    if (full()) break;
    if (place(rule)) used.insert(rule);
  }
  for (const std::string& rule : order) {
    if (full()) break;
    if (used.count(rule) != 0) place(rule);
  }
  if (!full()) {
    for (const std::string& rule : order) {
      if (used.count(rule) != 0) continue;
      result.truth.skipped.push_back(
          {rule, "every site conflicts with faults already placed"});
    }
  }
  if (static_cast<int>(result.truth.injected.size()) < k) {
    result.truth.skipped.push_back(
        {"*", "placed " + std::to_string(result.truth.injected.size()) +
                  " of " + std::to_string(k) +
                  " faults; no further rule applies to fixture " + clean.id});
  }
  std::sort(result.truth.injected.begin(), result.truth.injected.end(),
            [](const InjectedFault& a, const InjectedFault& b) {
              return std::tie(a.span.start_line, a.rule_id) <
                     std::tie(b.span.start_line, b.rule_id);
            });
  return result;
}

InjectionResult inject_faults(const SourceProgram& clean, const FaultSpec& spec,
                              std::uint64_t index,
                              const std::string& program_id) {
  FaultInjector injector(spec);
  return injector.inject(clean, index, program_id);
}

Corpus build_corpus(std::vector<SourceProgram> fixtures, const FaultSpec& spec,
                    int n, int jobs) {
  if (fixtures.empty()) throw ConfigError("build_corpus needs a fixture");
  if (n < 1) throw ConfigError("corpus size must be >= 1");
  std::sort(fixtures.begin(), fixtures.end(),
            [](const SourceProgram& a, const SourceProgram& b) {
              return a.id < b.id;
            });
  FaultInjector injector(spec);
  for (const SourceProgram& f : fixtures) injector.valid_sites(f);

  Corpus corpus;
  corpus.seed = spec.seed;
  corpus.programs.resize(n);
  corpus.truth.resize(n);
  auto build_one = [&](int i) {
    const SourceProgram& fixture = fixtures[i % fixtures.size()];
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "p%03d_", i);
    InjectionResult r = injector.inject(fixture, static_cast<std::uint64_t>(i),
                                        prefix + fixture.id);
    corpus.programs[i] = std::move(r.program);
    corpus.truth[i] = std::move(r.truth);
  };
  const int workers = std::max(1, std::min(jobs, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) build_one(i);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (int i = w; i < n; i += workers) build_one(i);
      });
    }
    for (std::thread& t : threads) t.join();
  }
  return corpus;
}

// ---- manifest -----------------------------------------------------------------

std::string manifest_to_json(const Manifest& m) {
  json programs = json::array();
  for (const GroundTruth& g : m.programs) {
    json injected = json::array();
    for (const InjectedFault& f : g.injected) {
      injected.push_back({{"rule_id", f.rule_id},
                          {"start_line", f.span.start_line},
                          {"end_line", f.span.end_line},
                          {"note", f.note}});
    }
    json skipped = json::array();
    for (const SkippedFault& s : g.skipped) {
      skipped.push_back({{"rule_id", s.rule_id}, {"reason", s.reason}});
    }
    programs.push_back({{"program_id", g.program_id},
                        {"fixture", g.fixture},
                        {"injected", injected},
                        {"skipped", skipped}});
  }
  const json j = {
      {"schema_version", 1}, {"seed", m.seed}, {"programs", programs}};
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema_version").get<int>() != 1) {
      throw ProtocolError("unsupported manifest schema_version",
                          std::string(text));
    }
    Manifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const json& p : j.at("programs")) {
      GroundTruth g;
      g.program_id = p.at("program_id").get<std::string>();
      g.fixture = p.at("fixture").get<std::string>();
      for (const json& f : p.at("injected")) {
        g.injected.push_back({f.at("rule_id").get<std::string>(),
                              {f.at("start_line").get<int>(),
                               f.at("end_line").get<int>()},
                              f.at("note").get<std::string>()});
      }
      for (const json& s : p.at("skipped")) {
        g.skipped.push_back(
            {s.at("rule_id").get<std::string>(), s.at("reason").get<std::string>()});
      }
      m.programs.push_back(std::move(g));
    }
    return m;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed manifest: ") + e.what(),
                        std::string(text));
  }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
  }
  for (const SourceProgram& p : corpus.programs) {
    std::ofstream out(dir / (p.id + ".cbl"), std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + (dir / (p.id + ".cbl")).string());
    out << p.text;
  }
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write manifest in " + dir.string());
  out << manifest_to_json({corpus.seed, corpus.truth});
}

}  // namespace cobhint
