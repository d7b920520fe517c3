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

#include "cobhint/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "cobhint/errors.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace cobhint {

namespace {

using nlohmann::json;

constexpr int kUnknownDistance = 1 << 20;

const std::set<std::string>& stop_words() {
  static const std::set<std::string> words = {
      "the", "a",  "an",  "of",   "to",   "in",   "is",   "at",  "on",
      "and", "or", "for", "by",   "be",   "it",   "its",  "as",  "this",
      "that", "with", "from", "not", "no", "was", "are", "line"};
  return words;
}

int line_distance(const IssueRecord& a, const IssueRecord& b) {
  if (!a.line || !b.line) return kUnknownDistance;
  return std::abs(*a.line - *b.line);
}

std::string describe(const IssueRecord& r) {
  std::string out;
  if (r.line) out += "[line " + std::to_string(*r.line) + "] ";
  out += r.description;
  return out;
}

std::optional<double> mean(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : values) {
    if (!v) continue;
    sum += *v;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fmt(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

void validate(const MatchConfig& config) {
  if (config.line_tolerance < 0) {
    throw ConfigError("line_tolerance must be >= 0");
  }
  if (!(config.token_overlap_threshold >= 0.0 &&
        config.token_overlap_threshold <= 1.0)) {
    throw ConfigError("token_overlap_threshold must lie in [0, 1]");
  }
  if (config.use_llm_matcher && !config.matcher_judge) {
    throw ConfigError("the LLM matcher needs a matcher_judge config");
  }
  if (config.matcher_judge) validate(*config.matcher_judge);
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    while (!word.empty() && word.back() == '-') word.pop_back();
    if (word.size() >= 2 && stop_words().count(word) == 0) out.push_back(word);
    word.clear();
  };
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      word += static_cast<char>(std::tolower(u));
    } else if (c == '-' && !word.empty()) {
      word += c;  // COBOL names keep their hyphens
    } else {
      flush();
    }
  }
  flush();
  return out;
}

double token_overlap(std::string_view a, std::string_view b) {
  const auto ta = normalized_tokens(a);
  const auto tb = normalized_tokens(b);
  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() || sb.empty()) return 0.0;
  int common = 0;
  for (const std::string& w : sa) common += static_cast<int>(sb.count(w));
  return static_cast<double>(common) /
         static_cast<double>(std::min(sa.size(), sb.size()));
}

std::vector<IssueRecord> findings_to_issues(const std::vector<Finding>& findings) {
  const std::vector<Hint> hints = findings_to_hints(findings);
  std::vector<IssueRecord> out;
  out.reserve(findings.size());
  for (std::size_t i = 0; i < findings.size(); ++i) {
    IssueRecord r;
    r.index = static_cast<int>(i + 1);
    r.line = findings[i].span.start_line;
    r.category_guess = std::string(category_code(findings[i].category));
    r.description = findings[i].message;
    r.hint_ref = hints[i].hint_id;
    out.push_back(std::move(r));
  }
  return out;
}

bool admissible(const IssueRecord& a, const IssueRecord& b,
                const MatchConfig& config) {
  if (a.hint_ref && b.hint_ref) return *a.hint_ref == *b.hint_ref;
  if (a.line && b.line && std::abs(*a.line - *b.line) > config.line_tolerance) {
    return false;
  }
  return token_overlap(a.description, b.description) >=
         config.token_overlap_threshold;
}

namespace {

using Distance = std::function<int(int left, int right)>;

MatchPairs greedy_core(int n, int m, const Admissible& ok, const Distance& dist,
                       bool self_match) {
  std::vector<std::tuple<int, int, int>> edges;  // distance, i, j
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (self_match && j <= i) continue;
      if (ok(i, j)) edges.emplace_back(dist(i, j), i, j);
    }
  }
  std::sort(edges.begin(), edges.end());
  std::vector<bool> left_used(n), right_used(m);
  MatchPairs pairs;
  for (const auto& [d, i, j] : edges) {
    if (left_used[i] || right_used[j]) continue;
    if (self_match && (right_used[i] || left_used[j])) continue;
    left_used[i] = right_used[j] = true;
    if (self_match) right_used[i] = left_used[j] = true;
    pairs.emplace_back(i, j);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace

MatchPairs greedy_match(const std::vector<IssueRecord>& left,
                        const std::vector<IssueRecord>& right,
                        const Admissible& ok, bool self_match) {
  return greedy_core(
      static_cast<int>(left.size()), static_cast<int>(right.size()), ok,
      [&](int i, int j) { return line_distance(left[i], right[j]); },
      self_match);
}

IssueMatcher::IssueMatcher(MatchConfig config, JudgeClient* llm)
    : config_(std::move(config)), llm_(llm) {
  validate(config_);
  if (config_.use_llm_matcher && llm_ == nullptr) {
    throw ConfigError("the LLM matcher needs a judge client");
  }
}

bool IssueMatcher::llm_same(const IssueRecord& a, const IssueRecord& b) {
  if (a.hint_ref && b.hint_ref && *a.hint_ref == *b.hint_ref) return true;
  const std::string prompt =
      "Two reviewers reported the following issues in the same COBOL "
      "program.\n"
      "A: " + describe(a) + "\n"
      "B: " + describe(b) + "\n"
      "Do A and B describe the same defect? Answer with one word, yes or no.";
  const std::string answer = to_lower(trim(llm_->complete(prompt)));
  if (answer.rfind("yes", 0) == 0) return true;
  if (answer.rfind("no", 0) == 0) return false;
  throw ProtocolError("matcher judge gave no yes/no answer", answer);
}

bool IssueMatcher::same(const IssueRecord& a, const IssueRecord& b) {
  if (config_.use_llm_matcher && !degraded_) return llm_same(a, b);
  return admissible(a, b, config_);
}

MatchPairs IssueMatcher::run(const std::vector<IssueRecord>& left,
                             const std::vector<IssueRecord>& right,
                             bool self_match) {
  return with_fallback([&] {
    return greedy_match(
        left, right, [&](int i, int j) { return same(left[i], right[j]); },
        self_match);
  });
}

MatchPairs IssueMatcher::with_fallback(const std::function<MatchPairs()>& body) {
  try {
    return body();
  } catch (const BackendError&) {
    degraded_ = true;
  } catch (const ProtocolError&) {
    degraded_ = true;
  }
  return body();
}

MatchPairs IssueMatcher::match_groups(
    const std::vector<std::vector<IssueRecord>>& groups,
    const std::vector<IssueRecord>& right) {
  return with_fallback([&] {
    return greedy_core(
        static_cast<int>(groups.size()), static_cast<int>(right.size()),
        [&](int i, int j) {
          for (const IssueRecord& m : groups[i]) {
            if (same(m, right[j])) return true;
          }
          return false;
        },
        [&](int i, int j) {
          int best = kUnknownDistance;
          for (const IssueRecord& m : groups[i]) {
            best = std::min(best, line_distance(m, right[j]));
          }
          return best;
        },
        false);
  });
}

MatchPairs IssueMatcher::match(const std::vector<IssueRecord>& left,
                               const std::vector<IssueRecord>& right) {
  return run(left, right, false);
}

std::vector<IssueRecord> IssueMatcher::dedupe(
    const std::vector<IssueRecord>& issues) {
  std::set<int> drop;
  for (const auto& [i, j] : run(issues, issues, true)) drop.insert(std::max(i, j));
  std::vector<IssueRecord> out;
  for (int i = 0; i < static_cast<int>(issues.size()); ++i) {
    if (drop.count(i) == 0) out.push_back(issues[i]);
  }
  return out;
}

MatchPairs match_issues(const std::vector<IssueRecord>& left,
                        const std::vector<IssueRecord>& right,
                        const MatchConfig& config) {
  IssueMatcher matcher(config);
  return matcher.match(left, right);
}

std::string_view to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::analytic_only: return "analytic_only";
    case ErrorClass::overlap: return "overlap";
    case ErrorClass::native_only: return "native_only";
  }
  return "analytic_only";
}

const std::vector<ErrorClass>& all_error_classes() {
  static const std::vector<ErrorClass> classes = {
      ErrorClass::analytic_only, ErrorClass::overlap, ErrorClass::native_only};
  return classes;
}

const std::vector<PartitionItem>& ErrorPartition::items(ErrorClass c) const {
  switch (c) {
    case ErrorClass::analytic_only: return analytic_only;
    case ErrorClass::overlap: return overlap;
    case ErrorClass::native_only: return native_only;
  }
  return analytic_only;
}

ErrorPartition partition_errors(const std::vector<IssueRecord>& analytic,
                                const std::vector<IssueRecord>& native,
                                IssueMatcher& matcher) {
  ErrorPartition p;
  p.analytic_count = static_cast<int>(analytic.size());
  p.native_count = static_cast<int>(native.size());
  std::vector<int> partner(analytic.size(), -1);
  std::vector<bool> native_matched(native.size());
  for (const auto& [i, j] : matcher.match(analytic, native)) {
    partner[i] = j;
    native_matched[j] = true;
  }
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    if (partner[i] >= 0) {
      p.overlap.push_back({ErrorClass::overlap, {analytic[i], native[partner[i]]}});
    } else {
      p.analytic_only.push_back({ErrorClass::analytic_only, {analytic[i]}});
    }
  }
  for (std::size_t j = 0; j < native.size(); ++j) {
    if (!native_matched[j]) {
      p.native_only.push_back({ErrorClass::native_only, {native[j]}});
    }
  }
  return p;
}

const ClassScore& HybridScore::of(ErrorClass c) const {
  switch (c) {
    case ErrorClass::analytic_only: return analytic_only;
    case ErrorClass::overlap: return overlap;
    case ErrorClass::native_only: return native_only;
  }
  return analytic_only;
}

HybridScore score_hybrid(const ErrorPartition& partition,
                         const std::vector<IssueRecord>& hybrid,
                         IssueMatcher& matcher) {
  // One matching across all classes, so a hybrid issue is credited once.
  std::vector<std::vector<IssueRecord>> groups;
  std::vector<ErrorClass> owner;
  for (ErrorClass c : all_error_classes()) {
    for (const PartitionItem& item : partition.items(c)) {
      groups.push_back(item.members);
      owner.push_back(c);
    }
  }
  HybridScore score;
  auto slot = [&](ErrorClass c) -> ClassScore& {
    switch (c) {
      case ErrorClass::analytic_only: return score.analytic_only;
      case ErrorClass::overlap: return score.overlap;
      case ErrorClass::native_only: return score.native_only;
    }
    return score.analytic_only;
  };
  for (ErrorClass c : all_error_classes()) {
    slot(c).size = static_cast<int>(partition.items(c).size());
  }
  for (const auto& [i, j] : matcher.match_groups(groups, hybrid)) {
    ++slot(owner[i]).detected;
  }
  return score;
}

std::optional<double> rediscovery(const std::vector<IssueRecord>& native,
                                  const std::vector<IssueRecord>& hybrid,
                                  IssueMatcher& matcher) {
  if (native.empty()) return std::nullopt;
  const auto pairs = matcher.match(native, hybrid);
  return static_cast<double>(pairs.size()) / static_cast<double>(native.size());
}

std::optional<double> ProgramScore::native_coverage() const {
  if (union_total == 0) return std::nullopt;
  return static_cast<double>(native_count) / union_total;
}

std::optional<double> ProgramScore::total_coverage() const {
  if (union_total == 0) return std::nullopt;
  return static_cast<double>(hybrid.detected()) / union_total;
}

ProgramScore score_program(const std::vector<Finding>& findings,
                           const JudgeVerdict& native,
                           const JudgeVerdict& hybrid, IssueMatcher& matcher) {
  if (native.program_id != hybrid.program_id) {
    throw ConfigError("verdicts belong to different programs: " +
                      native.program_id + " and " + hybrid.program_id);
  }
  if (native.judge_id != hybrid.judge_id) {
    throw ConfigError("native and hybrid verdicts come from different judges");
  }
  ProgramScore s;
  s.program_id = native.program_id;
  s.judge_id = native.judge_id;
  s.strategy = hybrid.strategy;

  const std::vector<IssueRecord> analytic = findings_to_issues(findings);
  const std::vector<IssueRecord> n = matcher.dedupe(native.issues);
  const std::vector<IssueRecord> h = matcher.dedupe(hybrid.issues);
  s.native_duplicates = static_cast<int>(native.issues.size() - n.size());
  s.hybrid_duplicates = static_cast<int>(hybrid.issues.size() - h.size());

  const ErrorPartition p = partition_errors(analytic, n, matcher);
  s.analytic_count = p.analytic_count;
  s.native_count = p.native_count;
  s.overlap_count = static_cast<int>(p.overlap.size());
  s.union_total = p.union_total();
  s.hybrid = score_hybrid(p, h, matcher);
  s.rediscovery = rediscovery(n, h, matcher);
  s.degraded = matcher.degraded();
  return s;
}

std::optional<double> CoverageReport::of(ErrorClass c) const {
  switch (c) {
    case ErrorClass::analytic_only: return analytic_only;
    case ErrorClass::overlap: return overlap;
    case ErrorClass::native_only: return native_only;
  }
  return std::nullopt;
}

EvalReport build_report(const std::vector<ProgramScore>& runs) {
  if (runs.empty()) throw ConfigError("no program results to report");
  EvalReport report;
  report.judge_id = runs.front().judge_id;
  std::map<Strategy, std::vector<ProgramScore>> by_strategy;
  for (const ProgramScore& s : runs) {
    if (s.judge_id != report.judge_id) {
      throw ConfigError("run set mixes judges " + report.judge_id + " and " +
                        s.judge_id);
    }
    by_strategy[s.strategy].push_back(s);
  }
  for (auto& [strategy, scores] : by_strategy) {
    std::sort(scores.begin(), scores.end(),
              [](const ProgramScore& a, const ProgramScore& b) {
                return a.program_id < b.program_id;
              });
    CoverageReport r;
    r.judge_id = report.judge_id;
    r.strategy = strategy;
    std::vector<std::optional<double>> ao, ov, no, nat, tot, red;
    for (const ProgramScore& s : scores) {
      ao.push_back(s.hybrid.analytic_only.fraction());
      ov.push_back(s.hybrid.overlap.fraction());
      no.push_back(s.hybrid.native_only.fraction());
      nat.push_back(s.native_coverage());
      tot.push_back(s.total_coverage());
      red.push_back(s.rediscovery);
      r.degraded = r.degraded || s.degraded;
    }
    r.analytic_only = mean(ao);
    r.overlap = mean(ov);
    r.native_only = mean(no);
    r.native_coverage = mean(nat);
    r.total_coverage = mean(tot);
    r.rediscovery_rate = mean(red);
    r.per_program = std::move(scores);
    report.strategies.push_back(std::move(r));
  }
  return report;
}

std::string report_to_json(const EvalReport& report) {
  json strategies = json::array();
  for (const CoverageReport& r : report.strategies) {
    json programs = json::array();
    for (const ProgramScore& s : r.per_program) {
      json classes = json::object();
      for (ErrorClass c : all_error_classes()) {
        const ClassScore& cs = s.hybrid.of(c);
        classes[std::string(to_string(c))] = {
            {"size", cs.size}, {"detected", cs.detected},
            {"fraction", opt(cs.fraction())}};
      }
      programs.push_back({{"program_id", s.program_id},
                          {"analytic_count", s.analytic_count},
                          {"native_count", s.native_count},
                          {"overlap_count", s.overlap_count},
                          {"union_total", s.union_total},
                          {"native_duplicates", s.native_duplicates},
                          {"hybrid_duplicates", s.hybrid_duplicates},
                          {"hybrid_detected", s.hybrid.detected()},
                          {"classes", classes},
                          {"native_coverage", opt(s.native_coverage())},
                          {"total_coverage", opt(s.total_coverage())},
                          {"rediscovery", opt(s.rediscovery)},
                          {"degraded", s.degraded}});
    }
    strategies.push_back(
        {{"strategy", std::string(to_string(r.strategy))},
         {"aggregate",
          {{"analytic_only", opt(r.analytic_only)},
           {"overlap", opt(r.overlap)},
           {"native_only", opt(r.native_only)}}},
         {"native_coverage", opt(r.native_coverage)},
         {"total_coverage", opt(r.total_coverage)},
         {"rediscovery_rate", opt(r.rediscovery_rate)},
         {"degraded", r.degraded},
         {"per_program", programs}});
  }
  json doc = {{"schema_version", 1},
              {"judge_id", report.judge_id},
              {"aggregation", "unweighted mean over programs; empty classes excluded"},
              {"deduplication", "judge issue lists self-matched before counting"},
              {"strategies", strategies}};
  return doc.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& report) {
  std::string out = "judge: " + report.judge_id + "\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-9s %8s %14s %8s %12s %10s %9s %12s\n",
                "strategy", "programs", "analytic_only", "overlap",
                "native_only", "native", "hybrid", "rediscovery");
  out += buf;
  for (const CoverageReport& r : report.strategies) {
    std::snprintf(buf, sizeof buf, "%-9s %8zu %14s %8s %12s %10s %9s %12s\n",
                  std::string(to_string(r.strategy)).c_str(),
                  r.per_program.size(), fmt(r.analytic_only).c_str(),
                  fmt(r.overlap).c_str(), fmt(r.native_only).c_str(),
                  fmt(r.native_coverage).c_str(), fmt(r.total_coverage).c_str(),
                  fmt(r.rediscovery_rate).c_str());
    out += buf;
  }
  for (const CoverageReport& r : report.strategies) {
    if (r.degraded) {
      out += "note: " + std::string(to_string(r.strategy)) +
             " used the deterministic matcher after the LLM matcher failed\n";
    }
  }
  return out;
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = "judge,strategy,class,fraction\n";
  for (const CoverageReport& r : report.strategies) {
    const std::string prefix =
        report.judge_id + "," + std::string(to_string(r.strategy)) + ",";
    auto row = [&](std::string_view cls, const std::optional<double>& v) {
      out += prefix + std::string(cls) + "," + fmt(v) + "\n";
    };
    for (ErrorClass c : all_error_classes()) row(to_string(c), r.of(c));
    row("native_total", r.native_coverage);
    row("hybrid_total", r.total_coverage);
    row("rediscovery", r.rediscovery_rate);
  }
  return out;
}

}  // namespace cobhint
