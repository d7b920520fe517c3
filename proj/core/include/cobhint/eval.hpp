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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cobhint/judge.hpp"
#include "cobhint/rules.hpp"

namespace cobhint {

struct MatchConfig {
  int line_tolerance = 2;
  double token_overlap_threshold = 0.5;
  bool use_llm_matcher = false;
  std::optional<JudgeConfig> matcher_judge;
};

void validate(const MatchConfig& config);

// Lowercased alphanumeric words of length >= 2, minus a few stop words.
std::vector<std::string> normalized_tokens(std::string_view text);
// |A & B| / min(|A|, |B|) over token sets; 0 when either side is empty.
double token_overlap(std::string_view a, std::string_view b);

// Findings as issues: hint ids follow finding order, as in the prompt.
std::vector<IssueRecord> findings_to_issues(const std::vector<Finding>& findings);

// Deterministic admissibility. Two issues with hint references are
// admissible iff the references agree.
bool admissible(const IssueRecord& a, const IssueRecord& b,
                const MatchConfig& config);

using Admissible = std::function<bool(int left, int right)>;
using MatchPairs = std::vector<std::pair<int, int>>;

// Greedy matching over admissible pairs ordered by (line distance, left,
// right). With `self_match`, left and right are the same list and i == j is
// never paired. Pairs come back sorted by left index.
MatchPairs greedy_match(const std::vector<IssueRecord>& left,
                        const std::vector<IssueRecord>& right,
                        const Admissible& ok, bool self_match = false);

class IssueMatcher {
 public:
  explicit IssueMatcher(MatchConfig config, JudgeClient* llm = nullptr);

  const MatchConfig& config() const { return config_; }

  MatchPairs match(const std::vector<IssueRecord>& left,
                   const std::vector<IssueRecord>& right);

  // Left entries are groups; a group pairs with a right issue when any of its
  // members would.
  MatchPairs match_groups(const std::vector<std::vector<IssueRecord>>& groups,
                          const std::vector<IssueRecord>& right);

  // Drops the later member of every self-matched pair.
  std::vector<IssueRecord> dedupe(const std::vector<IssueRecord>& issues);

  // Set once the LLM matcher failed and the deterministic path took over.
  bool degraded() const { return degraded_; }

 private:
  bool same(const IssueRecord& a, const IssueRecord& b);
  bool llm_same(const IssueRecord& a, const IssueRecord& b);
  MatchPairs with_fallback(const std::function<MatchPairs()>& body);
  MatchPairs run(const std::vector<IssueRecord>& left,
                 const std::vector<IssueRecord>& right, bool self_match);

  MatchConfig config_;
  JudgeClient* llm_;
  bool degraded_ = false;
};

MatchPairs match_issues(const std::vector<IssueRecord>& left,
                        const std::vector<IssueRecord>& right,
                        const MatchConfig& config);

enum class ErrorClass { analytic_only, overlap, native_only };
std::string_view to_string(ErrorClass c);
const std::vector<ErrorClass>& all_error_classes();

// One partitioned error. Overlap items hold the analytic issue first and the
// native issue second.
struct PartitionItem {
  ErrorClass cls = ErrorClass::analytic_only;
  std::vector<IssueRecord> members;
};

struct ErrorPartition {
  std::vector<PartitionItem> analytic_only;
  std::vector<PartitionItem> overlap;
  std::vector<PartitionItem> native_only;
  int analytic_count = 0;
  int native_count = 0;

  int union_total() const {
    return analytic_count + native_count - static_cast<int>(overlap.size());
  }
  const std::vector<PartitionItem>& items(ErrorClass c) const;
};

ErrorPartition partition_errors(const std::vector<IssueRecord>& analytic,
                                const std::vector<IssueRecord>& native,
                                IssueMatcher& matcher);

struct ClassScore {
  int size = 0;
  int detected = 0;

  std::optional<double> fraction() const {
    if (size == 0) return std::nullopt;
    return static_cast<double>(detected) / size;
  }
};

struct HybridScore {
  ClassScore analytic_only;
  ClassScore overlap;
  ClassScore native_only;

  const ClassScore& of(ErrorClass c) const;
  int detected() const {
    return analytic_only.detected + overlap.detected + native_only.detected;
  }
};

// An overlap item counts as detected when either member is matched.
HybridScore score_hybrid(const ErrorPartition& partition,
                         const std::vector<IssueRecord>& hybrid,
                         IssueMatcher& matcher);

// Fraction of native issues matched in the hybrid output; unset when there
// are no native issues.
std::optional<double> rediscovery(const std::vector<IssueRecord>& native,
                                  const std::vector<IssueRecord>& hybrid,
                                  IssueMatcher& matcher);

struct ProgramScore {
  std::string program_id;
  std::string judge_id;
  Strategy strategy = Strategy::naive;
  int analytic_count = 0;
  int native_count = 0;
  int overlap_count = 0;
  int union_total = 0;
  int native_duplicates = 0;
  int hybrid_duplicates = 0;
  HybridScore hybrid;
  std::optional<double> rediscovery;
  bool degraded = false;

  std::optional<double> native_coverage() const;
  std::optional<double> total_coverage() const;
};

// Dedupes both verdicts, partitions, scores the hybrid and rediscovery.
ProgramScore score_program(const std::vector<Finding>& findings,
                           const JudgeVerdict& native,
                           const JudgeVerdict& hybrid, IssueMatcher& matcher);

struct CoverageReport {
  std::string judge_id;
  Strategy strategy = Strategy::naive;
  std::vector<ProgramScore> per_program;
  // Unweighted means over programs where the value is defined.
  std::optional<double> analytic_only;
  std::optional<double> overlap;
  std::optional<double> native_only;
  std::optional<double> native_coverage;
  std::optional<double> total_coverage;
  std::optional<double> rediscovery_rate;
  bool degraded = false;

  std::optional<double> of(ErrorClass c) const;
};

struct EvalReport {
  std::string judge_id;
  std::vector<CoverageReport> strategies;  // ordered by strategy
};

// Throws ConfigError on an empty run set or mixed judge ids.
EvalReport build_report(const std::vector<ProgramScore>& runs);

std::string report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);
// Header `judge,strategy,class,fraction`; undefined values print as n/a.
std::string report_to_csv(const EvalReport& report);

}  // namespace cobhint
