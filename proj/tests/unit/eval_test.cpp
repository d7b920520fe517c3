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

#include <gtest/gtest.h>

#include <algorithm>
#include <memory>
#include <random>
#include <set>

#include "cobhint/errors.hpp"
#include "cobhint/eval.hpp"
#include "json.hpp"
#include "random_issues.hpp"
#include "test_support.hpp"

namespace cobhint {
namespace {

IssueRecord issue(std::optional<int> line, std::string desc,
                  std::optional<std::string> ref = std::nullopt) {
  IssueRecord r;
  r.line = line;
  r.description = std::move(desc);
  r.hint_ref = std::move(ref);
  return r;
}

std::vector<IssueRecord> numbered(std::vector<IssueRecord> v) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i].index = static_cast<int>(i) + 1;
  return v;
}

TEST(TokenTest, NormalizesCaseStopWordsAndHyphens) {
  EXPECT_EQ(normalized_tokens("The WS-COUNT is not set at line 4- end-"),
            (std::vector<std::string>{"ws-count", "set", "end"}));
  EXPECT_DOUBLE_EQ(token_overlap("status WS-FS unchecked", "WS-FS status"), 1.0);
  EXPECT_DOUBLE_EQ(token_overlap("alpha beta", "beta gamma delta"), 0.5);
  EXPECT_DOUBLE_EQ(token_overlap("", "anything"), 0.0);
}

TEST(AdmissibleTest, HintReferencesDecideWhenBothPresent) {
  const MatchConfig c;
  EXPECT_TRUE(admissible(issue(1, "x", "H1"), issue(80, "unrelated", "H1"), c));
  EXPECT_FALSE(admissible(issue(5, "same words", "H1"),
                          issue(5, "same words", "H2"), c));
  EXPECT_TRUE(admissible(issue(5, "same words", "H1"), issue(6, "same words"), c));
}

TEST(AdmissibleTest, LineToleranceAndOverlap) {
  MatchConfig c;
  EXPECT_TRUE(admissible(issue(10, "WS-FS not tested"), issue(12, "WS-FS tested"), c));
  EXPECT_FALSE(admissible(issue(10, "WS-FS not tested"), issue(13, "WS-FS tested"), c));
  EXPECT_TRUE(admissible(issue(std::nullopt, "WS-FS not tested"),
                         issue(99, "WS-FS tested"), c));
  EXPECT_FALSE(admissible(issue(10, "alpha beta"), issue(10, "gamma delta"), c));
  c.line_tolerance = 5;
  EXPECT_TRUE(admissible(issue(10, "WS-FS not tested"), issue(15, "WS-FS tested"), c));
}

TEST(AdmissibleTest, IsSymmetric) {
  std::mt19937_64 rng(7);
  const MatchConfig c;
  for (int t = 0; t < 300; ++t) {
    const auto a = testing::random_issues(rng);
    const auto b = testing::random_issues(rng);
    for (const auto& x : a) {
      for (const auto& y : b) EXPECT_EQ(admissible(x, y, c), admissible(y, x, c));
    }
  }
}

TEST(MatchConfigTest, Validation) {
  MatchConfig c;
  EXPECT_NO_THROW(validate(c));
  c.line_tolerance = -1;
  EXPECT_THROW(validate(c), ConfigError);
  c = MatchConfig{};
  c.token_overlap_threshold = 1.5;
  EXPECT_THROW(validate(c), ConfigError);
  c = MatchConfig{};
  c.use_llm_matcher = true;
  EXPECT_THROW(validate(c), ConfigError);
  c.matcher_judge = default_mock_config();
  EXPECT_NO_THROW(validate(c));
  EXPECT_THROW(IssueMatcher{c}, ConfigError);
}

TEST(MatchTest, Examples) {
  const MatchConfig c;
  EXPECT_TRUE(match_issues({}, numbered({issue(1, "x y")}), c).empty());
  const auto one = numbered({issue(3, "counter never set")});
  EXPECT_EQ(match_issues(one, one, c), (MatchPairs{{0, 0}}));

  const auto left = numbered({issue(14, "WS-FS not tested"), issue(11, "WS-FS not tested")});
  const auto right = numbered({issue(12, "WS-FS is not tested")});
  EXPECT_EQ(match_issues(left, right, c), (MatchPairs{{1, 0}}));
}

TEST(MatchTest, GreedyIsAValidMaximalMatching) {
  std::mt19937_64 rng(11);
  const MatchConfig c;
  for (int t = 0; t < 500; ++t) {
    const auto a = testing::random_issues(rng);
    const auto b = testing::random_issues(rng);
    const auto pairs = match_issues(a, b, c);
    std::set<int> li, rj;
    for (const auto& [i, j] : pairs) {
      EXPECT_TRUE(admissible(a[i], b[j], c));
      EXPECT_TRUE(li.insert(i).second);
      EXPECT_TRUE(rj.insert(j).second);
    }
    for (int i = 0; i < static_cast<int>(a.size()); ++i) {
      for (int j = 0; j < static_cast<int>(b.size()); ++j) {
        if (li.count(i) == 0 && rj.count(j) == 0) {
          EXPECT_FALSE(admissible(a[i], b[j], c)) << "pair left open";
        }
      }
    }
    EXPECT_EQ(pairs, match_issues(a, b, c));
  }
}

TEST(MatchTest, GreedyAgreesWithBruteForceMostOfTheTime) {
  std::mt19937_64 rng(2024);
  const MatchConfig c;
  int agree = 0;
  for (int t = 0; t < 500; ++t) {
    const auto a = testing::random_issues(rng);
    const auto b = testing::random_issues(rng);
    const int best = testing::brute_force_matching(
        static_cast<int>(a.size()), static_cast<int>(b.size()),
        [&](int i, int j) { return admissible(a[i], b[j], c); });
    const int got = static_cast<int>(match_issues(a, b, c).size());
    EXPECT_LE(got, best);
    EXPECT_GE(2 * got, best);  // greedy is a 1/2 approximation
    agree += got == best;
  }
  EXPECT_GE(agree, 475);
}

TEST(DedupeTest, DropsTheLaterCopy) {
  IssueMatcher m{MatchConfig{}};
  const auto issues = numbered({issue(10, "WS-FS not tested"), issue(40, "loop never ends"),
                                issue(11, "WS-FS never tested"), issue(10, "WS-FS not tested")});
  const auto out = m.dedupe(issues);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].index, 1);
  EXPECT_EQ(out[1].index, 2);
  EXPECT_TRUE(m.dedupe({}).empty());
}

TEST(PartitionTest, InclusionExclusionOnRandomPairs) {
  std::mt19937_64 rng(99);
  IssueMatcher m{MatchConfig{}};
  for (int t = 0; t < 1000; ++t) {
    const auto a = testing::random_issues(rng);
    const auto n = testing::random_issues(rng);
    const auto p = partition_errors(a, n, m);
    const int ov = static_cast<int>(p.overlap.size());
    EXPECT_EQ(p.union_total(), static_cast<int>(a.size() + n.size()) - ov);
    EXPECT_EQ(static_cast<int>(p.analytic_only.size()) + ov, p.analytic_count);
    EXPECT_EQ(static_cast<int>(p.native_only.size()) + ov, p.native_count);
    EXPECT_EQ(p.analytic_only.size() + p.overlap.size() + p.native_only.size(),
              static_cast<std::size_t>(p.union_total()));
  }
}

TEST(PartitionTest, Examples) {
  IssueMatcher m{MatchConfig{}};
  const auto a = numbered({issue(10, "alpha one"), issue(20, "beta two"),
                           issue(30, "gamma three"), issue(40, "delta four"),
                           issue(50, "epsilon five")});
  const auto n = numbered({issue(10, "alpha one"), issue(21, "beta two"),
                           issue(70, "zeta"), issue(90, "eta")});
  const auto p = partition_errors(a, n, m);
  EXPECT_EQ(p.overlap.size(), 2u);
  EXPECT_EQ(p.union_total(), 7);
  ASSERT_EQ(p.overlap[0].members.size(), 2u);
  EXPECT_EQ(p.overlap[0].members[0], a[0]);
  EXPECT_EQ(p.overlap[0].members[1], n[0]);

  const auto empty_a = partition_errors({}, n, m);
  EXPECT_TRUE(empty_a.overlap.empty());
  EXPECT_EQ(empty_a.union_total(), 4);
}

TEST(ScoreTest, PerClassFractions) {
  IssueMatcher m{MatchConfig{}};
  const auto a = numbered({issue(10, "alpha one", "H1"), issue(20, "beta two", "H2"),
                           issue(30, "gamma three", "H3"), issue(40, "delta four", "H4"),
                           issue(60, "shared defect")});
  const auto n = numbered({issue(61, "shared defect"), issue(90, "native thing")});
  const auto p = partition_errors(a, n, m);
  ASSERT_EQ(p.analytic_only.size(), 4u);

  const auto h = numbered({issue(std::nullopt, "x", "H1"), issue(std::nullopt, "y", "H2"),
                           issue(std::nullopt, "z", "H4"), issue(61, "shared defect")});
  const HybridScore s = score_hybrid(p, h, m);
  EXPECT_EQ(s.analytic_only.size, 4);
  EXPECT_EQ(s.analytic_only.detected, 3);
  EXPECT_DOUBLE_EQ(*s.analytic_only.fraction(), 0.75);
  EXPECT_EQ(*s.overlap.fraction(), 1.0);
  EXPECT_EQ(*s.native_only.fraction(), 0.0);

  const HybridScore none = score_hybrid(p, {}, m);
  EXPECT_EQ(*none.analytic_only.fraction(), 0.0);
  EXPECT_EQ(*none.overlap.fraction(), 0.0);
  EXPECT_FALSE(score_hybrid(partition_errors({}, {}, m), h, m).overlap.fraction());
}

TEST(ScoreTest, OverlapCountsWhenEitherSideIsMatched) {
  IssueMatcher m{MatchConfig{}};
  const auto a = numbered({issue(10, "status WS-FS unchecked", "H1")});
  const auto n = numbered({issue(11, "status WS-FS unchecked after open")});
  const auto p = partition_errors(a, n, m);
  ASSERT_EQ(p.overlap.size(), 1u);
  EXPECT_EQ(score_hybrid(p, numbered({issue(3, "z", "H1")}), m).overlap.detected, 1);
  EXPECT_EQ(score_hybrid(p, numbered({issue(12, "WS-FS status unchecked after open")}), m)
                .overlap.detected,
            1);
}

TEST(RediscoveryTest, Boundaries) {
  IssueMatcher m{MatchConfig{}};
  const auto n = numbered({issue(10, "alpha one"), issue(20, "beta two")});
  EXPECT_EQ(rediscovery(n, n, m), 1.0);
  EXPECT_EQ(rediscovery(n, numbered({issue(90, "other")}), m), 0.0);
  EXPECT_EQ(rediscovery(n, numbered({issue(21, "beta two")}), m), 0.5);
  EXPECT_FALSE(rediscovery({}, n, m));
}

class FailingMatcherJudge {
 public:
  explicit FailingMatcherJudge(std::function<HttpResponse()> reply) {
    JudgeConfig c;
    c.judge_id = "matcher";
    c.model_name = "m";
    c.endpoint_url = "http://matcher.invalid/";
    c.max_retries = 1;
    client = std::make_unique<JudgeClient>(c, Backend::live);
    client->set_sleeper([](double) {});
    client->set_transport([reply](const HttpRequest&) { return reply(); });
    config.use_llm_matcher = true;
    config.matcher_judge = c;
  }
  std::unique_ptr<JudgeClient> client;
  MatchConfig config;
};

std::string chat(const std::string& text) {
  return nlohmann::json{{"choices", {{{"message", {{"content", text}}}}}}}.dump();
}

TEST(LlmMatcherTest, UsesYesNoAnswers) {
  FailingMatcherJudge yes([] { return HttpResponse{200, chat("Yes."), ""}; });
  IssueMatcher m(yes.config, yes.client.get());
  const auto a = numbered({issue(10, "alpha")});
  const auto b = numbered({issue(500, "completely different")});
  EXPECT_EQ(m.match(a, b).size(), 1u);
  EXPECT_FALSE(m.degraded());

  FailingMatcherJudge no([] { return HttpResponse{200, chat("no"), ""}; });
  IssueMatcher m2(no.config, no.client.get());
  EXPECT_TRUE(m2.match(a, a).empty());
}

TEST(LlmMatcherTest, FallsBackWhenTheJudgeFails) {
  const auto a = numbered({issue(10, "WS-FS not tested"), issue(30, "loop never ends")});
  const auto b = numbered({issue(11, "WS-FS never tested"), issue(90, "other")});
  const auto expected = match_issues(a, b, MatchConfig{});

  FailingMatcherJudge down([] { return HttpResponse{503, "", ""}; });
  IssueMatcher m(down.config, down.client.get());
  EXPECT_EQ(m.match(a, b), expected);
  EXPECT_TRUE(m.degraded());

  FailingMatcherJudge garbled([] { return HttpResponse{200, chat("perhaps"), ""}; });
  IssueMatcher g(garbled.config, garbled.client.get());
  EXPECT_EQ(g.match(a, b), expected);
  EXPECT_TRUE(g.degraded());
}

JudgeVerdict verdict(std::string program, Strategy s, std::vector<IssueRecord> issues,
                     std::string judge = "j") {
  JudgeVerdict v;
  v.program_id = std::move(program);
  v.judge_id = std::move(judge);
  v.strategy = s;
  v.issues = numbered(std::move(issues));
  return v;
}

Finding finding(int line, std::string msg) {
  Finding f;
  f.rule_id = "B1";
  f.category = Category::init_omission;
  f.span = {line, line};
  f.message = std::move(msg);
  return f;
}

TEST(ProgramScoreTest, CountsDuplicatesAndCoverage) {
  IssueMatcher m{MatchConfig{}};
  const std::vector<Finding> f = {finding(10, "WS-A is never initialized."),
                                  finding(20, "WS-B is never initialized.")};
  const auto native = verdict("p", Strategy::native,
                              {issue(10, "WS-A never initialized"),
                               issue(10, "WS-A never initialized"),
                               issue(70, "naming standard")});
  const auto hybrid = verdict("p", Strategy::guided,
                              {issue(20, "WS-B is never initialized.", "H2"),
                               issue(70, "naming standard")});
  const ProgramScore s = score_program(f, native, hybrid, m);
  EXPECT_EQ(s.native_duplicates, 1);
  EXPECT_EQ(s.analytic_count, 2);
  EXPECT_EQ(s.native_count, 2);
  EXPECT_EQ(s.overlap_count, 1);
  EXPECT_EQ(s.union_total, 3);
  EXPECT_DOUBLE_EQ(*s.native_coverage(), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*s.total_coverage(), 2.0 / 3.0);
  EXPECT_EQ(*s.hybrid.analytic_only.fraction(), 1.0);
  EXPECT_EQ(*s.hybrid.overlap.fraction(), 0.0);
  EXPECT_EQ(*s.rediscovery, 0.5);
  EXPECT_EQ(s.strategy, Strategy::guided);

  EXPECT_THROW(score_program(f, native, verdict("q", Strategy::naive, {}), m),
               ConfigError);
  EXPECT_THROW(score_program(f, native, verdict("p", Strategy::naive, {}, "k"), m),
               ConfigError);
}

ProgramScore fake_score(std::string id, Strategy s, int ao_size, int ao_hit,
                        std::string judge = "j") {
  ProgramScore p;
  p.program_id = std::move(id);
  p.judge_id = std::move(judge);
  p.strategy = s;
  p.hybrid.analytic_only = {ao_size, ao_hit};
  p.analytic_count = ao_size;
  p.native_count = 1;
  p.union_total = ao_size + 1;
  p.hybrid.native_only = {1, 1};
  p.rediscovery = 1.0;
  return p;
}

TEST(ReportTest, MeansSkipUndefinedValues) {
  const EvalReport r = build_report({fake_score("b", Strategy::naive, 4, 1),
                                     fake_score("a", Strategy::naive, 2, 2),
                                     fake_score("c", Strategy::naive, 0, 0),
                                     fake_score("a", Strategy::guided, 4, 3)});
  ASSERT_EQ(r.strategies.size(), 2u);
  const CoverageReport& naive = r.strategies[0];
  EXPECT_EQ(naive.strategy, Strategy::naive);
  EXPECT_EQ(naive.per_program[0].program_id, "a");
  EXPECT_DOUBLE_EQ(*naive.analytic_only, (0.25 + 1.0) / 2);
  EXPECT_FALSE(naive.overlap);
  EXPECT_EQ(*naive.native_only, 1.0);
  const CoverageReport& guided = r.strategies[1];
  EXPECT_DOUBLE_EQ(*guided.analytic_only, 0.75);
  EXPECT_DOUBLE_EQ(*guided.total_coverage, 4.0 / 5.0);
}

TEST(ReportTest, RejectsEmptyAndMixedRuns) {
  EXPECT_THROW(build_report({}), ConfigError);
  EXPECT_THROW(build_report({fake_score("a", Strategy::naive, 1, 1),
                             fake_score("b", Strategy::naive, 1, 1, "other")}),
               ConfigError);
}

TEST(ReportTest, CsvJsonAndTextShapes) {
  const EvalReport r = build_report({fake_score("a", Strategy::naive, 2, 1),
                                     fake_score("a", Strategy::guided, 2, 2)});
  const std::string csv = report_to_csv(r);
  EXPECT_EQ(csv.rfind("judge,strategy,class,fraction\n", 0), 0u);
  EXPECT_NE(csv.find("j,naive,analytic_only,0.5000\n"), std::string::npos);
  EXPECT_NE(csv.find("j,guided,overlap,n/a\n"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 6);

  const auto doc = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["strategies"].size(), 2u);
  EXPECT_TRUE(doc["strategies"][0]["aggregate"]["overlap"].is_null());
  EXPECT_EQ(report_to_json(r), report_to_json(r));

  const std::string text = report_to_text(r);
  EXPECT_NE(text.find("judge: j"), std::string::npos);
  EXPECT_NE(text.find("guided"), std::string::npos);
}

TEST(ReportTest, SingleProgramAggregateEqualsItsValues) {
  const ProgramScore p = fake_score("a", Strategy::naive, 3, 2);
  const EvalReport r = build_report({p});
  EXPECT_EQ(r.strategies[0].analytic_only, p.hybrid.analytic_only.fraction());
  EXPECT_EQ(r.strategies[0].total_coverage, p.total_coverage());
  EXPECT_EQ(r.strategies[0].native_coverage, p.native_coverage());
}

}  // namespace
}  // namespace cobhint
