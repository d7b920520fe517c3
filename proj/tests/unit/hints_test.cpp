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

#include "cobhint/errors.hpp"
#include "cobhint/hints.hpp"
#include "test_support.hpp"

namespace cobhint {
namespace {

Finding finding(std::string rule, Category cat, int line, std::string msg) {
  Finding f;
  f.rule_id = std::move(rule);
  f.category = cat;
  f.span = {line, line};
  f.message = std::move(msg);
  return f;
}

std::vector<Finding> sample_findings(int n) {
  std::vector<Finding> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(finding(i % 2 ? "B1" : "A2",
                          i % 2 ? Category::init_omission : Category::file_status,
                          10 + 7 * i, "Defect number " + std::to_string(i) + "."));
  }
  return out;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos;
       p = hay.find(needle, p + 1)) {
    ++n;
  }
  return n;
}

TEST(HintsTest, EmptyFindingsGiveNoHints) {
  EXPECT_TRUE(findings_to_hints({}).empty());
  EXPECT_EQ(render_hint_block({}), "ANALYTIC HINTS (0 items):");
}

TEST(HintsTest, A1HintTextCarriesTheLocation) {
  const auto hints = findings_to_hints({finding(
      "A1", Category::file_status, 12,
      "SELECT for file CUSTFILE has no FILE STATUS clause.")});
  ASSERT_EQ(hints.size(), 1u);
  EXPECT_EQ(hints[0].hint_id, "H1");
  EXPECT_EQ(hints[0].line, 12);
  EXPECT_EQ(hints[0].text,
            "line 12: SELECT for file CUSTFILE has no FILE STATUS clause.");
}

TEST(HintsTest, IdsAreDenseAndTextMatchesFindings) {
  const auto findings = sample_findings(5);
  const auto hints = findings_to_hints(findings);
  ASSERT_EQ(hints.size(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(hints[i].hint_id, "H" + std::to_string(i + 1));
    EXPECT_EQ(hints[i].rule_id, findings[i].rule_id);
    EXPECT_EQ(hints[i].text, "line " + std::to_string(findings[i].span.start_line) +
                                 ": " + findings[i].message);
  }
}

TEST(HintsTest, BlockFormatIsExact) {
  const auto block = render_hint_block(findings_to_hints(sample_findings(2)));
  EXPECT_EQ(block,
            "ANALYTIC HINTS (2 items):\n"
            "[H1] (FILE_STATUS/A2) line 10: Defect number 0.\n"
            "[H2] (INIT_OMISSION/B1) line 17: Defect number 1.");
}

TEST(HintsTest, BlockRoundTripsForEveryTriggerProgram) {
  for (const SourceProgram& p : load_directory(testing::data_dir() / "rules")) {
    const auto hints = findings_to_hints(check_program(p));
    EXPECT_EQ(parse_hint_block(render_hint_block(hints)), hints) << p.id;
  }
}

TEST(HintsTest, ParserSkipsNoise) {
  const auto hints = parse_hint_block(
      "some prose\n[H1] (FILE_STATUS/A1) line 3: x.\r\n[H2] (BOGUS/A1) y\n");
  ASSERT_EQ(hints.size(), 1u);
  EXPECT_EQ(hints[0].line, 3);
}

TEST(HintsTest, StrategyNames) {
  for (Strategy s : {Strategy::native, Strategy::naive, Strategy::guided}) {
    EXPECT_EQ(strategy_from_string(to_string(s)), s);
  }
  EXPECT_THROW(strategy_from_string("clever"), ConfigError);
}

TEST(PromptTest, NativeIsTemplateWithCode) {
  const auto b = assemble_prompt("Review:\n{{CODE}}\n{{HINTS}}", "MOVE A TO B.",
                                 std::nullopt, Strategy::native, "p", "j");
  EXPECT_EQ(b.rendered, "Review:\nMOVE A TO B.\n");
  EXPECT_FALSE(b.hint_block.has_value());
  EXPECT_EQ(b.metadata.program_id, "p");
  EXPECT_EQ(b.metadata.hint_count, 0);
}

TEST(PromptTest, NaiveWithoutHintsAddsOnlyTheHeader) {
  const std::string tmpl(default_template());
  const auto native =
      assemble_prompt(tmpl, "X.", std::nullopt, Strategy::native).rendered;
  const auto naive = assemble_prompt(tmpl, "X.", std::vector<Hint>{},
                                     Strategy::naive)
                         .rendered;
  EXPECT_EQ(naive, native + "\nANALYTIC HINTS (0 items):\n");
}

TEST(PromptTest, GuidedHasEveryHintAndOneInstruction) {
  const auto hints = findings_to_hints(sample_findings(3));
  const auto b =
      assemble_prompt(default_template(), "X.", hints, Strategy::guided);
  for (const char* id : {"[H1]", "[H2]", "[H3]"}) {
    EXPECT_EQ(count(b.rendered, id), 1u) << id;
  }
  EXPECT_EQ(count(b.rendered, std::string(guided_instruction())), 1u);
  EXPECT_EQ(b.metadata.hint_count, 3);
}

TEST(PromptTest, NativeTextSurvivesInHybridRenderings) {
  const auto hints = findings_to_hints(sample_findings(4));
  const std::string code = "       MOVE A TO B.\n       GOBACK.";
  const std::string top = testing::slurp(testing::source_dir() / "templates" /
                                         "hints_top.txt");
  for (const std::string& tmpl : {std::string(default_template()), top}) {
    const auto native =
        assemble_prompt(tmpl, code, std::nullopt, Strategy::native).rendered;
    for (Strategy s : {Strategy::naive, Strategy::guided}) {
      const auto r = assemble_prompt(tmpl, code, hints, s).rendered;
      EXPECT_NE(r.find(native), std::string::npos);
      EXPECT_EQ(count(r, code), 1u);
      EXPECT_EQ(r, assemble_prompt(tmpl, code, hints, s).rendered);
    }
  }
}

TEST(PromptTest, PlacementFollowsTheTemplate) {
  EXPECT_EQ(hint_placement("{{HINTS}}\nbody {{CODE}}"), HintPlacement::top);
  EXPECT_EQ(hint_placement("body {{CODE}}\n{{HINTS}}\n"), HintPlacement::end);
  EXPECT_EQ(hint_placement("body {{CODE}}"), HintPlacement::end);
  EXPECT_THROW(hint_placement("a {{HINTS}} b {{CODE}}"), ConfigError);
  const auto b = assemble_prompt("{{HINTS}}\nCode: {{CODE}}",
                                 "X.", findings_to_hints(sample_findings(1)),
                                 Strategy::naive);
  EXPECT_EQ(b.rendered.rfind("ANALYTIC HINTS (1 items):", 0), 0u);
}

TEST(PromptTest, BadInputsAreRejected) {
  EXPECT_THROW(assemble_prompt("no code here", "X.", std::nullopt,
                               Strategy::native),
               ConfigError);
  EXPECT_THROW(assemble_prompt("{{CODE}}{{CODE}}", "X.", std::nullopt,
                               Strategy::native),
               ConfigError);
  EXPECT_THROW(assemble_prompt("{{CODE}}", "X.", std::vector<Hint>{},
                               Strategy::native),
               ConfigError);
}

TEST(PromptTest, ShippedTemplateMatchesBuiltIn) {
  EXPECT_EQ(testing::slurp(testing::source_dir() / "templates" /
                           "native_prompt.txt"),
            std::string(default_template()));
}

}  // namespace
}  // namespace cobhint
