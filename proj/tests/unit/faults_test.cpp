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
#include <map>
#include <set>

#include "cobhint/errors.hpp"
#include "cobhint/faults.hpp"
#include "cobhint/rules.hpp"
#include "test_support.hpp"

namespace cobhint {
namespace {

const std::vector<SourceProgram>& fixtures() {
  static const auto f = load_directory(testing::fixtures_dir());
  return f;
}

FaultSpec single(const std::string& rule) {
  FaultSpec s;
  s.rule_ids = {rule};
  s.set_faults_per_program(1);
  return s;
}

std::multiset<std::string> ids(const std::vector<Finding>& fs) {
  std::multiset<std::string> out;
  for (const Finding& f : fs) out.insert(f.rule_id);
  return out;
}

TEST(SplitMixTest, KnownSequenceAndRange) {
  // Reference outputs of the published SplitMix64 for seed 0.
  SplitMix64 g(0);
  EXPECT_EQ(g.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(g.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(g.next(), 0x06c45d188009454fULL);
  SplitMix64 r(7);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(r.below(13), 13u);
}

TEST(FaultSpecTest, Validation) {
  FaultSpec s;
  EXPECT_NO_THROW(validate(s));
  s.set_faults_per_program(0);
  EXPECT_THROW(validate(s), ConfigError);
  s.faults_min = 4;
  s.faults_max = 3;
  EXPECT_THROW(validate(s), ConfigError);
  EXPECT_THROW(validate(single("Z1")), ConfigError);
  for (const RuleDescriptor& r : list_rules()) {
    if (!r.injectable) {
      EXPECT_THROW(validate(single(r.rule_id)), ConfigError) << r.rule_id;
      EXPECT_THROW(FaultInjector{single(r.rule_id)}, ConfigError) << r.rule_id;
    }
  }
}

TEST(FaultSpecTest, InjectableIdsMatchTheCatalog) {
  std::vector<std::string> expected;
  for (const RuleDescriptor& r : list_rules()) {
    if (r.injectable) expected.push_back(r.rule_id);
  }
  EXPECT_EQ(injectable_rule_ids(), expected);
  EXPECT_GE(expected.size(), 20u);
}

TEST(FaultSitesTest, EditsReplaceSingleLines) {
  for (const SourceProgram& f : fixtures()) {
    const int lines = static_cast<int>(split_physical_lines(f.text).size());
    for (const std::string& r : injectable_rule_ids()) {
      for (const FaultSite& s : candidate_sites(f, r)) {
        EXPECT_EQ(s.rule_id, r);
        EXPECT_FALSE(s.edits.empty());
        for (const auto& [n, text] : s.edits) {
          EXPECT_TRUE(s.region.contains(n));
          EXPECT_GE(n, 1);
          EXPECT_LE(n, lines);
          EXPECT_EQ(text.find('\n'), std::string::npos);
        }
      }
    }
  }
}

TEST(FaultSitesTest, EveryInjectableRuleHasSomeValidSite) {
  FaultInjector inj{FaultSpec{}};
  std::set<std::string> covered;
  for (const SourceProgram& f : fixtures()) {
    for (const auto& [rule, sites] : inj.valid_sites(f)) {
      if (!sites.empty()) covered.insert(rule);
    }
  }
  const auto all = injectable_rule_ids();
  EXPECT_EQ(covered, std::set<std::string>(all.begin(), all.end()));
}

TEST(FaultInjectorTest, DirtyFixtureIsRejected) {
  FaultInjector inj{FaultSpec{}};
  EXPECT_THROW(inj.inject(testing::rule_program("A1"), 0, "x"), ConfigError);
}

// A single-rule injection adds exactly one finding, of that rule, inside
// the recorded span; every earlier finding survives.
TEST(FaultInjectorTest, SingleRuleAddsExactlyOneFinding) {
  FaultInjector all{FaultSpec{}};
  int injected = 0;
  for (const SourceProgram& f : fixtures()) {
    const auto before = ids(check_program(f));
    for (const auto& [rule, sites] : all.valid_sites(f)) {
      if (sites.empty()) continue;
      SCOPED_TRACE(f.id + " " + rule);
      const auto r = inject_faults(f, single(rule), 3, "t");
      ASSERT_EQ(r.truth.injected.size(), 1u);
      EXPECT_TRUE(r.truth.skipped.empty());
      const InjectedFault& g = r.truth.injected[0];
      EXPECT_EQ(g.rule_id, rule);
      const auto after = check_program(r.program);
      auto expected = before;
      expected.insert(rule);
      EXPECT_EQ(ids(after), expected);
      const bool inside = std::any_of(after.begin(), after.end(), [&](const Finding& x) {
        return x.rule_id == rule && g.span.contains(x.span.start_line);
      });
      EXPECT_TRUE(inside);
      ++injected;
    }
  }
  EXPECT_GE(injected, 60);
}

TEST(FaultInjectorTest, InapplicableRuleIsSkipped) {
  FaultInjector all{FaultSpec{}};
  for (const SourceProgram& f : fixtures()) {
    const auto& sites = all.valid_sites(f);
    for (const std::string& rule : injectable_rule_ids()) {
      if (sites.count(rule) != 0 && !sites.at(rule).empty()) continue;
      const auto r = inject_faults(f, single(rule), 0, "t");
      EXPECT_TRUE(r.truth.injected.empty());
      EXPECT_FALSE(r.truth.skipped.empty());
      EXPECT_EQ(r.program.text, f.text);
      return;
    }
  }
  GTEST_SKIP() << "every rule applies to every fixture";
}

TEST(FaultInjectorTest, SameSeedSameOutput) {
  FaultSpec s;
  for (const SourceProgram& f : fixtures()) {
    const auto a = inject_faults(f, s, 5, "x");
    const auto b = inject_faults(f, s, 5, "x");
    EXPECT_EQ(a.program.text, b.program.text);
    EXPECT_EQ(a.truth, b.truth);
  }
}

TEST(FaultInjectorTest, SeedsAndIndicesVaryTheOutput) {
  FaultSpec a;
  FaultSpec b;
  b.seed = 43;
  int differ_seed = 0;
  int differ_index = 0;
  for (const SourceProgram& f : fixtures()) {
    differ_seed += inject_faults(f, a, 0).program.text !=
                   inject_faults(f, b, 0).program.text;
    differ_index += inject_faults(f, a, 0).program.text !=
                    inject_faults(f, a, 1).program.text;
  }
  EXPECT_GE(differ_seed, 6);
  EXPECT_GE(differ_index, 6);
}

TEST(FaultInjectorTest, RevertingSpansRestoresTheFixture) {
  const Corpus c = build_corpus(fixtures(), FaultSpec{}, 36);
  for (std::size_t i = 0; i < c.programs.size(); ++i) {
    const SourceProgram& fixture = fixtures()[i % fixtures().size()];
    ASSERT_EQ(c.truth[i].fixture, fixture.id);
    const auto clean = split_physical_lines(fixture.text);
    auto lines = split_physical_lines(c.programs[i].text);
    ASSERT_EQ(lines.size(), clean.size());
    for (const InjectedFault& f : c.truth[i].injected) {
      for (int l = f.span.start_line; l <= f.span.end_line; ++l) {
        lines[l - 1] = clean[l - 1];
      }
    }
    EXPECT_EQ(lines, clean) << c.programs[i].id;
    SourceProgram reverted = c.programs[i];
    reverted.text = fixture.text;
    EXPECT_FALSE(has_errors(check_program(reverted)));
  }
}

TEST(CorpusTest, HundredProgramsWithExactRecall) {
  const Corpus c = build_corpus(fixtures(), FaultSpec{}, 100, 2);
  ASSERT_EQ(c.programs.size(), 100u);
  ASSERT_EQ(c.truth.size(), 100u);
  std::set<std::string> names;
  for (std::size_t i = 0; i < c.programs.size(); ++i) {
    const SourceProgram& p = c.programs[i];
    const GroundTruth& g = c.truth[i];
    names.insert(p.id);
    EXPECT_EQ(g.program_id, p.id);
    EXPECT_EQ(p.origin, SourceOrigin::injected);
    EXPECT_GE(g.injected.size(), 3u);
    EXPECT_LE(g.injected.size(), 5u);
    const auto findings = check_program(p);
    EXPECT_EQ(findings.size(), g.injected.size()) << p.id;
    for (const InjectedFault& f : g.injected) {
      const bool hit = std::any_of(findings.begin(), findings.end(), [&](const Finding& x) {
        return x.rule_id == f.rule_id &&
               x.span.start_line >= f.span.start_line - 2 &&
               x.span.start_line <= f.span.end_line + 2;
      });
      EXPECT_TRUE(hit) << p.id << " " << f.rule_id;
    }
  }
  EXPECT_EQ(names.size(), 100u);
}

TEST(CorpusTest, PrefixAndThreadCountDoNotMatter) {
  const Corpus big = build_corpus(fixtures(), FaultSpec{}, 30, 3);
  const Corpus small = build_corpus(fixtures(), FaultSpec{}, 10, 1);
  for (std::size_t i = 0; i < small.programs.size(); ++i) {
    EXPECT_EQ(small.programs[i].text, big.programs[i].text);
    EXPECT_EQ(small.truth[i], big.truth[i]);
  }
}

TEST(CorpusTest, SingleFixtureSingleProgram) {
  const Corpus c = build_corpus({fixtures()[0]}, FaultSpec{}, 1);
  ASSERT_EQ(c.programs.size(), 1u);
  EXPECT_NE(c.programs[0].text, fixtures()[0].text);
  EXPECT_THROW(build_corpus({}, FaultSpec{}, 1), ConfigError);
  EXPECT_THROW(build_corpus(fixtures(), FaultSpec{}, 0), ConfigError);
}

// For each rule r and fixture with no r finding, injecting r yields one.
TEST(CorpusTest, InjectionIsMonotone) {
  FaultInjector all{FaultSpec{}};
  for (const SourceProgram& f : fixtures()) {
    const auto clean = ids(check_program(f));
    for (const auto& [rule, sites] : all.valid_sites(f)) {
      if (sites.empty() || clean.count(rule) != 0) continue;
      for (std::uint64_t i = 0; i < 3; ++i) {
        EXPECT_GE(ids(check_program(inject_faults(f, single(rule), i).program))
                      .count(rule),
                  1u)
            << f.id << " " << rule;
      }
    }
  }
}

TEST(ManifestTest, RoundTripsExactly) {
  const Corpus c = build_corpus(fixtures(), FaultSpec{}, 24);
  const Manifest m{c.seed, c.truth};
  const std::string text = manifest_to_json(m);
  EXPECT_EQ(manifest_from_json(text), m);
  EXPECT_EQ(manifest_to_json(manifest_from_json(text)), text);
  EXPECT_THROW(manifest_from_json("{\"schema_version\": 2}"), ProtocolError);
  EXPECT_THROW(manifest_from_json("nope"), ProtocolError);
}

TEST(ManifestTest, WriteCorpusLaysOutFiles) {
  testing::ScratchDir dir("corpus");
  const Corpus c = build_corpus(fixtures(), FaultSpec{}, 5);
  write_corpus(c, dir.path());
  const auto back = load_directory(dir.path());
  ASSERT_EQ(back.size(), 5u);
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].id, c.programs[i].id);
    EXPECT_EQ(back[i].text, c.programs[i].text);
  }
  EXPECT_EQ(manifest_from_json(testing::slurp(dir.path() / "manifest.json")),
            (Manifest{c.seed, c.truth}));
}

}  // namespace
}  // namespace cobhint
