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

// Acceptance runner: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cobhint/eval.hpp"
#include "cobhint/faults.hpp"
#include "cobhint/hints.hpp"
#include "cobhint/judge.hpp"
#include "cobhint/rules.hpp"
#include "json.hpp"
#include "random_issues.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using namespace cobhint;
using Clock = std::chrono::steady_clock;

struct Paths {
  std::string fixtures;
  std::string template_path;
  std::string repro;
  std::string cli;
  std::string work;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

Outcome catalog_size() {
  const auto& rules = list_rules();
  std::set<Category> cats;
  for (const RuleDescriptor& r : rules) cats.insert(r.category);
  return {rules.size() >= 30 && cats.size() == 6,
          std::to_string(rules.size()) + " rules in " +
              std::to_string(cats.size()) + " categories"};
}

Outcome injected_recall(const Paths& p) {
  const auto fixtures = load_directory(p.fixtures, SourceFormat::fixed,
                                       SourceOrigin::fixture);
  const auto t0 = Clock::now();
  const Corpus corpus = build_corpus(fixtures, FaultSpec{}, 100);
  int total = 0;
  int found = 0;
  for (std::size_t i = 0; i < corpus.programs.size(); ++i) {
    const auto findings = check_program(corpus.programs[i]);
    for (const InjectedFault& f : corpus.truth[i].injected) {
      ++total;
      for (const Finding& x : findings) {
        // Within two lines of the recorded span.
        if (x.rule_id == f.rule_id &&
            x.span.start_line >= f.span.start_line - 2 &&
            x.span.start_line <= f.span.end_line + 2) {
          ++found;
          break;
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  bool sized = corpus.programs.size() == 100;
  for (const GroundTruth& g : corpus.truth) {
    sized = sized && g.injected.size() >= 3 && g.injected.size() <= 5;
  }
  return {sized && total > 0 && found == total && secs < 10.0,
          std::to_string(found) + "/" + std::to_string(total) +
              " faults recalled over " + std::to_string(corpus.programs.size()) +
              " programs in " + fixed3(secs) + " s"};
}

Outcome clean_precision(const Paths& p) {
  const auto fixtures = load_directory(p.fixtures);
  const auto t0 = Clock::now();
  int errors = 0;
  for (const SourceProgram& f : fixtures) {
    for (const Finding& x : check_program(f)) {
      const RuleDescriptor* r = find_rule(x.rule_id);
      if (r != nullptr && r->severity == Severity::error) ++errors;
    }
  }
  const double secs = seconds_since(t0);
  return {fixtures.size() >= 10 && errors == 0 && secs < 1.0,
          std::to_string(errors) + " error findings on " +
              std::to_string(fixtures.size()) + " clean fixtures in " +
              fixed3(secs) + " s"};
}

Outcome inclusion_exclusion() {
  std::mt19937_64 rng(20251);
  IssueMatcher matcher{MatchConfig{}};
  int ok = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const auto a = testing::random_issues(rng);
    const auto n = testing::random_issues(rng);
    const ErrorPartition part = partition_errors(a, n, matcher);
    const int overlap = static_cast<int>(part.overlap.size());
    if (part.union_total() == static_cast<int>(a.size() + n.size()) - overlap &&
        static_cast<int>(part.analytic_only.size()) + overlap ==
            static_cast<int>(a.size()) &&
        static_cast<int>(part.native_only.size()) + overlap ==
            static_cast<int>(n.size())) {
      ++ok;
    }
  }
  return {ok == trials, std::to_string(ok) + "/" + std::to_string(trials) +
                            " randomized pairs satisfy the identity"};
}

Outcome matcher_oracle() {
  std::mt19937_64 rng(500);
  const MatchConfig config;
  const int trials = 500;
  int agree = 0;
  std::ostringstream log;
  for (int t = 0; t < trials; ++t) {
    const auto a = testing::random_issues(rng);
    const auto b = testing::random_issues(rng);
    const int best = testing::brute_force_matching(
        static_cast<int>(a.size()), static_cast<int>(b.size()),
        [&](int i, int j) { return admissible(a[i], b[j], config); });
    const int greedy = static_cast<int>(match_issues(a, b, config).size());
    if (greedy == best) {
      ++agree;
    } else {
      log << "  deviation trial " << t << ": |L|=" << a.size()
          << " |R|=" << b.size() << " greedy=" << greedy
          << " optimum=" << best << "\n";
    }
  }
  std::cerr << log.str();
  return {agree * 100 >= 95 * trials,
          std::to_string(agree) + "/" + std::to_string(trials) +
              " trials match the brute-force optimum; " +
              std::to_string(trials - agree) + " deviations logged"};
}

// faultgen -> check -> hint -> mock judge -> evaluate, all in process.
std::string mock_pipeline(const std::vector<SourceProgram>& fixtures,
                          const std::string& tmpl, double echo,
                          double* analytic_only) {
  FaultSpec spec;
  spec.set_faults_per_program(4);
  const Corpus corpus = build_corpus(fixtures, spec, 100);
  JudgeConfig config = default_mock_config();
  config.mock_echo_fraction = echo;
  JudgeClient client(config, Backend::mock);
  std::vector<ProgramScore> scores;
  for (const SourceProgram& p : corpus.programs) {
    const auto findings = check_program(p);
    const auto hints = findings_to_hints(findings);
    const JudgeVerdict native = client.evaluate(assemble_prompt(
        tmpl, p.text, std::nullopt, Strategy::native, p.id, config.judge_id));
    for (Strategy s : {Strategy::naive, Strategy::guided}) {
      const JudgeVerdict hybrid = client.evaluate(
          assemble_prompt(tmpl, p.text, hints, s, p.id, config.judge_id));
      IssueMatcher matcher{MatchConfig{}};
      scores.push_back(score_program(findings, native, hybrid, matcher));
    }
  }
  const EvalReport report = build_report(scores);
  *analytic_only = report.strategies.front().analytic_only.value_or(-1.0);
  for (const CoverageReport& r : report.strategies) {
    if (r.analytic_only != report.strategies.front().analytic_only) {
      *analytic_only = -1.0;
    }
  }
  return report_to_json(report) + report_to_text(report) + report_to_csv(report);
}

Outcome mock_determinism(const Paths& p) {
  const auto fixtures = load_directory(p.fixtures, SourceFormat::fixed,
                                       SourceOrigin::fixture);
  const std::string tmpl = testing::slurp(p.template_path);
  double ignored = 0.0;
  const std::string first = mock_pipeline(fixtures, tmpl, 1.0, &ignored);
  const std::string second = mock_pipeline(fixtures, tmpl, 1.0, &ignored);
  bool exact = true;
  std::string values;
  for (double f : {0.0, 0.5, 1.0}) {
    double got = -1.0;
    mock_pipeline(fixtures, tmpl, f, &got);
    exact = exact && got == f;
    values += (values.empty() ? "" : ", ") + fixed3(f) + "->" + fixed3(got);
  }
  return {first == second && exact,
          std::string(first == second ? "reports byte-identical" : "reports differ") +
              "; analytic_only by echo fraction: " + values};
}

Outcome prompt_contracts(const Paths& p) {
  const std::string tmpl = testing::slurp(p.template_path);
  const auto programs = load_directory(testing::golden_dir());
  int checks = 0;
  int failures = 0;
  auto expect = [&](bool ok) {
    ++checks;
    failures += ok ? 0 : 1;
  };
  for (const SourceProgram& prog : programs) {
    const auto hints = findings_to_hints(check_program(prog));
    auto golden = [&](const char* s) {
      return testing::slurp(testing::golden_dir() / (prog.id + "." + s + ".txt"));
    };
    const std::string native = golden("native");
    const std::string naive = golden("naive");
    const std::string guided = golden("guided");
    expect(native == assemble_prompt(tmpl, prog.text, std::nullopt,
                                     Strategy::native, prog.id, "golden")
                         .rendered);
    expect(guided ==
           assemble_prompt(tmpl, prog.text, hints, Strategy::guided, prog.id, "golden")
               .rendered);
    expect(!native.empty() && naive.find(native) != std::string::npos);
    expect(guided.find(native) != std::string::npos);
    expect(!hints.empty());
    for (const Hint& h : hints) {
      const std::string tag = "[" + h.hint_id + "]";
      std::size_t n = 0;
      for (auto pos = guided.find(tag); pos != std::string::npos;
           pos = guided.find(tag, pos + 1)) {
        ++n;
      }
      expect(n == 1);
    }
  }
  return {!programs.empty() && failures == 0,
          std::to_string(checks - failures) + "/" + std::to_string(checks) +
              " golden checks over " + std::to_string(programs.size()) +
              " programs"};
}

Outcome repro_script(const Paths& p) {
  const fs::path out = fs::path(p.work) / "repro";
  std::error_code ec;
  fs::remove_all(out, ec);
  const std::string cmd = "\"" + p.repro + "\" --cli \"" + p.cli +
                          "\" --backend mock --out \"" + out.string() +
                          "\" > \"" + (fs::path(p.work) / "repro.log").string() +
                          "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) return {false, "repro script exited with status " + std::to_string(rc)};
  const fs::path report = out / "report" / "report.json";
  if (!fs::exists(report)) return {false, "repro script wrote no report.json"};
  const auto doc = nlohmann::json::parse(testing::slurp(report));
  bool ok = !doc["strategies"].empty();
  std::string detail;
  for (const auto& s : doc["strategies"]) {
    const double native = s["native_coverage"].get<double>();
    const double hybrid = s["total_coverage"].get<double>();
    ok = ok && hybrid - native > 0.0;
    detail += (detail.empty() ? "" : "; ") + s["strategy"].get<std::string>() +
              " hybrid " + fixed3(hybrid) + " vs native " + fixed3(native);
  }
  return {ok, "mock run: " + detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cobhint acceptance checks"};
  Paths p;
  app.add_option("--fixtures", p.fixtures)->required();
  app.add_option("--template", p.template_path)->required();
  app.add_option("--repro", p.repro)->required();
  app.add_option("--cli", p.cli)->required();
  app.add_option("--work", p.work)->required();
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(p.work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"catalog size", [] { return catalog_size(); }},
      {"injected-fault recall", [&] { return injected_recall(p); }},
      {"clean-corpus precision", [&] { return clean_precision(p); }},
      {"inclusion-exclusion identity", [] { return inclusion_exclusion(); }},
      {"matcher oracle equivalence", [] { return matcher_oracle(); }},
      {"mock end-to-end determinism", [&] { return mock_determinism(p); }},
      {"prompt strategy contracts", [&] { return prompt_contracts(p); }},
      {"repro protocol on mock", [&] { return repro_script(p); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] "
              << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
