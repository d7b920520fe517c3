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

#include "cobhint/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cobhint/errors.hpp"
#include "cobhint/eval.hpp"
#include "cobhint/faults.hpp"
#include "cobhint/hints.hpp"
#include "cobhint/judge.hpp"
#include "cobhint/rules.hpp"
#include "cobhint/source.hpp"
#include "json.hpp"

namespace cobhint::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::vector<std::string> inputs;
  std::string format = "fixed";
  std::string rules;
  std::string exclude_rules;
  std::string strategy = "naive";
  std::string template_path;
  std::string judge_config;
  std::string backend = "live";
  std::uint64_t seed = 42;
  std::string out;
  std::string cache;
  int jobs = 1;
  bool json = false;
  bool dry_run = false;
  std::optional<double> echo;
  std::optional<int> extra_issues;
  int count = 100;
  std::optional<int> faults;
  int faults_min = 3;
  int faults_max = 5;
  std::string program_id;
  std::string native_dir;
  std::vector<std::string> hybrid_dirs;
  int line_tolerance = 2;
  double overlap_threshold = 0.5;
  bool llm_matcher = false;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("cannot create output directory " + dir);
  }
  return fs::path(dir);
}

// Expands directories to their COBOL files. Per-file read errors are
// collected rather than thrown.
std::vector<SourceProgram> load_inputs(const std::vector<std::string>& inputs,
                                       SourceFormat format,
                                       std::vector<std::string>& errors) {
  std::vector<SourceProgram> out;
  for (const std::string& input : inputs) {
    std::error_code ec;
    if (fs::is_directory(input, ec)) {
      auto programs = load_directory(input, format, SourceOrigin::external);
      out.insert(out.end(), programs.begin(), programs.end());
      continue;
    }
    try {
      out.push_back(load_program(input, format, SourceOrigin::external));
    } catch (const ConfigError& e) {
      errors.push_back(e.what());
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SourceProgram& a, const SourceProgram& b) {
                     return a.id < b.id;
                   });
  return out;
}

RuleSet rule_filter(const Options& o) {
  if (!o.rules.empty()) return parse_rule_list(o.rules);
  if (o.exclude_rules.empty()) return std::nullopt;
  const std::set<std::string> excluded = parse_rule_list(o.exclude_rules);
  std::set<std::string> enabled;
  for (const RuleDescriptor& r : list_rules()) {
    if (excluded.count(r.rule_id) == 0) enabled.insert(r.rule_id);
  }
  return enabled;
}

template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(work);
    for (std::thread& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
}

std::string load_template(const Options& o) {
  if (o.template_path.empty()) return std::string(default_template());
  return read_file(o.template_path);
}

PromptBundle bundle_for(const SourceProgram& program, const std::string& tmpl,
                        Strategy strategy, const RuleSet& rules,
                        const std::string& judge_id) {
  std::optional<std::vector<Hint>> hints;
  if (strategy != Strategy::native) {
    hints = findings_to_hints(check_program(program, rules));
  }
  return assemble_prompt(tmpl, program.text, hints, strategy, program.id,
                         judge_id);
}

JudgeConfig judge_config_for(const Options& o, Backend backend) {
  JudgeConfig config;
  if (!o.judge_config.empty()) {
    config = load_judge_config(o.judge_config);
  } else if (backend == Backend::mock) {
    config = default_mock_config();
  } else {
    throw ConfigError("--judge-config is required with the live backend");
  }
  if (o.echo) config.mock_echo_fraction = *o.echo;
  if (o.extra_issues) config.mock_extra_issues = *o.extra_issues;
  if (o.jobs > 1) config.concurrency = o.jobs;
  validate(config);
  return config;
}

std::optional<fs::path> cache_path(const Options& o) {
  if (o.cache.empty()) return std::nullopt;
  return ensure_dir(o.cache);
}

// --- subcommands -----------------------------------------------------------

int cmd_rules(const Options& o, std::ostream& out) {
  if (o.json) {
    nlohmann::json rules = nlohmann::json::array();
    for (const RuleDescriptor& r : list_rules()) {
      rules.push_back({{"rule_id", r.rule_id},
                       {"category", std::string(category_code(r.category))},
                       {"title", r.title},
                       {"severity", std::string(to_string(r.severity))},
                       {"injectable", r.injectable},
                       {"description", r.description}});
    }
    out << rules.dump(2) << "\n";
    return kOk;
  }
  char buf[200];
  for (const RuleDescriptor& r : list_rules()) {
    std::snprintf(buf, sizeof buf, "%-4s %-15s %-8s %-3s %s\n",
                  r.rule_id.c_str(), std::string(category_code(r.category)).c_str(),
                  std::string(to_string(r.severity)).c_str(),
                  r.injectable ? "inj" : "", r.title.c_str());
    out << buf;
  }
  out << list_rules().size() << " rules in " << all_categories().size()
      << " categories\n";
  return kOk;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::string> errors;
  const auto programs =
      load_inputs(o.inputs, source_format_from_string(o.format), errors);
  const RuleSet rules = rule_filter(o);
  std::optional<fs::path> dir;
  if (!o.out.empty()) dir = ensure_dir(o.out);

  std::vector<std::vector<Finding>> results(programs.size());
  std::vector<std::string> parse_errors(programs.size());
  parallel_for(programs.size(), o.jobs, [&](std::size_t i) {
    try {
      results[i] = check_program(programs[i], rules);
    } catch (const ParseError& e) {
      parse_errors[i] = e.what();
      return;
    }
    if (dir) {
      write_file(*dir / (programs[i].id + ".findings.json"),
                 findings_to_json(programs[i].id, results[i]));
    }
  });

  bool any_error = false;
  std::size_t total = 0;
  nlohmann::json docs = nlohmann::json::array();
  for (std::size_t i = 0; i < programs.size(); ++i) {
    if (!parse_errors[i].empty()) {
      errors.push_back(programs[i].id + ": " + parse_errors[i]);
      continue;
    }
    total += results[i].size();
    any_error = any_error || has_errors(results[i]);
    if (o.json) {
      docs.push_back(nlohmann::json::parse(
          findings_to_json(programs[i].id, results[i])));
      continue;
    }
    for (const Finding& f : results[i]) {
      const RuleDescriptor* r = find_rule(f.rule_id);
      out << programs[i].id << ":" << f.span.start_line << ": " << f.rule_id
          << " " << (r ? to_string(r->severity) : "error") << ": " << f.message
          << "\n";
    }
  }
  if (o.json) {
    out << docs.dump(2) << "\n";
  } else {
    out << programs.size() << " programs checked, " << total << " findings\n";
  }
  for (const std::string& e : errors) err << "error: " << e << "\n";
  if (!errors.empty()) return kUsage;
  return any_error ? kFindings : kOk;
}

int cmd_hint(const Options& o, std::ostream& out) {
  if (o.inputs.size() != 1) throw ConfigError("hint takes exactly one program");
  SourceProgram program = load_program(
      o.inputs.front(), source_format_from_string(o.format));
  if (!o.program_id.empty()) program.id = o.program_id;
  const PromptBundle bundle =
      bundle_for(program, load_template(o), strategy_from_string(o.strategy),
                 rule_filter(o), "");
  if (o.out.empty()) {
    out << bundle.rendered;
  } else {
    write_file(o.out, bundle.rendered);
    out << "wrote " << o.out << " (" << bundle.metadata.hint_count
        << " hints)\n";
  }
  return kOk;
}

int cmd_judge(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::string> errors;
  const auto programs =
      load_inputs(o.inputs, source_format_from_string(o.format), errors);
  for (const std::string& e : errors) err << "error: " << e << "\n";
  if (!errors.empty()) return kUsage;
  if (programs.empty()) throw ConfigError("no COBOL programs found");

  const Backend backend = backend_from_string(o.backend);
  const JudgeConfig config = judge_config_for(o, backend);
  const Strategy strategy = strategy_from_string(o.strategy);
  const std::string tmpl = load_template(o);
  const RuleSet rules = rule_filter(o);

  std::vector<PromptBundle> bundles(programs.size());
  parallel_for(programs.size(), o.jobs, [&](std::size_t i) {
    bundles[i] = bundle_for(programs[i], tmpl, strategy, rules, config.judge_id);
  });

  JudgeClient client(config, backend, o.dry_run ? std::nullopt : cache_path(o));
  if (o.dry_run) {
    for (const PromptBundle& b : bundles) {
      const HttpRequest req = client.build_request(b, true);
      nlohmann::json headers = nlohmann::json::object();
      for (const auto& [k, v] : req.headers) headers[k] = v;
      out << nlohmann::json({{"program_id", b.metadata.program_id},
                             {"url", req.url},
                             {"headers", headers},
                             {"body", nlohmann::json::parse(req.body)}})
                 .dump()
          << "\n";
    }
    return kOk;
  }
  if (o.out.empty()) throw ConfigError("judge needs --out");
  const fs::path dir = ensure_dir(o.out);

  const std::vector<JudgeVerdict> verdicts = client.evaluate_all(bundles);
  std::size_t issues = 0, cached = 0, degraded = 0;
  for (const JudgeVerdict& v : verdicts) {
    write_file(dir / (v.program_id + ".verdict.json"), verdict_to_json(v));
    issues += v.issues.size();
    cached += v.from_cache ? 1 : 0;
    degraded += (v.parse_quality == ParseQuality::degraded || v.truncated) ? 1 : 0;
  }
  out << "judged " << verdicts.size() << " programs with " << config.judge_id
      << " (" << to_string(strategy) << "): " << issues << " issues, "
      << cached << " from cache, " << client.network_calls()
      << " network calls\n";
  if (degraded > 0) {
    err << "warning: " << degraded
        << " verdicts were truncated or had no ISSUES section\n";
  }
  return kOk;
}

JudgeVerdict load_verdict(const fs::path& dir, const std::string& program_id) {
  const fs::path path = dir / (program_id + ".verdict.json");
  if (!fs::exists(path)) {
    throw ConfigError("missing verdict " + path.string());
  }
  return verdict_from_json(read_file(path));
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::string> errors;
  const auto programs =
      load_inputs(o.inputs, source_format_from_string(o.format), errors);
  for (const std::string& e : errors) err << "error: " << e << "\n";
  if (!errors.empty()) return kUsage;
  if (programs.empty()) throw ConfigError("no COBOL programs found");
  if (o.native_dir.empty() || o.hybrid_dirs.empty()) {
    throw ConfigError("evaluate needs --native and at least one --hybrid");
  }

  MatchConfig match;
  match.line_tolerance = o.line_tolerance;
  match.token_overlap_threshold = o.overlap_threshold;
  std::optional<JudgeClient> matcher_client;
  if (o.llm_matcher) {
    const Backend backend = backend_from_string(o.backend);
    match.use_llm_matcher = true;
    match.matcher_judge = judge_config_for(o, backend);
    matcher_client.emplace(*match.matcher_judge, backend, cache_path(o));
  }
  validate(match);

  const RuleSet rules = rule_filter(o);
  std::vector<std::vector<Finding>> findings(programs.size());
  parallel_for(programs.size(), o.jobs, [&](std::size_t i) {
    findings[i] = check_program(programs[i], rules);
  });

  std::vector<ProgramScore> scores;
  bool flawed = false;
  for (const std::string& hybrid_dir : o.hybrid_dirs) {
    std::vector<ProgramScore> batch(programs.size());
    parallel_for(programs.size(), o.jobs, [&](std::size_t i) {
      IssueMatcher matcher(match, matcher_client ? &*matcher_client : nullptr);
      const JudgeVerdict native = load_verdict(o.native_dir, programs[i].id);
      const JudgeVerdict hybrid = load_verdict(hybrid_dir, programs[i].id);
      batch[i] = score_program(findings[i], native, hybrid, matcher);
    });
    for (ProgramScore& s : batch) {
      flawed = flawed || s.degraded;
      scores.push_back(std::move(s));
    }
  }
  const EvalReport report = build_report(scores);
  const std::string text = report_to_text(report);
  if (!o.out.empty()) {
    const fs::path dir = ensure_dir(o.out);
    write_file(dir / "report.json", report_to_json(report));
    write_file(dir / "report.txt", text);
    write_file(dir / "report.csv", report_to_csv(report));
  }
  out << text;
  return flawed ? kFindings : kOk;
}

int cmd_faultgen(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::string> errors;
  auto fixtures =
      load_inputs(o.inputs, source_format_from_string(o.format), errors);
  for (const std::string& e : errors) err << "error: " << e << "\n";
  if (!errors.empty()) return kUsage;
  if (o.out.empty()) throw ConfigError("faultgen needs --out");
  for (SourceProgram& f : fixtures) f.origin = SourceOrigin::fixture;

  FaultSpec spec;
  spec.seed = o.seed;
  if (!o.rules.empty()) {
    const auto ids = parse_rule_list(o.rules);
    spec.rule_ids.assign(ids.begin(), ids.end());
  }
  if (o.faults) {
    spec.set_faults_per_program(*o.faults);
  } else {
    spec.faults_min = o.faults_min;
    spec.faults_max = o.faults_max;
  }
  validate(spec);

  const Corpus corpus = build_corpus(std::move(fixtures), spec, o.count, o.jobs);
  write_corpus(corpus, ensure_dir(o.out));
  std::size_t injected = 0, short_programs = 0;
  for (const GroundTruth& t : corpus.truth) {
    injected += t.injected.size();
    for (const SkippedFault& s : t.skipped) {
      if (s.rule_id == "*") ++short_programs;
    }
  }
  out << "wrote " << corpus.programs.size() << " programs with " << injected
      << " faults (seed " << corpus.seed << ") to " << o.out << "\n";
  if (short_programs > 0) {
    err << "warning: " << short_programs
        << " programs received fewer faults than drawn; see manifest skips\n";
  }
  return kOk;
}

void add_format(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "Source format")
      ->check(CLI::IsMember({"fixed", "free"}));
}

void add_rule_filters(CLI::App* cmd, Options& o) {
  auto* only = cmd->add_option("--rules", o.rules, "Comma-separated rule ids");
  auto* skip =
      cmd->add_option("--exclude-rules", o.exclude_rules, "Rule ids to skip");
  only->excludes(skip);
}

void add_judge_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--judge-config", o.judge_config, "Judge config JSON");
  cmd->add_option("--backend", o.backend, "Judge backend")
      ->check(CLI::IsMember({"live", "mock"}));
  cmd->add_option("--cache", o.cache, "Response cache directory");
  cmd->add_option("--echo", o.echo, "Mock echo fraction")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--extra-issues", o.extra_issues, "Mock synthetic issues")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"Rule-based hints for LLM judges of COBOL programs", "cobhint"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cobhint 0.3.0");

  auto* rules = app.add_subcommand("rules", "List the rule catalog");
  rules->add_flag("--json", o.json, "Print JSON");

  auto* check = app.add_subcommand("check", "Run the rules over programs");
  check->add_option("paths", o.inputs, "Files or directories")->required();
  add_format(check, o);
  add_rule_filters(check, o);
  check->add_option("--out", o.out, "Write <id>.findings.json here");
  check->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);
  check->add_flag("--json", o.json, "Print findings JSON");

  auto* hint = app.add_subcommand("hint", "Render a judge prompt");
  hint->add_option("program", o.inputs, "COBOL file")->required();
  add_format(hint, o);
  add_rule_filters(hint, o);
  hint->add_option("--strategy", o.strategy)
      ->check(CLI::IsMember({"native", "naive", "guided"}));
  hint->add_option("--template", o.template_path, "Native prompt template");
  hint->add_option("--program-id", o.program_id);
  hint->add_option("--out", o.out, "Write the prompt to this file");

  auto* judge = app.add_subcommand("judge", "Collect judge verdicts");
  judge->add_option("corpus", o.inputs, "Files or directories")->required();
  add_format(judge, o);
  add_rule_filters(judge, o);
  add_judge_options(judge, o);
  judge->add_option("--strategy", o.strategy)
      ->check(CLI::IsMember({"native", "naive", "guided"}));
  judge->add_option("--template", o.template_path);
  judge->add_option("--out", o.out, "Verdict directory");
  judge->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);
  judge->add_flag("--dry-run", o.dry_run, "Print requests without sending");

  auto* evaluate = app.add_subcommand("evaluate", "Score hybrid against native");
  evaluate->add_option("corpus", o.inputs, "Files or directories")->required();
  add_format(evaluate, o);
  add_rule_filters(evaluate, o);
  evaluate->add_option("--native", o.native_dir, "Native verdict directory")
      ->required();
  evaluate->add_option("--hybrid", o.hybrid_dirs, "Hybrid verdict directory")
      ->required();
  evaluate->add_option("--out", o.out, "Report directory");
  evaluate->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);
  evaluate->add_option("--line-tolerance", o.line_tolerance)
      ->check(CLI::NonNegativeNumber);
  evaluate->add_option("--overlap-threshold", o.overlap_threshold)
      ->check(CLI::Range(0.0, 1.0));
  evaluate->add_flag("--llm-matcher", o.llm_matcher,
                     "Ask the judge whether issue pairs match");
  add_judge_options(evaluate, o);

  auto* faultgen = app.add_subcommand("faultgen", "Build a fault corpus");
  faultgen->add_option("fixtures", o.inputs, "Clean fixtures")->required();
  add_format(faultgen, o);
  faultgen->add_option("--rules", o.rules, "Injectable rule ids");
  faultgen->add_option("--out", o.out, "Corpus directory")->required();
  faultgen->add_option("--seed", o.seed);
  faultgen->add_option("--count", o.count)->check(CLI::PositiveNumber);
  auto* fixed = faultgen->add_option("--faults", o.faults, "Faults per program");
  faultgen->add_option("--faults-min", o.faults_min)->excludes(fixed);
  faultgen->add_option("--faults-max", o.faults_max)->excludes(fixed);
  faultgen->add_option("--jobs", o.jobs)->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*rules) return cmd_rules(o, out);
    if (*check) return cmd_check(o, out, err);
    if (*hint) return cmd_hint(o, out);
    if (*judge) return cmd_judge(o, out, err);
    if (*evaluate) return cmd_evaluate(o, out, err);
    if (*faultgen) return cmd_faultgen(o, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << "\n";
    return kBackend;
  } catch (const ProtocolError& e) {
    err << "protocol error: " << e.what() << "\n";
    return kBackend;
  }
  return kUsage;
}

}  // namespace cobhint::cli
