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

#include "cobhint/hints.hpp"

#include <regex>

#include "cobhint/errors.hpp"
#include "text_util.hpp"

namespace cobhint {

namespace {

constexpr std::string_view kHeaderPrefix = "ANALYTIC HINTS (";

constexpr std::string_view kGuidedInstruction =
    "Address every analytic hint above by its id. For each hint, state\n"
    "whether you agree or disagree that it describes a real defect, and\n"
    "justify that answer from the code. Report each hint you agree with in\n"
    "the ISSUES section and tag it with (addresses: <hint id>). Also report\n"
    "any additional issues you find on your own, without a tag.";

constexpr std::string_view kDefaultTemplate =
    "You are an expert COBOL code reviewer for IBM mainframe batch and IMS\n"
    "programs. Review the program below and list every defect you find,\n"
    "including file handling, data initialization, control flow, IMS DL/I\n"
    "calls, checkpoint and restart logic, and program structure. For each\n"
    "defect give the line number and explain why it is a defect.\n"
    "\n"
    "PROGRAM:\n"
    "```cobol\n"
    "{{CODE}}\n"
    "```\n"
    "\n"
    "End your answer with a machine-readable section in exactly this form:\n"
    "\n"
    "```\n"
    "ISSUES:\n"
    "1. [line 12] short description of the first defect\n"
    "2. [line 40] short description of the second defect\n"
    "```\n"
    "\n"
    "Write a single line \"ISSUES: none\" if you find no defects. When an\n"
    "issue confirms one of the analytic hints, end its line with\n"
    "(addresses: <hint id>).\n"
    "{{HINTS}}\n";

std::string substitute_code(std::string_view tmpl, std::string_view code) {
  const std::size_t pos = tmpl.find(kCodePlaceholder);
  std::string out(tmpl.substr(0, pos));
  out.append(code);
  out.append(tmpl.substr(pos + kCodePlaceholder.size()));
  return out;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::native: return "native";
    case Strategy::naive: return "naive";
    case Strategy::guided: return "guided";
  }
  return "native";
}

Strategy strategy_from_string(std::string_view name) {
  const std::string lower = to_lower(trim(name));
  if (lower == "native") return Strategy::native;
  if (lower == "naive") return Strategy::naive;
  if (lower == "guided") return Strategy::guided;
  throw ConfigError("unknown strategy: " + std::string(name));
}

std::vector<Hint> findings_to_hints(const std::vector<Finding>& findings) {
  std::vector<Hint> hints;
  hints.reserve(findings.size());
  for (std::size_t i = 0; i < findings.size(); ++i) {
    const Finding& f = findings[i];
    Hint h;
    h.hint_id = "H" + std::to_string(i + 1);
    h.rule_id = f.rule_id;
    h.category = f.category;
    h.line = f.span.start_line;
    h.text = "line " + std::to_string(h.line) + ": " + f.message;
    hints.push_back(std::move(h));
  }
  return hints;
}

std::string render_hint_block(const std::vector<Hint>& hints) {
  std::string out(kHeaderPrefix);
  out += std::to_string(hints.size()) + " items):";
  for (const Hint& h : hints) {
    out += "\n[" + h.hint_id + "] (";
    out += category_code(h.category);
    out += "/" + h.rule_id + ") " + h.text;
  }
  return out;
}

std::vector<Hint> parse_hint_block(std::string_view block) {
  static const std::regex kLine(
      R"(^\[(H[0-9]+)\] \(([A-Z_]+)/([A-Z][0-9]+)\) (.*)$)");
  static const std::regex kLocation(R"(^line ([0-9]+):)");
  std::vector<Hint> hints;
  for (const std::string& raw : split(block, '\n')) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (!std::regex_match(line, m, kLine)) continue;
    Category category;
    try {
      category = category_from_code(m[2].str());
    } catch (const ConfigError&) {
      continue;
    }
    Hint h;
    h.hint_id = m[1].str();
    h.category = category;
    h.rule_id = m[3].str();
    h.text = m[4].str();
    std::smatch loc;
    if (std::regex_search(h.text, loc, kLocation)) {
      h.line = std::stoi(loc[1].str());
    }
    hints.push_back(std::move(h));
  }
  return hints;
}

std::string_view guided_instruction() { return kGuidedInstruction; }

std::string_view default_template() { return kDefaultTemplate; }

HintPlacement hint_placement(std::string_view tmpl) {
  const std::size_t pos = tmpl.find(kHintsPlaceholder);
  if (pos == std::string_view::npos) return HintPlacement::end;
  if (tmpl.find(kHintsPlaceholder, pos + 1) != std::string_view::npos) {
    throw ConfigError("template contains {{HINTS}} more than once");
  }
  if (is_blank(tmpl.substr(pos + kHintsPlaceholder.size()))) {
    return HintPlacement::end;
  }
  if (is_blank(tmpl.substr(0, pos))) return HintPlacement::top;
  throw ConfigError(
      "{{HINTS}} must sit at the very start or the very end of the template");
}

PromptBundle assemble_prompt(std::string_view tmpl, std::string_view code,
                             const std::optional<std::vector<Hint>>& hints,
                             Strategy strategy, std::string_view program_id,
                             std::string_view judge_id) {
  const std::size_t code_count = count_occurrences(tmpl, kCodePlaceholder);
  if (code_count == 0) {
    throw ConfigError("template has no {{CODE}} placeholder");
  }
  if (code_count > 1) {
    throw ConfigError("template contains {{CODE}} more than once");
  }
  if (strategy == Strategy::native && hints.has_value()) {
    throw ConfigError("hints cannot be supplied with the native strategy");
  }
  const HintPlacement placement = hint_placement(tmpl);

  std::string base(tmpl);
  replace_all(base, kHintsPlaceholder, "");
  const std::string native = substitute_code(base, code);

  PromptBundle bundle;
  bundle.strategy = strategy;
  bundle.native_template = std::string(tmpl);
  bundle.code = std::string(code);
  bundle.metadata.program_id = std::string(program_id);
  bundle.metadata.judge_id = std::string(judge_id);
  bundle.metadata.strategy = strategy;

  if (strategy == Strategy::native) {
    bundle.rendered = native;
    return bundle;
  }

  const std::vector<Hint> list = hints.value_or(std::vector<Hint>{});
  bundle.metadata.hint_count = static_cast<int>(list.size());
  bundle.hint_block = render_hint_block(list);
  std::string section = *bundle.hint_block;
  if (strategy == Strategy::guided) {
    section += "\n\n";
    section += kGuidedInstruction;
  }
  section += "\n";

  if (placement == HintPlacement::top) {
    bundle.rendered = section + "\n" + native;
  } else {
    bundle.rendered = native;
    if (!bundle.rendered.empty() && bundle.rendered.back() != '\n') {
      bundle.rendered += "\n";
    }
    bundle.rendered += "\n" + section;
  }
  return bundle;
}

}  // namespace cobhint
