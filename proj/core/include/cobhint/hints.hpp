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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cobhint/rules.hpp"

namespace cobhint {

enum class Strategy { native, naive, guided };

std::string_view to_string(Strategy s);
// Throws ConfigError for anything but native, naive or guided.
Strategy strategy_from_string(std::string_view name);

struct Hint {
  std::string hint_id;  // H1, H2, ...
  std::string rule_id;
  Category category = Category::structure;
  int line = 0;
  std::string text;  // "line N: <finding message>"

  friend bool operator==(const Hint&, const Hint&) = default;
};

std::vector<Hint> findings_to_hints(const std::vector<Finding>& findings);

// "ANALYTIC HINTS (<n> items):" followed by one "[Hk] (CODE/RULE) text"
// line per hint; LF separated, no trailing newline.
std::string render_hint_block(const std::vector<Hint>& hints);

// Inverse of render_hint_block. Lines that do not look like hints are
// ignored; the header is optional.
std::vector<Hint> parse_hint_block(std::string_view block);

// Versioned wording appended after the hint block by the guided strategy.
inline constexpr std::string_view kGuidedInstructionVersion = "guided-v1";
std::string_view guided_instruction();

inline constexpr std::string_view kCodePlaceholder = "{{CODE}}";
inline constexpr std::string_view kHintsPlaceholder = "{{HINTS}}";

enum class HintPlacement { top, end };

struct PromptMetadata {
  std::string program_id;
  std::string judge_id;
  Strategy strategy = Strategy::native;
  int hint_count = 0;
};

struct PromptBundle {
  Strategy strategy = Strategy::native;
  std::string native_template;
  std::string code;
  std::optional<std::string> hint_block;
  std::string rendered;
  PromptMetadata metadata;
};

// Where hints go for this template. Throws ConfigError when {{HINTS}} is
// neither at the very top nor at the very end.
HintPlacement hint_placement(std::string_view prompt_template);

// Throws ConfigError when the template lacks exactly one {{CODE}}, or when
// hints are supplied with the native strategy.
PromptBundle assemble_prompt(std::string_view prompt_template,
                             std::string_view code,
                             const std::optional<std::vector<Hint>>& hints,
                             Strategy strategy,
                             std::string_view program_id = {},
                             std::string_view judge_id = {});

// The shipped open template, identical to templates/native_prompt.txt.
std::string_view default_template();

}  // namespace cobhint
