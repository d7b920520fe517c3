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

#include <string>
#include <string_view>
#include <vector>

#include "cobhint/source.hpp"

namespace cobhint {

enum class TokenKind { word, number, literal, picture, period, lparen, rparen, op };

struct Token {
  TokenKind kind = TokenKind::word;
  std::string text;   // as written
  std::string upper;  // uppercased for words; verbatim for literals
  int line = 0;       // physical line
  int logical = 0;    // index into the logical line list

  bool is_word() const { return kind == TokenKind::word; }
  bool is_word(std::string_view w) const {
    return kind == TokenKind::word && upper == w;
  }
  bool is_period() const { return kind == TokenKind::period; }
};

std::vector<Token> tokenize(const std::vector<LogicalLine>& lines,
                            std::vector<ParseNote>* notes = nullptr);

// Inner text of a literal token without prefix and delimiters, with doubled
// quotes collapsed. Returns the text unchanged for non-literals.
std::string literal_value(const Token& token);

}  // namespace cobhint
