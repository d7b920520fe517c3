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

#include <string_view>

namespace cobhint {

// All predicates expect uppercased input.

// Words that start a procedure-division statement.
bool is_verb(std::string_view word);

// Reserved words that can never name a user-defined item.
bool is_reserved(std::string_view word);

// ZERO, SPACES, HIGH-VALUES and friends.
bool is_figurative(std::string_view word);

// RETURN-CODE, SORT-RETURN, TALLY and similar compiler-provided items.
bool is_special_register(std::string_view word);

// END-IF, END-READ, ... (scope terminators).
bool is_scope_terminator(std::string_view word);

}  // namespace cobhint
