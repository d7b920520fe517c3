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

#include "cobhint/model.hpp"
#include "cobhint/source.hpp"

namespace cobhint {

// Best-effort structural parse. Throws ParseError only when the text cannot
// be decoded; everything else degrades to `other` statements and notes.
ProgramModel parse_source(const SourceProgram& program);

}  // namespace cobhint
