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

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cobhint {

enum class SourceFormat { fixed, free };
enum class SourceOrigin { fixture, injected, external };

// 1-based, inclusive physical line range.
struct Span {
  int start_line = 0;
  int end_line = 0;

  bool contains(int line) const {
    return line >= start_line && line <= end_line;
  }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct SourceProgram {
  std::string id;
  std::string text;
  SourceFormat format = SourceFormat::fixed;
  SourceOrigin origin = SourceOrigin::external;
};

enum class Area { a, b, unknown };

// Where a physical line's contribution starts inside LogicalLine::text.
struct LineSegment {
  std::size_t offset = 0;
  int line = 0;
};

// One line of code after comment removal and continuation joining.
struct LogicalLine {
  Span physical_span;
  std::string text;
  Area area = Area::unknown;
  std::vector<LineSegment> segments;

  // Physical line holding the character at `offset` of `text`.
  int line_at(std::size_t offset) const;
};

struct ParseNote {
  int line = 0;
  std::string message;
};

// Throws ParseError when the text is not decodable (invalid UTF-8 or NUL).
void validate_encoding(std::string_view text);

// Splits raw text into physical lines; CRLF and lone CR are accepted.
std::vector<std::string> split_physical_lines(std::string_view text);

std::vector<LogicalLine> normalize_lines(const SourceProgram& program,
                                         std::vector<ParseNote>* notes = nullptr);

std::string_view to_string(SourceFormat format);
SourceFormat source_format_from_string(std::string_view name);

// Reads a file; the id is the file stem. Throws ConfigError when unreadable.
SourceProgram load_program(const std::filesystem::path& path,
                           SourceFormat format = SourceFormat::fixed,
                           SourceOrigin origin = SourceOrigin::external);

// Every .cbl/.cob file in `dir`, sorted by id.
std::vector<SourceProgram> load_directory(const std::filesystem::path& dir,
                                          SourceFormat format = SourceFormat::fixed,
                                          SourceOrigin origin = SourceOrigin::external);

}  // namespace cobhint
