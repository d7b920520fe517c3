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

#include "cobhint/source.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "cobhint/errors.hpp"
#include "text_util.hpp"

namespace cobhint {
namespace {

constexpr std::size_t kIndicatorColumn = 6;  // 0-based column 7
constexpr std::size_t kCodeStart = 7;        // 0-based column 8
constexpr std::size_t kCodeWidth = 65;       // columns 8..72

std::string expand_tabs(std::string_view line) {
  if (line.find('\t') == std::string_view::npos) return std::string(line);
  std::string out;
  for (char c : line) {
    if (c == '\t') {
      do {
        out.push_back(' ');
      } while (out.size() % 8 != 0);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

// Returns the quote character of a literal left open at the end of `text`,
// or 0 when every literal is closed.
char open_literal(std::string_view text) {
  char quote = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quote == 0) {
      if (c == '\'' || c == '"') quote = c;
    } else if (c == quote) {
      if (i + 1 < text.size() && text[i + 1] == quote) {
        ++i;
      } else {
        quote = 0;
      }
    }
  }
  return quote;
}

// Cuts a floating `*>` comment that is not inside a literal.
std::string strip_inline_comment(std::string text) {
  char quote = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quote != 0) {
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '*' && i + 1 < text.size() && text[i + 1] == '>') {
      text.resize(i);
      break;
    }
  }
  return text;
}

void note(std::vector<ParseNote>* notes, int line, std::string message) {
  if (notes != nullptr) notes->push_back({line, std::move(message)});
}

void join_continuation(LogicalLine& prev, std::string_view code, int line,
                       std::vector<ParseNote>* notes) {
  const std::size_t first = code.find_first_not_of(' ');
  if (first == std::string_view::npos) return;
  const char quote = open_literal(prev.text);
  if (quote != 0) {
    // The open literal runs through column 72 of the previous line.
    const std::size_t last_len = prev.text.size() - prev.segments.back().offset;
    if (last_len < kCodeWidth) prev.text.append(kCodeWidth - last_len, ' ');
    std::size_t from = first;
    if (code[first] == quote) {
      ++from;
    } else {
      note(notes, line, "continued literal does not resume with a quote");
    }
    prev.segments.push_back({prev.text.size(), line});
    prev.text.append(code.substr(from));
  } else {
    rtrim_in_place(prev.text);
    prev.segments.push_back({prev.text.size(), line});
    prev.text.append(code.substr(first));
  }
  prev.physical_span.end_line = line;
}

void normalize_fixed(const std::vector<std::string>& physical,
                     std::vector<LogicalLine>& out,
                     std::vector<ParseNote>* notes) {
  for (std::size_t i = 0; i < physical.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const std::string line = expand_tabs(physical[i]);
    if (line.size() <= kIndicatorColumn) continue;
    const char indicator = line[kIndicatorColumn];
    if (indicator == '*' || indicator == '/' || indicator == 'D' ||
        indicator == 'd') {
      continue;
    }
    std::string code = line.size() > kCodeStart
                           ? line.substr(kCodeStart, kCodeWidth)
                           : std::string();
    code = strip_inline_comment(std::move(code));
    if (is_blank(code)) continue;
    if (trim(code).starts_with(">>")) continue;  // compiler directive

    if (indicator == '-') {
      if (!out.empty()) {
        join_continuation(out.back(), code, line_no, notes);
        continue;
      }
      note(notes, line_no, "continuation line without a preceding line");
    }

    LogicalLine logical;
    logical.physical_span = {line_no, line_no};
    logical.segments.push_back({0, line_no});
    if (indicator != ' ' && indicator != '-') {
      note(notes, line_no,
           std::string("unexpected indicator '") + indicator + "' in column 7");
      logical.area = Area::unknown;
    } else {
      const std::size_t first = code.find_first_not_of(' ');
      logical.area = first < 4 ? Area::a : Area::b;
    }
    logical.text = std::move(code);
    out.push_back(std::move(logical));
  }
}

void normalize_free(const std::vector<std::string>& physical,
                    std::vector<LogicalLine>& out) {
  for (std::size_t i = 0; i < physical.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    std::string code = strip_inline_comment(expand_tabs(physical[i]));
    if (is_blank(code)) continue;
    if (trim(code).starts_with(">>")) continue;
    LogicalLine logical;
    logical.physical_span = {line_no, line_no};
    logical.segments.push_back({0, line_no});
    logical.area = Area::unknown;
    logical.text = std::move(code);
    out.push_back(std::move(logical));
  }
}

}  // namespace

int LogicalLine::line_at(std::size_t offset) const {
  int line = physical_span.start_line;
  for (const LineSegment& seg : segments) {
    if (seg.offset > offset) break;
    line = seg.line;
  }
  return line;
}

void validate_encoding(std::string_view text) {
  std::size_t i = 0;
  int line = 1;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c == 0) {
      throw ParseError("NUL byte at line " + std::to_string(line));
    }
    if (c == '\n') ++line;
    if (c < 0x80) {
      ++i;
      continue;
    }
    int extra = 0;
    if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      extra = 3;
    } else {
      throw ParseError("invalid UTF-8 lead byte at line " +
                       std::to_string(line));
    }
    if (i + static_cast<std::size_t>(extra) >= text.size()) {
      throw ParseError("truncated UTF-8 sequence at line " +
                       std::to_string(line));
    }
    for (int k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) {
        throw ParseError("invalid UTF-8 continuation byte at line " +
                         std::to_string(line));
      }
    }
    i += static_cast<std::size_t>(extra) + 1;
  }
}

std::vector<std::string> split_physical_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\r') {
      lines.push_back(std::move(current));
      current.clear();
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else if (c == '\n') {
      lines.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) lines.push_back(std::move(current));
  return lines;
}

std::vector<LogicalLine> normalize_lines(const SourceProgram& program,
                                         std::vector<ParseNote>* notes) {
  std::vector<LogicalLine> out;
  const std::vector<std::string> physical = split_physical_lines(program.text);
  if (program.format == SourceFormat::fixed) {
    normalize_fixed(physical, out, notes);
  } else {
    normalize_free(physical, out);
  }
  for (LogicalLine& line : out) rtrim_in_place(line.text);
  return out;
}

std::string_view to_string(SourceFormat format) {
  return format == SourceFormat::fixed ? "fixed" : "free";
}

SourceFormat source_format_from_string(std::string_view name) {
  if (name == "fixed") return SourceFormat::fixed;
  if (name == "free") return SourceFormat::free;
  throw ConfigError("unknown source format '" + std::string(name) +
                    "' (expected fixed or free)");
}

SourceProgram load_program(const std::filesystem::path& path,
                           SourceFormat format, SourceOrigin origin) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return SourceProgram{path.stem().string(), buf.str(), format, origin};
}

std::vector<SourceProgram> load_directory(const std::filesystem::path& dir,
                                          SourceFormat format,
                                          SourceOrigin origin) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw ConfigError("not a directory: " + dir.string());
  }
  std::vector<SourceProgram> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = to_lower(entry.path().extension().string());
    if (ext != ".cbl" && ext != ".cob") continue;
    out.push_back(load_program(entry.path(), format, origin));
  }
  std::sort(out.begin(), out.end(),
            [](const SourceProgram& a, const SourceProgram& b) {
              return a.id < b.id;
            });
  return out;
}

}  // namespace cobhint
