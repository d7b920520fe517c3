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

#include "cobhint/lexer.hpp"

#include <cctype>

#include "text_util.hpp"

namespace cobhint {
namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' ||
         c == '_';
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!is_digit(c)) return false;
  }
  return true;
}

bool is_literal_prefix(std::string_view upper) {
  return upper == "X" || upper == "Z" || upper == "N" || upper == "G" ||
         upper == "NX" || upper == "B" || upper == "BX" || upper == "U";
}

class LineScanner {
 public:
  LineScanner(const LogicalLine& line, int logical, std::vector<Token>& out,
              std::vector<ParseNote>* notes)
      : line_(line), text_(line.text), logical_(logical), out_(out),
        notes_(notes) {}

  void run() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == ',' || c == ';') {
        ++pos_;
      } else if (c == '\'' || c == '"') {
        scan_literal(pos_, pos_);
      } else if (is_word_char(c) && c != '-') {
        scan_word();
      } else if (c == '.') {
        if (pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1]) &&
            starts_operand()) {
          scan_number_fraction(pos_);
        } else {
          emit(TokenKind::period, pos_, 1);
          ++pos_;
        }
      } else if (c == '(') {
        emit(TokenKind::lparen, pos_, 1);
        ++pos_;
      } else if (c == ')') {
        emit(TokenKind::rparen, pos_, 1);
        ++pos_;
      } else {
        scan_operator();
      }
    }
  }

 private:
  // A period opens a fraction like .25 only after a separator.
  bool starts_operand() const {
    if (pos_ == 0) return true;
    const char p = text_[pos_ - 1];
    return p == ' ' || p == ',' || p == ';' || p == '(';
  }

  void emit(TokenKind kind, std::size_t start, std::size_t len) {
    Token t;
    t.kind = kind;
    t.text = text_.substr(start, len);
    t.upper = kind == TokenKind::literal ? t.text : to_upper(t.text);
    t.line = line_.line_at(start);
    t.logical = logical_;
    out_.push_back(std::move(t));
  }

  void scan_literal(std::size_t token_start, std::size_t quote_pos) {
    const char quote = text_[quote_pos];
    std::size_t i = quote_pos + 1;
    bool closed = false;
    while (i < text_.size()) {
      if (text_[i] == quote) {
        if (i + 1 < text_.size() && text_[i + 1] == quote) {
          i += 2;
          continue;
        }
        closed = true;
        ++i;
        break;
      }
      ++i;
    }
    if (!closed && notes_ != nullptr) {
      notes_->push_back({line_.line_at(token_start), "unterminated literal"});
    }
    emit(TokenKind::literal, token_start, i - token_start);
    pos_ = i;
  }

  void scan_number_fraction(std::size_t start) {
    std::size_t i = start + 1;
    while (i < text_.size() && is_digit(text_[i])) ++i;
    emit(TokenKind::number, start, i - start);
    pos_ = i;
  }

  void scan_word() {
    const std::size_t start = pos_;
    std::size_t i = pos_;
    while (i < text_.size() && is_word_char(text_[i])) ++i;
    // A trailing hyphen belongs to an arithmetic expression, not the word.
    while (i > start + 1 && text_[i - 1] == '-') --i;
    const std::string_view word = std::string_view(text_).substr(start, i - start);
    const std::string upper = to_upper(word);

    if (i < text_.size() && (text_[i] == '\'' || text_[i] == '"') &&
        is_literal_prefix(upper)) {
      scan_literal(start, i);
      return;
    }
    if (all_digits(word)) {
      // Decimal point inside a numeric literal.
      if (i + 1 < text_.size() && text_[i] == '.' && is_digit(text_[i + 1])) {
        std::size_t j = i + 1;
        while (j < text_.size() && is_digit(text_[j])) ++j;
        emit(TokenKind::number, start, j - start);
        pos_ = j;
        return;
      }
      emit(TokenKind::number, start, i - start);
      pos_ = i;
      return;
    }
    emit(TokenKind::word, start, i - start);
    pos_ = i;
    if (upper == "PIC" || upper == "PICTURE") scan_picture();
  }

  void skip_spaces() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
  }

  void scan_picture() {
    skip_spaces();
    if (pos_ + 2 <= text_.size() && to_upper(text_.substr(pos_, 2)) == "IS" &&
        (pos_ + 2 == text_.size() || text_[pos_ + 2] == ' ')) {
      emit(TokenKind::word, pos_, 2);
      pos_ += 2;
      skip_spaces();
    }
    if (pos_ >= text_.size()) return;
    const std::size_t start = pos_;
    std::size_t i = pos_;
    while (i < text_.size() && text_[i] != ' ') ++i;
    std::size_t len = i - start;
    bool period = false;
    if (len > 1 && text_[i - 1] == '.') {
      --len;
      period = true;
    }
    emit(TokenKind::picture, start, len);
    if (period) emit(TokenKind::period, start + len, 1);
    pos_ = i;
  }

  void scan_operator() {
    const char c = text_[pos_];
    const char n = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
    if ((c == '*' && n == '*') || (c == '>' && n == '=') ||
        (c == '<' && n == '=') || (c == '<' && n == '>')) {
      emit(TokenKind::op, pos_, 2);
      pos_ += 2;
      return;
    }
    emit(TokenKind::op, pos_, 1);
    ++pos_;
  }

  const LogicalLine& line_;
  const std::string& text_;
  int logical_;
  std::vector<Token>& out_;
  std::vector<ParseNote>* notes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Token> tokenize(const std::vector<LogicalLine>& lines,
                            std::vector<ParseNote>* notes) {
  std::vector<Token> tokens;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    LineScanner(lines[i], static_cast<int>(i), tokens, notes).run();
  }
  return tokens;
}

std::string literal_value(const Token& token) {
  if (token.kind != TokenKind::literal) return token.text;
  const std::string& t = token.text;
  std::size_t q = t.find_first_of("'\"");
  if (q == std::string::npos) return t;
  const char quote = t[q];
  std::string out;
  std::size_t i = q + 1;
  while (i < t.size()) {
    if (t[i] == quote) {
      if (i + 1 < t.size() && t[i + 1] == quote) {
        out.push_back(quote);
        i += 2;
        continue;
      }
      break;
    }
    out.push_back(t[i]);
    ++i;
  }
  return out;
}

}  // namespace cobhint
