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

#include "cobhint/keywords.hpp"

#include <algorithm>
#include <array>
#include <string_view>

namespace cobhint {
namespace {

using namespace std::string_view_literals;

template <std::size_t N>
std::array<std::string_view, N> sorted(std::array<std::string_view, N> table) {
  std::sort(table.begin(), table.end());
  return table;
}

template <std::size_t N>
bool contains_word(const std::array<std::string_view, N>& table,
                   std::string_view word) {
  return std::binary_search(table.begin(), table.end(), word);
}

constexpr std::array kVerbs = {
    "ACCEPT"sv,  "ADD"sv,       "ALTER"sv,     "CALL"sv,      "CANCEL"sv,
    "CLOSE"sv,   "COMPUTE"sv,   "CONTINUE"sv,  "DELETE"sv,    "DISPLAY"sv,
    "DIVIDE"sv,  "ENTRY"sv,     "EVALUATE"sv,  "EXIT"sv,      "GO"sv,
    "GOBACK"sv,  "IF"sv,        "INITIALIZE"sv, "INSPECT"sv,  "MERGE"sv,
    "MOVE"sv,    "MULTIPLY"sv,  "OPEN"sv,      "PERFORM"sv,   "READ"sv,
    "RELEASE"sv, "RETURN"sv,    "REWRITE"sv,   "SEARCH"sv,    "SET"sv,
    "SORT"sv,    "START"sv,     "STOP"sv,      "STRING"sv,    "SUBTRACT"sv,
    "UNSTRING"sv, "WRITE"sv,
};

constexpr std::array kTerminators = {
    "END-ACCEPT"sv,   "END-ADD"sv,      "END-CALL"sv,     "END-COMPUTE"sv,
    "END-DELETE"sv,   "END-DISPLAY"sv,  "END-DIVIDE"sv,   "END-EVALUATE"sv,
    "END-IF"sv,       "END-MULTIPLY"sv, "END-PERFORM"sv,  "END-READ"sv,
    "END-RETURN"sv,   "END-REWRITE"sv,  "END-SEARCH"sv,   "END-START"sv,
    "END-STRING"sv,   "END-SUBTRACT"sv, "END-UNSTRING"sv, "END-WRITE"sv,
};

constexpr std::array kFiguratives = {
    "ALL"sv,        "HIGH-VALUE"sv, "HIGH-VALUES"sv, "LOW-VALUE"sv,
    "LOW-VALUES"sv, "NULL"sv,       "NULLS"sv,       "QUOTE"sv,
    "QUOTES"sv,     "SPACE"sv,      "SPACES"sv,      "ZERO"sv,
    "ZEROES"sv,     "ZEROS"sv,
};

constexpr std::array kSpecialRegisters = {
    "DEBUG-ITEM"sv,    "LENGTH"sv,        "LINAGE-COUNTER"sv, "RETURN-CODE"sv,
    "SHIFT-IN"sv,      "SHIFT-OUT"sv,     "SORT-CONTROL"sv,   "SORT-CORE-SIZE"sv,
    "SORT-FILE-SIZE"sv, "SORT-MESSAGE"sv, "SORT-MODE-SIZE"sv, "SORT-RETURN"sv,
    "TALLY"sv,         "WHEN-COMPILED"sv, "XML-CODE"sv,       "XML-EVENT"sv,
    "XML-TEXT"sv,
};

// Clause words, phrase words and device names that show up in statement
// operands but never refer to user data.
constexpr std::array kReserved = {
    "ACCESS"sv,       "ADDRESS"sv,      "ADVANCING"sv,    "AFTER"sv,
    "ALPHABETIC"sv,   "ALPHABETIC-LOWER"sv, "ALPHABETIC-UPPER"sv,
    "ALPHANUMERIC"sv, "ALSO"sv,         "AND"sv,          "ANY"sv,
    "ARE"sv,          "AREA"sv,         "AREAS"sv,        "ASCENDING"sv,
    "ASSIGN"sv,       "AT"sv,           "BEFORE"sv,       "BINARY"sv,
    "BLANK"sv,        "BLOCK"sv,        "BOTTOM"sv,       "BY"sv,
    "CHARACTER"sv,    "CHARACTERS"sv,   "CLASS"sv,        "COMMA"sv,
    "COMP"sv,         "COMP-1"sv,       "COMP-2"sv,       "COMP-3"sv,
    "COMP-4"sv,       "COMP-5"sv,       "COMPUTATIONAL"sv, "COMPUTATIONAL-3"sv,
    "CONSOLE"sv,      "CONTAINS"sv,     "CONTENT"sv,      "CONVERTING"sv,
    "COPY"sv,         "CORR"sv,         "CORRESPONDING"sv, "COUNT"sv,
    "CURRENCY"sv,     "DATA"sv,         "DATE"sv,         "DAY"sv,
    "DAY-OF-WEEK"sv,  "DECIMAL-POINT"sv, "DELIMITED"sv,   "DELIMITER"sv,
    "DEPENDING"sv,    "DESCENDING"sv,   "DIVISION"sv,     "DOWN"sv,
    "DYNAMIC"sv,      "ELSE"sv,         "END"sv,          "END-OF-PAGE"sv,
    "ENVIRONMENT"sv,  "EOP"sv,          "EQUAL"sv,        "ERROR"sv,
    "EXCEPTION"sv,    "EXTEND"sv,       "EXTERNAL"sv,     "FALSE"sv,
    "FD"sv,           "FILE"sv,         "FILE-CONTROL"sv, "FILLER"sv,
    "FIRST"sv,        "FOR"sv,          "FROM"sv,         "FUNCTION"sv,
    "GIVING"sv,       "GLOBAL"sv,       "GREATER"sv,      "I-O"sv,
    "I-O-CONTROL"sv,  "IDENTIFICATION"sv, "IN"sv,         "INDEX"sv,
    "INDEXED"sv,      "INITIAL"sv,      "INPUT"sv,        "INPUT-OUTPUT"sv,
    "INTO"sv,         "INVALID"sv,      "IS"sv,           "JUST"sv,
    "JUSTIFIED"sv,    "KEY"sv,          "LABEL"sv,        "LEADING"sv,
    "LEFT"sv,         "LESS"sv,         "LINE"sv,         "LINES"sv,
    "LINKAGE"sv,      "LOCAL-STORAGE"sv, "LOCK"sv,        "MODE"sv,
    "NATIVE"sv,       "NEGATIVE"sv,     "NEXT"sv,         "NO"sv,
    "NOT"sv,          "NUMERIC"sv,      "OCCURS"sv,       "OF"sv,
    "OFF"sv,          "OMITTED"sv,      "ON"sv,           "OPTIONAL"sv,
    "OR"sv,           "ORGANIZATION"sv, "OTHER"sv,        "OUTPUT"sv,
    "OVERFLOW"sv,     "PACKED-DECIMAL"sv, "PAGE"sv,       "PARAGRAPH"sv,
    "PIC"sv,          "PICTURE"sv,      "POINTER"sv,      "POSITIVE"sv,
    "PROCEDURE"sv,    "PROGRAM"sv,      "PROGRAM-ID"sv,   "RANDOM"sv,
    "RECORD"sv,       "RECORDING"sv,    "RECORDS"sv,      "REDEFINES"sv,
    "REEL"sv,         "REFERENCE"sv,    "RELATIVE"sv,     "REMAINDER"sv,
    "REPLACING"sv,    "REWIND"sv,       "RIGHT"sv,        "ROUNDED"sv,
    "RUN"sv,          "SECTION"sv,      "SELECT"sv,       "SENTENCE"sv,
    "SEPARATE"sv,     "SEQUENTIAL"sv,   "SIGN"sv,         "SIZE"sv,
    "SPECIAL-NAMES"sv, "STANDARD"sv,    "STATUS"sv,       "SYNC"sv,
    "SYNCHRONIZED"sv, "SYSIN"sv,        "SYSOUT"sv,       "TALLYING"sv,
    "TEST"sv,         "THAN"sv,         "THEN"sv,         "THROUGH"sv,
    "THRU"sv,         "TIME"sv,         "TIMES"sv,        "TO"sv,
    "TOP"sv,          "TRAILING"sv,     "TRUE"sv,         "UNIT"sv,
    "UNTIL"sv,        "UP"sv,           "UPON"sv,         "USAGE"sv,
    "USING"sv,        "VALUE"sv,        "VALUES"sv,       "VARYING"sv,
    "WHEN"sv,         "WITH"sv,         "WORDS"sv,        "WORKING-STORAGE"sv,
    "YYYYDDD"sv,      "YYYYMMDD"sv,
};

}  // namespace

bool is_verb(std::string_view word) {
  static const auto table = sorted(kVerbs);
  return contains_word(table, word);
}

bool is_scope_terminator(std::string_view word) {
  static const auto table = sorted(kTerminators);
  return contains_word(table, word);
}

bool is_figurative(std::string_view word) {
  static const auto table = sorted(kFiguratives);
  return contains_word(table, word);
}

bool is_special_register(std::string_view word) {
  static const auto table = sorted(kSpecialRegisters);
  return contains_word(table, word);
}

bool is_reserved(std::string_view word) {
  static const auto table = sorted(kReserved);
  return contains_word(table, word) || is_verb(word) ||
         is_scope_terminator(word) || is_figurative(word) ||
         is_special_register(word);
}

}  // namespace cobhint
