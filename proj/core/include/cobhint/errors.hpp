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

#include <stdexcept>
#include <string>

namespace cobhint {

// Input text could not be decoded (invalid UTF-8, embedded NUL).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad flags, templates, judge configuration or credentials.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Judge transport kept failing after all retries.
class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string& what, int attempts)
      : std::runtime_error(what), attempts_(attempts) {}

  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

// The judge answered, but not with something we can read.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(const std::string& what, std::string raw_payload)
      : std::runtime_error(what), raw_payload_(std::move(raw_payload)) {}

  const std::string& raw_payload() const { return raw_payload_; }

 private:
  std::string raw_payload_;
};

}  // namespace cobhint
