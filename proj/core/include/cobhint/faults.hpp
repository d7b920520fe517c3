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

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cobhint/source.hpp"

namespace cobhint {

// Counter-based generator: the state advances by a fixed odd constant and
// each output is a bijective mix of the state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n);

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t state_;
};

struct FaultSpec {
  std::vector<std::string> rule_ids;  // empty means every injectable rule
  int faults_min = 3;
  int faults_max = 5;
  std::uint64_t seed = 42;

  void set_faults_per_program(int n) { faults_min = faults_max = n; }
};

// Throws ConfigError for non-injectable rules or a bad fault count.
void validate(const FaultSpec& spec);
std::vector<std::string> injectable_rule_ids();

// One mutation: replacement text for whole physical lines.
struct FaultSite {
  std::string rule_id;
  std::vector<std::pair<int, std::string>> edits;  // 1-based line -> text
  Span region;                                     // hull of edited lines
  std::string note;
};

// Syntactic candidates for `rule_id`; not yet checked against the rules.
std::vector<FaultSite> candidate_sites(const SourceProgram& program,
                                       std::string_view rule_id);

std::string apply_site(const SourceProgram& program, const FaultSite& site);

struct InjectedFault {
  std::string rule_id;
  Span span;
  std::string note;

  friend bool operator==(const InjectedFault&, const InjectedFault&) = default;
};

struct SkippedFault {
  std::string rule_id;
  std::string reason;

  friend bool operator==(const SkippedFault&, const SkippedFault&) = default;
};

struct GroundTruth {
  std::string program_id;
  std::string fixture;
  std::vector<InjectedFault> injected;
  std::vector<SkippedFault> skipped;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct InjectionResult {
  SourceProgram program;
  GroundTruth truth;
};

// Every accepted edit adds exactly one finding, of the injected rule, and
// leaves all earlier findings untouched.
class FaultInjector {
 public:
  explicit FaultInjector(FaultSpec spec);

  const FaultSpec& spec() const { return spec_; }

  // Throws ConfigError when the fixture has error findings of its own.
  InjectionResult inject(const SourceProgram& clean, std::uint64_t index,
                         const std::string& program_id);

  // Sites of each rule that are valid on the unmodified fixture. Cached.
  const std::map<std::string, std::vector<FaultSite>>& valid_sites(
      const SourceProgram& clean);

 private:
  FaultSpec spec_;
  std::mutex mu_;
  std::map<std::string, std::map<std::string, std::vector<FaultSite>>> cache_;
};

InjectionResult inject_faults(const SourceProgram& clean, const FaultSpec& spec,
                              std::uint64_t index = 0,
                              const std::string& program_id = {});

struct Corpus {
  std::uint64_t seed = 0;
  std::vector<SourceProgram> programs;
  std::vector<GroundTruth> truth;
};

// Program i mutates fixture i mod |fixtures| (fixtures sorted by id).
Corpus build_corpus(std::vector<SourceProgram> fixtures, const FaultSpec& spec,
                    int n = 100, int jobs = 1);

struct Manifest {
  std::uint64_t seed = 0;
  std::vector<GroundTruth> programs;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

std::string manifest_to_json(const Manifest& manifest);
// Throws ProtocolError on malformed input.
Manifest manifest_from_json(std::string_view text);

// Writes <program_id>.cbl files and manifest.json.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace cobhint
