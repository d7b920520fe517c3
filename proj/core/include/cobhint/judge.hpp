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

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cobhint/hints.hpp"

namespace cobhint {

struct JudgeConfig {
  std::string judge_id;
  std::string endpoint_url;  // full chat-completions URL
  std::string model_name;
  double temperature = 0.0;
  int max_output_tokens = 2048;
  double timeout_seconds = 120.0;
  int max_retries = 3;
  std::string auth;  // name of the env var holding the bearer token

  std::string system_prompt;
  double backoff_initial_seconds = 1.0;
  double backoff_ceiling_seconds = 30.0;  // total sleep across retries
  int concurrency = 4;
  double requests_per_second = 0.0;  // 0 disables the rate limit

  // Mock backend knobs.
  double mock_echo_fraction = 1.0;
  int mock_extra_issues = 2;
};

// Throws ConfigError when an invariant is violated.
void validate(const JudgeConfig& config);
// Unknown keys are rejected so typos surface early.
JudgeConfig judge_config_from_json(std::string_view text);
JudgeConfig load_judge_config(const std::filesystem::path& path);
JudgeConfig default_mock_config();

struct Usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;

  friend bool operator==(const Usage&, const Usage&) = default;
};

struct IssueRecord {
  int index = 0;
  std::optional<int> line;
  std::optional<std::string> category_guess;
  std::string description;
  std::optional<std::string> hint_ref;

  friend bool operator==(const IssueRecord&, const IssueRecord&) = default;
};

enum class ParseQuality { ok, degraded };
std::string_view to_string(ParseQuality q);

struct ParsedVerdict {
  std::vector<IssueRecord> issues;
  ParseQuality quality = ParseQuality::ok;
};

// Reads the last "ISSUES:" section, fenced or not. Without one, returns a
// single catch-all record holding the prose and flags degradation.
ParsedVerdict parse_verdict(std::string_view raw_text);

struct JudgeVerdict {
  std::string program_id;
  std::string judge_id;
  Strategy strategy = Strategy::native;
  std::string raw_text;
  std::vector<IssueRecord> issues;
  Usage usage;
  double latency_ms = 0.0;
  bool truncated = false;
  ParseQuality parse_quality = ParseQuality::ok;
  bool from_cache = false;
};

std::string verdict_to_json(const JudgeVerdict& verdict);
// Throws ProtocolError on malformed input.
JudgeVerdict verdict_from_json(std::string_view text);

struct MockOptions {
  double echo_fraction = 1.0;
  int extra_issues = 2;
};

// Deterministic stand-in for a judge. Echoes the lowest floor(f * n) hint
// ids as issues, then adds `extra_issues` synthetic issues on lines 9000+
// derived from a hash of the program text.
std::string mock_judge(const PromptBundle& bundle, const MockOptions& options);

std::string sha256_hex(std::string_view data);
// Content address of a (prompt, model) pair.
std::string cache_key(std::string_view prompt, std::string_view model_name);

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  double timeout_seconds = 0.0;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string transport_error;  // non-empty when no HTTP response arrived
};

using Transport = std::function<HttpResponse(const HttpRequest&)>;
using Sleeper = std::function<void(double seconds)>;

// httplib-backed transport; https needs OpenSSL at build time.
HttpResponse http_post(const HttpRequest& request);

// Delay before retry `attempt` (0-based): initial * 2^attempt, clipped so the
// running total never exceeds the ceiling.
std::vector<double> backoff_schedule(const JudgeConfig& config);

enum class Backend { live, mock };
std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view name);

class JudgeClient {
 public:
  JudgeClient(JudgeConfig config, Backend backend,
              std::optional<std::filesystem::path> cache_dir = std::nullopt);

  // Test seams.
  void set_transport(Transport transport) { transport_ = std::move(transport); }
  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }
  void set_mock_options(MockOptions options) { mock_ = options; }

  const JudgeConfig& config() const { return config_; }

  // The HTTP request a live call would send; the token is masked.
  HttpRequest build_request(const PromptBundle& bundle,
                            bool mask_token = true) const;

  // Throws BackendError (after retries), ConfigError (auth) or
  // ProtocolError (unreadable body).
  JudgeVerdict evaluate(const PromptBundle& bundle);

  // Raw completion for a free-form prompt; used by the LLM matcher.
  std::string complete(const std::string& prompt, bool* from_cache = nullptr);

  // Runs bundles on up to config.concurrency threads, keeping input order.
  std::vector<JudgeVerdict> evaluate_all(const std::vector<PromptBundle>& bundles);

  int network_calls() const;

 private:
  struct Completion {
    std::string text;
    Usage usage;
    bool truncated = false;
  };

  Completion complete_uncached(const PromptBundle* bundle,
                               const std::string& prompt);
  Completion call_live(const std::string& prompt);
  std::optional<Completion> cache_get(const std::string& key) const;
  void cache_put(const std::string& key, const Completion& c) const;
  void throttle();
  std::string cache_model() const;
  std::string token() const;

  JudgeConfig config_;
  Backend backend_;
  std::optional<std::filesystem::path> cache_dir_;
  Transport transport_;
  Sleeper sleeper_;
  MockOptions mock_;

  mutable std::mutex mu_;
  int network_calls_ = 0;
  std::chrono::steady_clock::time_point next_slot_{};
};

}  // namespace cobhint
