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

#include "cobhint/judge.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "cobhint/errors.hpp"
#include "text_util.hpp"

namespace cobhint {

using nlohmann::json;

// ---- configuration ----------------------------------------------------------

void validate(const JudgeConfig& c) {
  auto fail = [](const std::string& what) {
    throw ConfigError("judge config: " + what);
  };
  if (c.judge_id.empty()) fail("judge_id must not be empty");
  if (c.model_name.empty()) fail("model_name must not be empty");
  if (!(c.temperature >= 0.0)) fail("temperature must be >= 0");
  if (c.max_retries < 0) fail("max_retries must be >= 0");
  if (c.max_output_tokens <= 0) fail("max_output_tokens must be > 0");
  if (!(c.timeout_seconds > 0.0)) fail("timeout_seconds must be > 0");
  if (c.concurrency < 1) fail("concurrency must be >= 1");
  if (!(c.backoff_initial_seconds >= 0.0)) {
    fail("backoff_initial_seconds must be >= 0");
  }
  if (!(c.backoff_ceiling_seconds >= 0.0)) {
    fail("backoff_ceiling_seconds must be >= 0");
  }
  if (!(c.requests_per_second >= 0.0)) {
    fail("requests_per_second must be >= 0");
  }
  if (!(c.mock_echo_fraction >= 0.0 && c.mock_echo_fraction <= 1.0)) {
    fail("mock_echo_fraction must lie in [0, 1]");
  }
  if (c.mock_extra_issues < 0) fail("mock_extra_issues must be >= 0");
}

JudgeConfig judge_config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("judge config is not valid JSON: ") +
                      e.what());
  }
  if (!j.is_object()) throw ConfigError("judge config must be a JSON object");

  JudgeConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "judge_id") c.judge_id = value.get<std::string>();
      else if (key == "endpoint_url") c.endpoint_url = value.get<std::string>();
      else if (key == "model_name") c.model_name = value.get<std::string>();
      else if (key == "temperature") c.temperature = value.get<double>();
      else if (key == "max_output_tokens") c.max_output_tokens = value.get<int>();
      else if (key == "timeout_seconds") c.timeout_seconds = value.get<double>();
      else if (key == "max_retries") c.max_retries = value.get<int>();
      else if (key == "auth") c.auth = value.get<std::string>();
      else if (key == "system_prompt") c.system_prompt = value.get<std::string>();
      else if (key == "backoff_initial_seconds") c.backoff_initial_seconds = value.get<double>();
      else if (key == "backoff_ceiling_seconds") c.backoff_ceiling_seconds = value.get<double>();
      else if (key == "concurrency") c.concurrency = value.get<int>();
      else if (key == "requests_per_second") c.requests_per_second = value.get<double>();
      else if (key == "mock_echo_fraction") c.mock_echo_fraction = value.get<double>();
      else if (key == "mock_extra_issues") c.mock_extra_issues = value.get<int>();
      else throw ConfigError("judge config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("judge config: wrong value type: ") +
                      e.what());
  }
  validate(c);
  return c;
}

JudgeConfig load_judge_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read judge config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return judge_config_from_json(buf.str());
}

JudgeConfig default_mock_config() {
  JudgeConfig c;
  c.judge_id = "mock";
  c.model_name = "mock-judge";
  return c;
}

std::string_view to_string(ParseQuality q) {
  return q == ParseQuality::ok ? "ok" : "degraded";
}

std::string_view to_string(Backend b) {
  return b == Backend::live ? "live" : "mock";
}

Backend backend_from_string(std::string_view name) {
  const std::string lower = to_lower(trim(name));
  if (lower == "live") return Backend::live;
  if (lower == "mock") return Backend::mock;
  throw ConfigError("unknown backend: " + std::string(name));
}

// ---- verdict parsing --------------------------------------------------------

namespace {

std::string strip_decoration(std::string_view line) {
  std::string_view t = trim(line);
  while (!t.empty() && (t.front() == '`' || t.front() == '*' ||
                        t.front() == '#' || t.front() == '>')) {
    t.remove_prefix(1);
    t = trim(t);
  }
  return std::string(t);
}

bool starts_with_issues(const std::string& line) {
  return line.size() >= 7 && to_upper(line.substr(0, 7)) == "ISSUES:";
}

bool is_none(std::string_view text) {
  const std::string t = to_lower(trim(text));
  return t == "none" || t == "none." || t == "(none)" || t == "n/a";
}

}  // namespace

ParsedVerdict parse_verdict(std::string_view raw_text) {
  static const std::regex kItem(R"(^(\d+)[.)]\s*(.*)$)");
  static const std::regex kLine(
      R"(^\[\s*(?:lines?\s*)?(\d+)(?:\s*[-,]\s*\d+)?\s*\]\s*)",
      std::regex::icase);
  static const std::regex kAddresses(
      R"(\(\s*addresses\s*:\s*(H\d+)[^)]*\)\s*$)", std::regex::icase);
  static const std::regex kCategory(
      R"(\(\s*category\s*:\s*([A-Za-z_ ]+?)\s*\)\s*$)", std::regex::icase);

  const std::vector<std::string> lines = split_physical_lines(raw_text);
  int section = -1;
  for (int i = static_cast<int>(lines.size()) - 1; i >= 0; --i) {
    if (starts_with_issues(strip_decoration(lines[i]))) {
      section = i;
      break;
    }
  }

  ParsedVerdict out;
  if (section < 0) {
    out.quality = ParseQuality::degraded;
    IssueRecord r;
    r.index = 1;
    r.description = std::string(trim(raw_text));
    if (r.description.empty()) r.description = "(empty response)";
    out.issues.push_back(std::move(r));
    return out;
  }

  std::vector<std::string> body;
  {
    const std::string head = strip_decoration(lines[section]).substr(7);
    if (!is_blank(head)) body.emplace_back(trim(head));
  }
  for (std::size_t i = section + 1; i < lines.size(); ++i) {
    const std::string_view t = trim(lines[i]);
    if (t.rfind("```", 0) == 0) break;
    body.emplace_back(t);
  }

  for (const std::string& text : body) {
    if (text.empty() || is_none(text)) continue;
    std::smatch m;
    std::string line_text = text;
    while (!line_text.empty() && (line_text.front() == '-' ||
                                  line_text.front() == '*')) {
      line_text.erase(0, 1);
      line_text = std::string(trim(line_text));
    }
    if (!std::regex_match(line_text, m, kItem)) {
      if (!out.issues.empty()) {
        out.issues.back().description += " " + line_text;
      }
      continue;
    }
    IssueRecord r;
    r.index = static_cast<int>(out.issues.size()) + 1;
    std::string rest = m[2].str();
    std::smatch lm;
    if (std::regex_search(rest, lm, kLine)) {
      try {
        r.line = std::stoi(lm[1].str());
      } catch (const std::exception&) {
      }
      rest = lm.suffix().str();
    }
    // Trailing tags may come in either order.
    for (int pass = 0; pass < 2; ++pass) {
      std::smatch tm;
      if (!r.hint_ref && std::regex_search(rest, tm, kAddresses)) {
        r.hint_ref = to_upper(tm[1].str());
        rest = tm.prefix().str();
      }
      if (!r.category_guess && std::regex_search(rest, tm, kCategory)) {
        r.category_guess = to_upper(trim(tm[1].str()));
        rest = tm.prefix().str();
      }
    }
    r.description = std::string(trim(rest));
    if (r.description.empty()) r.description = "(no description)";
    out.issues.push_back(std::move(r));
  }
  return out;
}

// ---- verdict JSON -------------------------------------------------------------

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string verdict_to_json(const JudgeVerdict& v) {
  json issues = json::array();
  for (const IssueRecord& r : v.issues) {
    issues.push_back({{"index", r.index},
                      {"line", optional_json(r.line)},
                      {"category_guess", optional_json(r.category_guess)},
                      {"description", r.description},
                      {"hint_ref", optional_json(r.hint_ref)}});
  }
  json j = {{"schema_version", 1},
            {"program_id", v.program_id},
            {"judge_id", v.judge_id},
            {"strategy", std::string(to_string(v.strategy))},
            {"raw_text", v.raw_text},
            {"issues", issues},
            {"usage",
             {{"prompt_tokens", v.usage.prompt_tokens},
              {"completion_tokens", v.usage.completion_tokens}}},
            {"latency_ms", v.latency_ms},
            {"truncated", v.truncated},
            {"parse_quality", std::string(to_string(v.parse_quality))}};
  return j.dump(2) + "\n";
}

JudgeVerdict verdict_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema_version").get<int>() != 1) {
      throw ProtocolError("unsupported verdict schema_version",
                          std::string(text));
    }
    JudgeVerdict v;
    v.program_id = j.at("program_id").get<std::string>();
    v.judge_id = j.at("judge_id").get<std::string>();
    v.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    v.raw_text = j.at("raw_text").get<std::string>();
    for (const json& r : j.at("issues")) {
      IssueRecord rec;
      rec.index = r.at("index").get<int>();
      if (!r.at("line").is_null()) rec.line = r.at("line").get<int>();
      if (!r.at("category_guess").is_null()) {
        rec.category_guess = r.at("category_guess").get<std::string>();
      }
      rec.description = r.at("description").get<std::string>();
      if (!r.at("hint_ref").is_null()) {
        rec.hint_ref = r.at("hint_ref").get<std::string>();
      }
      v.issues.push_back(std::move(rec));
    }
    v.usage.prompt_tokens = j.at("usage").at("prompt_tokens").get<int>();
    v.usage.completion_tokens =
        j.at("usage").at("completion_tokens").get<int>();
    v.latency_ms = j.at("latency_ms").get<double>();
    v.truncated = j.at("truncated").get<bool>();
    v.parse_quality = j.at("parse_quality").get<std::string>() == "ok"
                          ? ParseQuality::ok
                          : ParseQuality::degraded;
    return v;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed verdict: ") + e.what(),
                        std::string(text));
  } catch (const ConfigError& e) {
    throw ProtocolError(std::string("malformed verdict: ") + e.what(),
                        std::string(text));
  }
}

// ---- hashing ----------------------------------------------------------------

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string cache_key(std::string_view prompt, std::string_view model_name) {
  std::string material(prompt);
  material += '|';
  material += model_name;
  return sha256_hex(material);
}

// ---- mock -------------------------------------------------------------------

namespace {

constexpr std::string_view kSyntheticTopics[] = {
    "paragraph names do not follow the shop naming standard",
    "a numeric literal should be a named constant in working storage",
    "the comment block no longer matches the processing logic",
    "report heading literals are misaligned with the detail line",
    "working storage mixes unrelated fields in one group",
    "a display numeric counter could use packed decimal",
    "the program lacks a change history in its header comments",
    "several paragraphs exceed the recommended length",
};

int estimate_tokens(std::string_view text) {
  return static_cast<int>((text.size() + 3) / 4);
}

}  // namespace

std::string mock_judge(const PromptBundle& bundle, const MockOptions& options) {
  std::vector<Hint> hints;
  if (bundle.hint_block) hints = parse_hint_block(*bundle.hint_block);
  const double f = std::clamp(options.echo_fraction, 0.0, 1.0);
  const std::size_t echoed = std::min(
      hints.size(),
      static_cast<std::size_t>(std::floor(f * hints.size() + 1e-9)));

  // Keyed by the code alone, so the reply is a pure function of the prompt
  // and agrees with what the response cache would return.
  const std::string digest = sha256_hex(bundle.code);

  std::string out = "Review of program " + digest.substr(0, 12) + ".\n\n";
  std::vector<std::string> items;
  for (std::size_t i = 0; i < echoed; ++i) {
    const Hint& h = hints[i];
    std::string desc = h.text;
    const std::string prefix = "line " + std::to_string(h.line) + ": ";
    if (desc.rfind(prefix, 0) == 0) desc.erase(0, prefix.size());
    items.push_back("[line " + std::to_string(h.line) + "] " + desc +
                    " (addresses: " + h.hint_id + ")");
  }
  for (int k = 0; k < options.extra_issues; ++k) {
    const unsigned byte = static_cast<unsigned>(
        std::stoul(digest.substr((2 * k) % 60, 2), nullptr, 16));
    const int line = 9000 + 10 * (k + 1) + static_cast<int>(byte % 5);
    const std::string_view topic =
        kSyntheticTopics[(byte + k) % std::size(kSyntheticTopics)];
    items.push_back("[line " + std::to_string(line) + "] " +
                    std::string(topic) + " (ref " + digest.substr(8 * k % 56, 8) +
                    ")");
  }
  out += "```\n";
  if (items.empty()) {
    out += "ISSUES: none\n";
  } else {
    out += "ISSUES:\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
      out += std::to_string(i + 1) + ". " + items[i] + "\n";
    }
  }
  out += "```\n";
  return out;
}

// ---- transport --------------------------------------------------------------

HttpResponse http_post(const HttpRequest& request) {
  static const std::regex kUrl(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)",
                               std::regex::icase);
  std::smatch m;
  HttpResponse out;
  if (!std::regex_match(request.url, m, kUrl)) {
    throw ConfigError("invalid endpoint URL: " + request.url);
  }
  const std::string scheme = to_lower(m[1].str());
  std::string origin = scheme + "://" + m[2].str();
  if (m[3].matched) origin += ":" + m[3].str();
  const std::string path = m[4].matched ? m[4].str() : "/";

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") {
    throw ConfigError("https endpoints need a build with OpenSSL");
  }
#endif
  httplib::Client client(origin);
  const auto secs = static_cast<time_t>(request.timeout_seconds);
  const auto usecs = static_cast<time_t>(
      (request.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  for (const auto& [k, v] : request.headers) headers.emplace(k, v);
  auto res = client.Post(path, headers, request.body, "application/json");
  if (!res) {
    out.transport_error = httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

std::vector<double> backoff_schedule(const JudgeConfig& config) {
  std::vector<double> delays;
  double total = 0.0;
  double next = config.backoff_initial_seconds;
  for (int i = 0; i < config.max_retries; ++i) {
    const double d = std::max(
        0.0, std::min(next, config.backoff_ceiling_seconds - total));
    delays.push_back(d);
    total += d;
    next *= 2.0;
  }
  return delays;
}

// ---- client -----------------------------------------------------------------

JudgeClient::JudgeClient(JudgeConfig config, Backend backend,
                         std::optional<std::filesystem::path> cache_dir)
    : config_(std::move(config)),
      backend_(backend),
      cache_dir_(std::move(cache_dir)),
      transport_(http_post),
      sleeper_([](double s) {
        std::this_thread::sleep_for(std::chrono::duration<double>(s));
      }) {
  validate(config_);
  if (backend_ == Backend::live && config_.endpoint_url.empty()) {
    throw ConfigError("judge config: endpoint_url is required for live use");
  }
  mock_.echo_fraction = config_.mock_echo_fraction;
  mock_.extra_issues = config_.mock_extra_issues;
  if (cache_dir_) {
    std::error_code ec;
    std::filesystem::create_directories(*cache_dir_, ec);
    if (ec) {
      throw ConfigError("cannot create cache directory " +
                        cache_dir_->string() + ": " + ec.message());
    }
  }
}

int JudgeClient::network_calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return network_calls_;
}

std::string JudgeClient::token() const {
  if (config_.auth.empty()) return {};
  const char* value = std::getenv(config_.auth.c_str());
  if (value == nullptr || *value == '\0') {
    throw ConfigError("environment variable " + config_.auth +
                      " holding the judge token is not set");
  }
  return value;
}

HttpRequest JudgeClient::build_request(const PromptBundle& bundle,
                                       bool mask_token) const {
  json messages = json::array();
  if (!config_.system_prompt.empty()) {
    messages.push_back({{"role", "system"}, {"content", config_.system_prompt}});
  }
  messages.push_back({{"role", "user"}, {"content", bundle.rendered}});
  json body = {{"model", config_.model_name},
               {"messages", messages},
               {"temperature", config_.temperature},
               {"max_tokens", config_.max_output_tokens}};
  HttpRequest req;
  req.url = config_.endpoint_url;
  req.body = body.dump();
  req.timeout_seconds = config_.timeout_seconds;
  req.headers.emplace_back("Content-Type", "application/json");
  if (!config_.auth.empty()) {
    req.headers.emplace_back(
        "Authorization",
        "Bearer " + (mask_token ? std::string("***") : token()));
  }
  return req;
}

void JudgeClient::throttle() {
  if (config_.requests_per_second <= 0.0) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_slot_);
    next_slot_ = slot + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(
                                1.0 / config_.requests_per_second));
  }
  std::this_thread::sleep_until(slot);
}

JudgeClient::Completion JudgeClient::call_live(const std::string& prompt) {
  PromptBundle b;
  b.rendered = prompt;
  HttpRequest req = build_request(b, /*mask_token=*/false);
  const std::vector<double> delays = backoff_schedule(config_);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    throttle();
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++network_calls_;
    }
    const HttpResponse res = transport_(req);
    bool transient = false;
    if (!res.transport_error.empty()) {
      transient = true;
      last_error = res.transport_error;
    } else if (res.status == 401 || res.status == 403) {
      throw ConfigError("judge endpoint rejected credentials (HTTP " +
                        std::to_string(res.status) + ")");
    } else if (res.status == 408 || res.status == 429 || res.status >= 500) {
      transient = true;
      last_error = "HTTP " + std::to_string(res.status);
    } else if (res.status != 200) {
      throw ProtocolError("unexpected HTTP status " +
                              std::to_string(res.status),
                          res.body);
    }
    if (transient) {
      if (attempt < config_.max_retries) {
        sleeper_(delays[attempt]);
        continue;
      }
      throw BackendError("judge call failed after " +
                             std::to_string(attempt + 1) +
                             " attempts: " + last_error,
                         attempt + 1);
    }
    Completion c;
    try {
      const json j = json::parse(res.body);
      const json& choice = j.at("choices").at(0);
      c.text = choice.at("message").at("content").get<std::string>();
      if (choice.contains("finish_reason") &&
          choice["finish_reason"].is_string()) {
        c.truncated = choice["finish_reason"].get<std::string>() == "length";
      }
      if (j.contains("usage") && j["usage"].is_object()) {
        c.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
        c.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
      }
    } catch (const json::exception& e) {
      throw ProtocolError(std::string("malformed judge response: ") + e.what(),
                          res.body);
    }
    return c;
  }
  throw BackendError("judge call failed: " + last_error,
                     config_.max_retries + 1);
}

JudgeClient::Completion JudgeClient::complete_uncached(
    const PromptBundle* bundle, const std::string& prompt) {
  if (backend_ == Backend::live) return call_live(prompt);
  Completion c;
  c.text = bundle ? mock_judge(*bundle, mock_) : std::string("no\n");
  const std::size_t budget =
      static_cast<std::size_t>(config_.max_output_tokens) * 4;
  if (c.text.size() > budget) {
    c.text.resize(budget);
    c.truncated = true;
  }
  c.usage.prompt_tokens = estimate_tokens(prompt);
  c.usage.completion_tokens = estimate_tokens(c.text);
  return c;
}

std::optional<JudgeClient::Completion> JudgeClient::cache_get(
    const std::string& key) const {
  if (!cache_dir_ || config_.temperature != 0.0) return std::nullopt;
  std::ifstream in(*cache_dir_ / (key + ".json"), std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    const json j = json::parse(buf.str());
    if (j.at("model_name").get<std::string>() != config_.model_name) {
      return std::nullopt;
    }
    Completion c;
    c.text = j.at("raw_text").get<std::string>();
    c.truncated = j.at("truncated").get<bool>();
    c.usage.prompt_tokens = j.at("usage").at("prompt_tokens").get<int>();
    c.usage.completion_tokens =
        j.at("usage").at("completion_tokens").get<int>();
    return c;
  } catch (const json::exception&) {
    return std::nullopt;  // unreadable entries are recomputed
  }
}

void JudgeClient::cache_put(const std::string& key, const Completion& c) const {
  if (!cache_dir_ || config_.temperature != 0.0) return;
  const json j = {{"model_name", config_.model_name},
                  {"raw_text", c.text},
                  {"truncated", c.truncated},
                  {"usage",
                   {{"prompt_tokens", c.usage.prompt_tokens},
                    {"completion_tokens", c.usage.completion_tokens}}}};
  const std::filesystem::path final_path = *cache_dir_ / (key + ".json");
  std::ostringstream tmp_name;
  tmp_name << key << ".json.tmp." << std::this_thread::get_id();
  const std::filesystem::path tmp = *cache_dir_ / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;
    out << j.dump(2) << "\n";
  }
  std::error_code ec;
  std::filesystem::rename(tmp, final_path, ec);
  if (ec) std::filesystem::remove(tmp, ec);
}

std::string JudgeClient::complete(const std::string& prompt, bool* from_cache) {
  const std::string key = cache_key(prompt, cache_model());
  if (auto hit = cache_get(key)) {
    if (from_cache) *from_cache = true;
    return hit->text;
  }
  if (from_cache) *from_cache = false;
  Completion c = complete_uncached(nullptr, prompt);
  cache_put(key, c);
  return c.text;
}

std::string JudgeClient::cache_model() const {
  if (backend_ == Backend::live) return config_.model_name;
  // Mock output depends on its knobs, so they are part of the address.
  char buf[64];
  std::snprintf(buf, sizeof buf, "|mock:%.17g:%d", mock_.echo_fraction,
                mock_.extra_issues);
  return config_.model_name + buf;
}

JudgeVerdict JudgeClient::evaluate(const PromptBundle& bundle) {
  const std::string key = cache_key(bundle.rendered, cache_model());
  JudgeVerdict v;
  v.program_id = bundle.metadata.program_id;
  v.judge_id = config_.judge_id;
  v.strategy = bundle.strategy;

  Completion c;
  if (auto hit = cache_get(key)) {
    c = std::move(*hit);
    v.from_cache = true;
  } else {
    const auto t0 = std::chrono::steady_clock::now();
    c = complete_uncached(&bundle, bundle.rendered);
    if (backend_ == Backend::live) {
      v.latency_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    }
    cache_put(key, c);
  }
  v.raw_text = std::move(c.text);
  v.usage = c.usage;
  v.truncated = c.truncated;
  ParsedVerdict parsed = parse_verdict(v.raw_text);
  v.issues = std::move(parsed.issues);
  v.parse_quality = parsed.quality;
  return v;
}

std::vector<JudgeVerdict> JudgeClient::evaluate_all(
    const std::vector<PromptBundle>& bundles) {
  std::vector<JudgeVerdict> out(bundles.size());
  const std::size_t workers = std::min<std::size_t>(
      bundles.size(), static_cast<std::size_t>(config_.concurrency));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= bundles.size()) return;
      try {
        out[i] = evaluate(bundles[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        next = bundles.size();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(work);
    for (std::thread& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace cobhint
