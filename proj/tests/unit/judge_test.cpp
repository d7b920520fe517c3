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

#include <gtest/gtest.h>

#include <atomic>
#include <memory>
#include <cstdlib>
#include <numeric>
#include <set>
#include <thread>

#include "cobhint/errors.hpp"
#include "cobhint/judge.hpp"
#include "httplib.h"
#include "json.hpp"
#include "test_support.hpp"

namespace cobhint {
namespace {

using nlohmann::json;

JudgeConfig live_config() {
  JudgeConfig c;
  c.judge_id = "j1";
  c.endpoint_url = "http://judge.invalid/v1/chat/completions";
  c.model_name = "model-x";
  c.max_retries = 3;
  c.backoff_initial_seconds = 1.0;
  c.backoff_ceiling_seconds = 30.0;
  return c;
}

std::string chat_body(const std::string& content,
                      const std::string& finish = "stop") {
  return json{{"choices",
               {{{"message", {{"role", "assistant"}, {"content", content}}},
                 {"finish_reason", finish}}}},
              {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 7}}}}
      .dump();
}

PromptBundle bundle_with_hints(int n, Strategy s = Strategy::naive,
                               std::string code = "       GOBACK.") {
  std::vector<Hint> hints;
  for (int i = 1; i <= n; ++i) {
    Hint h;
    h.hint_id = "H" + std::to_string(i);
    h.rule_id = "B1";
    h.category = Category::init_omission;
    h.line = 10 * i;
    h.text = "line " + std::to_string(10 * i) + ": item " + std::to_string(i) +
             " is never initialized.";
    hints.push_back(h);
  }
  std::optional<std::vector<Hint>> opt;
  if (s != Strategy::native) opt = hints;
  return assemble_prompt(default_template(), code, opt, s, "prog", "mock");
}

TEST(JudgeConfigTest, ParsesAndValidates) {
  const auto c = judge_config_from_json(
      R"({"judge_id":"a","model_name":"m","endpoint_url":"http://x/","max_retries":0})");
  EXPECT_EQ(c.judge_id, "a");
  EXPECT_EQ(c.max_retries, 0);
  EXPECT_EQ(c.temperature, 0.0);
  EXPECT_THROW(judge_config_from_json(R"({"judge_id":"a","model_name":"m","tempreature":0})"),
               ConfigError);
  EXPECT_THROW(judge_config_from_json(R"({"judge_id":"a","model_name":"m","temperature":-1})"),
               ConfigError);
  EXPECT_THROW(judge_config_from_json(R"({"judge_id":"a","model_name":"m","max_retries":-1})"),
               ConfigError);
  EXPECT_THROW(judge_config_from_json(R"({"judge_id":"a","model_name":3})"),
               ConfigError);
  EXPECT_THROW(judge_config_from_json("not json"), ConfigError);
  EXPECT_THROW(load_judge_config(testing::data_dir() / "none.json"), ConfigError);
  EXPECT_NO_THROW(validate(default_mock_config()));
}

TEST(JudgeConfigTest, LiveNeedsEndpoint) {
  JudgeConfig c = live_config();
  c.endpoint_url.clear();
  EXPECT_THROW(JudgeClient(c, Backend::live), ConfigError);
  EXPECT_NO_THROW(JudgeClient(c, Backend::mock));
  EXPECT_EQ(backend_from_string("MOCK"), Backend::mock);
  EXPECT_THROW(backend_from_string("remote"), ConfigError);
}

TEST(ParseVerdictTest, EmptySectionGivesNoIssues) {
  EXPECT_TRUE(parse_verdict("All good.\nISSUES: none\n").issues.empty());
  EXPECT_TRUE(parse_verdict("```\nISSUES:\n```\n").issues.empty());
  EXPECT_EQ(parse_verdict("ISSUES:\n").quality, ParseQuality::ok);
}

TEST(ParseVerdictTest, ReadsFourIssuesWithLines) {
  const auto v = parse_verdict(
      "Some discussion first.\n\n"
      "```\n"
      "ISSUES:\n"
      "1. [line 12] file opened without status check (addresses: H1)\n"
      "2. [line 40] counter never initialized\n"
      "3) [lines 55-57] loop never ends (category: control flow)\n"
      "4. no line for this one\n"
      "   continued text\n"
      "```\n"
      "Trailing remarks.\n");
  ASSERT_EQ(v.issues.size(), 4u);
  EXPECT_EQ(v.quality, ParseQuality::ok);
  EXPECT_EQ(v.issues[0].line, 12);
  EXPECT_EQ(v.issues[0].hint_ref, "H1");
  EXPECT_EQ(v.issues[0].description, "file opened without status check");
  EXPECT_EQ(v.issues[1].line, 40);
  EXPECT_FALSE(v.issues[1].hint_ref);
  EXPECT_EQ(v.issues[2].line, 55);
  EXPECT_EQ(v.issues[2].category_guess, "CONTROL FLOW");
  EXPECT_FALSE(v.issues[3].line);
  EXPECT_EQ(v.issues[3].description, "no line for this one continued text");
  for (int i = 0; i < 4; ++i) EXPECT_EQ(v.issues[i].index, i + 1);
}

TEST(ParseVerdictTest, UsesTheLastSection) {
  const auto v = parse_verdict(
      "ISSUES:\n1. [line 1] draft\n\nRevised:\nISSUES:\n1. [line 2] final\n");
  ASSERT_EQ(v.issues.size(), 1u);
  EXPECT_EQ(v.issues[0].line, 2);
}

TEST(ParseVerdictTest, ProseDegradesToOneRecord) {
  const auto v = parse_verdict("The program looks fine to me overall.");
  ASSERT_EQ(v.issues.size(), 1u);
  EXPECT_EQ(v.quality, ParseQuality::degraded);
  EXPECT_EQ(v.issues[0].description, "The program looks fine to me overall.");
  EXPECT_FALSE(parse_verdict("").issues[0].description.empty());
}

TEST(VerdictJsonTest, RoundTrips) {
  JudgeVerdict v;
  v.program_id = "p1";
  v.judge_id = "j";
  v.strategy = Strategy::guided;
  v.raw_text = "ISSUES:\n1. [line 3] x (addresses: H2)\n";
  v.issues = parse_verdict(v.raw_text).issues;
  v.usage = {5, 6};
  v.latency_ms = 12.5;
  v.truncated = true;
  const auto back = verdict_from_json(verdict_to_json(v));
  EXPECT_EQ(back.program_id, v.program_id);
  EXPECT_EQ(back.strategy, v.strategy);
  EXPECT_EQ(back.raw_text, v.raw_text);
  EXPECT_EQ(back.issues, v.issues);
  EXPECT_EQ(back.usage, v.usage);
  EXPECT_TRUE(back.truncated);
  EXPECT_EQ(verdict_to_json(back), verdict_to_json(v));
  EXPECT_THROW(verdict_from_json("{}"), ProtocolError);
  EXPECT_THROW(verdict_from_json("[1"), ProtocolError);
}

TEST(MockJudgeTest, EchoesLowestHintIds) {
  const auto b = bundle_with_hints(4);
  const auto v = parse_verdict(mock_judge(b, {0.5, 2}));
  std::vector<std::string> refs;
  for (const auto& i : v.issues) {
    if (i.hint_ref) refs.push_back(*i.hint_ref);
  }
  EXPECT_EQ(refs, (std::vector<std::string>{"H1", "H2"}));
  EXPECT_EQ(v.issues.size(), 4u);
}

TEST(MockJudgeTest, FullEchoAndNativeBundles) {
  const auto all = parse_verdict(mock_judge(bundle_with_hints(5), {1.0, 0}));
  ASSERT_EQ(all.issues.size(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(all.issues[i].hint_ref, "H" + std::to_string(i + 1));
    EXPECT_EQ(all.issues[i].line, 10 * (i + 1));
  }
  const auto native =
      parse_verdict(mock_judge(bundle_with_hints(5, Strategy::native), {1.0, 3}));
  ASSERT_EQ(native.issues.size(), 3u);
  for (const auto& i : native.issues) {
    EXPECT_FALSE(i.hint_ref);
    EXPECT_GE(*i.line, 9000);
  }
  EXPECT_TRUE(
      parse_verdict(mock_judge(bundle_with_hints(0, Strategy::native), {1.0, 0}))
          .issues.empty());
}

TEST(MockJudgeTest, ExtrasDependOnlyOnTheCode) {
  const MockOptions o{0.0, 2};
  const auto a = mock_judge(bundle_with_hints(3, Strategy::naive, "A."), o);
  EXPECT_EQ(a, mock_judge(bundle_with_hints(3, Strategy::naive, "A."), o));
  EXPECT_EQ(a, mock_judge(bundle_with_hints(0, Strategy::native, "A."), o));
  EXPECT_NE(a, mock_judge(bundle_with_hints(3, Strategy::naive, "B."), o));
}

TEST(BackoffTest, DoublesAndRespectsTheCeiling) {
  JudgeConfig c = live_config();
  c.max_retries = 6;
  c.backoff_initial_seconds = 1.0;
  c.backoff_ceiling_seconds = 10.0;
  const auto d = backoff_schedule(c);
  ASSERT_EQ(d.size(), 6u);
  EXPECT_EQ(d[0], 1.0);
  EXPECT_EQ(d[1], 2.0);
  EXPECT_EQ(d[2], 4.0);
  EXPECT_EQ(d[3], 3.0);
  EXPECT_LE(std::accumulate(d.begin(), d.end(), 0.0), 10.0);
}

TEST(BackoffTest, TotalNeverExceedsCeiling) {
  for (int retries = 0; retries < 12; ++retries) {
    for (double init : {0.0, 0.1, 1.0, 7.5}) {
      for (double ceil : {0.0, 1.0, 30.0}) {
        JudgeConfig c = live_config();
        c.max_retries = retries;
        c.backoff_initial_seconds = init;
        c.backoff_ceiling_seconds = ceil;
        const auto d = backoff_schedule(c);
        EXPECT_EQ(d.size(), static_cast<std::size_t>(retries));
        EXPECT_LE(std::accumulate(d.begin(), d.end(), 0.0), ceil + 1e-12);
      }
    }
  }
}

class LiveClientTest : public ::testing::Test {
 protected:
  JudgeClient& client(JudgeConfig c = live_config(),
                      std::optional<std::filesystem::path> cache = std::nullopt) {
    clients_.push_back(
        std::make_unique<JudgeClient>(std::move(c), Backend::live, std::move(cache)));
    clients_.back()->set_sleeper([this](double s) { sleeps.push_back(s); });
    return *clients_.back();
  }
  std::vector<double> sleeps;

 private:
  std::vector<std::unique_ptr<JudgeClient>> clients_;
};

TEST_F(LiveClientTest, RetriesTransientFailures) {
  auto& cl = client();
  int calls = 0;
  cl.set_transport([&](const HttpRequest&) {
    ++calls;
    if (calls == 1) return HttpResponse{0, "", "connection refused"};
    if (calls == 2) return HttpResponse{503, "busy", ""};
    return HttpResponse{200, chat_body("ISSUES:\n1. [line 4] bad\n"), ""};
  });
  const auto v = cl.evaluate(bundle_with_hints(1));
  EXPECT_EQ(calls, 3);
  EXPECT_EQ(sleeps, (std::vector<double>{1.0, 2.0}));
  ASSERT_EQ(v.issues.size(), 1u);
  EXPECT_EQ(v.usage, (Usage{11, 7}));
  EXPECT_EQ(cl.network_calls(), 3);
}

TEST_F(LiveClientTest, GivesUpWithAttemptCount) {
  auto& cl = client();
  cl.set_transport([](const HttpRequest&) { return HttpResponse{429, "", ""}; });
  try {
    cl.evaluate(bundle_with_hints(1));
    FAIL() << "expected BackendError";
  } catch (const BackendError& e) {
    EXPECT_EQ(e.attempts(), 4);
  }
  EXPECT_EQ(sleeps.size(), 3u);
}

TEST_F(LiveClientTest, RejectedCredentialsAreConfigErrors) {
  auto& cl = client();
  int calls = 0;
  cl.set_transport([&](const HttpRequest&) {
    ++calls;
    return HttpResponse{401, "nope", ""};
  });
  EXPECT_THROW(cl.evaluate(bundle_with_hints(1)), ConfigError);
  EXPECT_EQ(calls, 1);
}

TEST_F(LiveClientTest, MalformedBodyKeepsPayload) {
  auto& cl = client();
  cl.set_transport([](const HttpRequest&) {
    return HttpResponse{200, "{\"choices\": []}", ""};
  });
  try {
    cl.evaluate(bundle_with_hints(1));
    FAIL() << "expected ProtocolError";
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.raw_payload(), "{\"choices\": []}");
  }
  cl.set_transport([](const HttpRequest&) { return HttpResponse{418, "tea", ""}; });
  EXPECT_THROW(cl.evaluate(bundle_with_hints(1)), ProtocolError);
}

TEST_F(LiveClientTest, LengthFinishMarksTruncation) {
  auto& cl = client();
  cl.set_transport([](const HttpRequest&) {
    return HttpResponse{200, chat_body("ISSUES:\n1. [line 4] cut sh", "length"), ""};
  });
  const auto v = cl.evaluate(bundle_with_hints(1));
  EXPECT_TRUE(v.truncated);
  ASSERT_EQ(v.issues.size(), 1u);
  EXPECT_EQ(v.issues[0].line, 4);
}

TEST_F(LiveClientTest, CacheServesRepeatsWithoutNetwork) {
  testing::ScratchDir dir("judge-cache");
  auto& cl = client(live_config(), dir.path());
  int calls = 0;
  cl.set_transport([&](const HttpRequest&) {
    ++calls;
    return HttpResponse{200, chat_body("ISSUES:\n1. [line 4] bad\n"), ""};
  });
  const auto first = cl.evaluate(bundle_with_hints(2));
  const auto second = cl.evaluate(bundle_with_hints(2));
  EXPECT_EQ(calls, 1);
  EXPECT_FALSE(first.from_cache);
  EXPECT_TRUE(second.from_cache);
  EXPECT_EQ(second.raw_text, first.raw_text);
  const std::string key =
      cache_key(bundle_with_hints(2).rendered, live_config().model_name);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / (key + ".json")));

  JudgeConfig warm = live_config();
  warm.temperature = 0.7;
  auto& uncached = client(warm, dir.path());
  uncached.set_transport([&](const HttpRequest&) {
    ++calls;
    return HttpResponse{200, chat_body("ISSUES: none"), ""};
  });
  uncached.evaluate(bundle_with_hints(2));
  EXPECT_EQ(calls, 2);
}

TEST_F(LiveClientTest, RequestShapeAndTokenMasking) {
  JudgeConfig c = live_config();
  c.auth = "COBHINT_TEST_TOKEN";
  c.system_prompt = "be strict";
  ::setenv("COBHINT_TEST_TOKEN", "s3cret", 1);
  auto& cl = client(c);
  const auto masked = cl.build_request(bundle_with_hints(1));
  const auto body = json::parse(masked.body);
  EXPECT_EQ(body["model"], "model-x");
  EXPECT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][1]["content"], bundle_with_hints(1).rendered);
  bool saw_auth = false;
  for (const auto& [k, v] : masked.headers) {
    if (k == "Authorization") {
      saw_auth = true;
      EXPECT_EQ(v, "Bearer ***");
    }
  }
  EXPECT_TRUE(saw_auth);
  EXPECT_EQ(masked.body.find("s3cret"), std::string::npos);

  std::string sent_auth;
  cl.set_transport([&](const HttpRequest& r) {
    for (const auto& [k, v] : r.headers) {
      if (k == "Authorization") sent_auth = v;
    }
    return HttpResponse{200, chat_body("ISSUES: none"), ""};
  });
  cl.evaluate(bundle_with_hints(1));
  EXPECT_EQ(sent_auth, "Bearer s3cret");

  ::unsetenv("COBHINT_TEST_TOKEN");
  EXPECT_THROW(cl.evaluate(bundle_with_hints(2)), ConfigError);
}

TEST(MockClientTest, TruncatesToTheOutputBudget) {
  JudgeConfig c = default_mock_config();
  c.max_output_tokens = 20;
  JudgeClient cl(c, Backend::mock);
  const auto v = cl.evaluate(bundle_with_hints(6));
  EXPECT_TRUE(v.truncated);
  EXPECT_LE(v.raw_text.size(), 80u);
  EXPECT_EQ(v.raw_text, mock_judge(bundle_with_hints(6), {1.0, 2}).substr(0, 80));
}

TEST(MockClientTest, CacheKeySeparatesMockKnobs) {
  testing::ScratchDir dir("mock-cache");
  JudgeClient a(default_mock_config(), Backend::mock, dir.path());
  const auto full = a.evaluate(bundle_with_hints(4));
  JudgeClient b(default_mock_config(), Backend::mock, dir.path());
  b.set_mock_options({0.0, 2});
  const auto none = b.evaluate(bundle_with_hints(4));
  EXPECT_FALSE(none.from_cache);
  EXPECT_NE(full.raw_text, none.raw_text);
  EXPECT_TRUE(a.evaluate(bundle_with_hints(4)).from_cache);
  EXPECT_EQ(a.network_calls(), 0);
}

TEST(MockClientTest, EvaluateAllKeepsInputOrder) {
  JudgeConfig c = default_mock_config();
  c.concurrency = 4;
  JudgeClient cl(c, Backend::mock);
  std::vector<PromptBundle> bundles;
  for (int i = 0; i < 12; ++i) {
    auto b = bundle_with_hints(i % 5, Strategy::naive, "CODE" + std::to_string(i));
    b.metadata.program_id = "p" + std::to_string(i);
    bundles.push_back(b);
  }
  const auto out = cl.evaluate_all(bundles);
  ASSERT_EQ(out.size(), bundles.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].program_id, bundles[i].metadata.program_id);
    EXPECT_EQ(out[i].raw_text, mock_judge(bundles[i], {1.0, 2}));
  }
}

TEST(HttpTransportTest, TalksToALocalServer) {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_auth;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                ++hits;
                seen_auth = req.get_header_value("Authorization");
                const auto body = json::parse(req.body);
                const std::string content =
                    "ISSUES:\n1. [line 3] echo of " +
                    body["model"].get<std::string>() + "\n";
                res.set_content(chat_body(content), "application/json");
              });
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  JudgeConfig c = live_config();
  c.endpoint_url =
      "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  c.timeout_seconds = 5.0;
  c.auth = "COBHINT_LOCAL_TOKEN";
  ::setenv("COBHINT_LOCAL_TOKEN", "tok", 1);
  JudgeClient cl(c, Backend::live);
  const auto v = cl.evaluate(bundle_with_hints(1));
  server.stop();
  t.join();
  ::unsetenv("COBHINT_LOCAL_TOKEN");

  EXPECT_EQ(hits.load(), 1);
  EXPECT_EQ(seen_auth, "Bearer tok");
  ASSERT_EQ(v.issues.size(), 1u);
  EXPECT_EQ(v.issues[0].description, "echo of model-x");
  EXPECT_GE(v.latency_ms, 0.0);
}

TEST(HttpTransportTest, UnreachableHostIsATransportError) {
  HttpRequest r;
  r.url = "http://127.0.0.1:1/x";
  r.timeout_seconds = 1.0;
  EXPECT_FALSE(http_post(r).transport_error.empty());
  r.url = "ftp://example";
  EXPECT_THROW(http_post(r), ConfigError);
}

TEST(HashTest, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(cache_key("p", "m"), sha256_hex("p|m"));
}

}  // namespace
}  // namespace cobhint
