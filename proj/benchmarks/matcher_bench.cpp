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

#include <benchmark/benchmark.h>

#include <random>

#include "cobhint/eval.hpp"
#include "random_issues.hpp"

namespace {

using namespace cobhint;

void BM_MatchRandomLists(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int size = static_cast<int>(state.range(0));
  std::vector<std::pair<std::vector<IssueRecord>, std::vector<IssueRecord>>> cases;
  for (int i = 0; i < 64; ++i) {
    cases.emplace_back(testing::random_issues(rng, size),
                       testing::random_issues(rng, size));
  }
  const MatchConfig config;
  std::size_t k = 0;
  for (auto _ : state) {
    const auto& [a, b] = cases[k++ % cases.size()];
    benchmark::DoNotOptimize(match_issues(a, b, config));
  }
}
BENCHMARK(BM_MatchRandomLists)->Arg(6)->Arg(20)->Arg(60);

void BM_TokenOverlap(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(token_overlap(
        "status code WS-FS not tested after READ of CUST-FILE",
        "file status not checked after OPEN of CUST-FILE"));
  }
}
BENCHMARK(BM_TokenOverlap);

}  // namespace
