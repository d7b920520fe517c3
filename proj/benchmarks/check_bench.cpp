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

#include "cobhint/parser.hpp"
#include "cobhint/rules.hpp"
#include "test_support.hpp"

namespace {

using namespace cobhint;

const std::vector<SourceProgram>& fixtures() {
  static const auto f = load_directory(testing::fixtures_dir());
  return f;
}

void BM_ParseFixtures(benchmark::State& state) {
  for (auto _ : state) {
    for (const SourceProgram& p : fixtures()) {
      benchmark::DoNotOptimize(parse_source(p));
    }
  }
  state.SetItemsProcessed(state.iterations() * fixtures().size());
}
BENCHMARK(BM_ParseFixtures);

void BM_CheckFixtures(benchmark::State& state) {
  for (auto _ : state) {
    for (const SourceProgram& p : fixtures()) {
      benchmark::DoNotOptimize(check_program(p));
    }
  }
  state.SetItemsProcessed(state.iterations() * fixtures().size());
}
BENCHMARK(BM_CheckFixtures);

}  // namespace
