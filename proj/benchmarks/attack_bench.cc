// Copyright 2026 The vlafreeze Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "vlafreeze/inner_max.h"
#include "vlafreeze/mock_vla.h"
#include "vlafreeze/outer_min.h"
#include "vlafreeze/scene.h"

namespace vlafreeze {
namespace {

constexpr Shape kShape{32, 32, 3};

const std::vector<std::string>& Tasks() {
  static const std::vector<std::string> kTasks = {
      "put the bowl on the plate", "open the top drawer of the cabinet",
      "pick up the metal can and put it in the basket", "close the microwave",
      "move the rack to the left"};
  return kTasks;
}

std::vector<Prompt> Prompts(const MockVla& m, std::size_t n) {
  std::vector<Prompt> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(m.MakePrompt(DefaultTemplate(), Tasks()[i % Tasks().size()]));
  }
  return out;
}

void BM_Forward(benchmark::State& state) {
  const MockVla m;
  const Image x = SyntheticScene(kShape, 1);
  const Prompt p = Prompts(m, 1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(m.Forward(x, p));
}
BENCHMARK(BM_Forward);

void BM_ImageGradient(benchmark::State& state) {
  const MockVla m;
  const Image x = SyntheticScene(kShape, 1);
  const Prompt p = Prompts(m, 1)[0];
  const FreezeSpec spec = MockVla::DefaultFreezeSpec();
  for (auto _ : state) benchmark::DoNotOptimize(m.Evaluate(x, p, spec, kAllGradients));
}
BENCHMARK(BM_ImageGradient);

// One aggregated sign step over N prompts.
void BM_SignStep(benchmark::State& state) {
  const MockVla m;
  const AdversarialImage adv(SyntheticScene(kShape, 1), 4.0 / 255);
  const auto prompts = Prompts(m, static_cast<std::size_t>(state.range(0)));
  const FreezeSpec spec = MockVla::DefaultFreezeSpec();
  for (auto _ : state) {
    benchmark::DoNotOptimize(MinimizeImage(m, adv, prompts, 1, 1.0 / 255, spec));
  }
}
BENCHMARK(BM_SignStep)->Arg(1)->Arg(20);

// One inner-max round over N prompts.
void BM_HardenRound(benchmark::State& state) {
  const MockVla m;
  const Image x = SyntheticScene(kShape, 1);
  const auto prompts = Prompts(m, static_cast<std::size_t>(state.range(0)));
  const FreezeSpec spec = MockVla::DefaultFreezeSpec();
  SynonymLexicon lexicon;
  lexicon.Add("bowl", {"dish", "basin"});
  lexicon.Add("drawer", {"compartment"});
  lexicon.Add("can", {"tin"});
  lexicon.Add("rack", {"shelf"});
  lexicon.Add("close", {"shut"});
  for (auto _ : state) {
    benchmark::DoNotOptimize(HardenPrompts(m, x, prompts, 1, lexicon, spec));
  }
}
BENCHMARK(BM_HardenRound)->Arg(1)->Arg(20);

}  // namespace
}  // namespace vlafreeze

BENCHMARK_MAIN();
