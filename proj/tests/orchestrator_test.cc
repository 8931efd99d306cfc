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

#include "vlafreeze/orchestrator.h"

#include <gtest/gtest.h>

#include "test_support.h"
#include "vlafreeze/mock_vla.h"
#include "vlafreeze/prompt_forge.h"
#include "vlafreeze/scene.h"

namespace vlafreeze {
namespace {

constexpr Shape kShape{32, 32, 3};

class OrchestratorTest : public ::testing::Test {
 protected:
  std::vector<Prompt> Prompts(std::size_t n) const {
    const auto llm = LoadCorpus(testing::DataDir() / "corpora/llm_generated.txt",
                                CorpusSource::kLlmGenerated);
    return SampleCorpusPrompts(llm, n, 11).ToPrompts(model_.tokenizer(), DefaultTemplate());
  }
  AttackConfig Small(int n) const {
    AttackConfig c;
    c.outer_steps = 8;
    c.inner_steps = 2;
    c.prompt_count = n;
    return c;
  }

  MockVla model_{MockVlaOptions{.seed = 0}};
  Image image_ = SyntheticScene(kShape, 5);
  FreezeSpec spec_ = MockVla::DefaultFreezeSpec();
  SynonymLexicon lexicon_ =
      SynonymLexicon::Load(testing::DataDir() / "lexicon/synonyms.tsv");
};

TEST_F(OrchestratorTest, ZeroInnerStepsEqualsMultiPrompt) {
  AttackConfig c = Small(5);
  c.inner_steps = 0;
  const auto fv = FreezeVlaAttack(model_, image_, c, Prompts(5), lexicon_, spec_);
  const auto mp = BaselineAttack(AttackKind::kMultiPrompt, model_, image_, c, Prompts(5), spec_);
  EXPECT_TRUE(fv.SameOutcome(mp));
  EXPECT_TRUE(fv.substitutions.empty());
}

TEST_F(OrchestratorTest, MinMaxOffEqualsMultiPrompt) {
  AttackConfig c = Small(5);
  c.use_min_max = false;
  const auto fv = FreezeVlaAttack(model_, image_, c, Prompts(5), lexicon_, spec_);
  const auto mp = BaselineAttack(AttackKind::kMultiPrompt, model_, image_, c, Prompts(5), spec_);
  EXPECT_TRUE(fv.SameOutcome(mp));
}

TEST_F(OrchestratorTest, SinglePromptMultiPromptEqualsPgd) {
  const AttackConfig c = Small(1);
  const auto mp = BaselineAttack(AttackKind::kMultiPrompt, model_, image_, c, Prompts(1), spec_);
  const auto pgd = BaselineAttack(AttackKind::kPgdSingle, model_, image_, c, Prompts(1), spec_);
  EXPECT_TRUE(mp.SameOutcome(pgd));
  EXPECT_EQ(pgd.kind, AttackKind::kPgdSingle);
}

TEST_F(OrchestratorTest, DeterministicAcrossRunsAndWorkerCounts) {
  const AttackConfig c = Small(6);
  const auto a = FreezeVlaAttack(model_, image_, c, Prompts(6), lexicon_, spec_);
  const auto b = FreezeVlaAttack(model_, image_, c, Prompts(6), lexicon_, spec_);
  const auto p = FreezeVlaAttack(model_, image_, c, Prompts(6), lexicon_, spec_, {.workers = 3});
  EXPECT_TRUE(a.SameOutcome(b));
  EXPECT_TRUE(a.SameOutcome(p));
}

TEST_F(OrchestratorTest, TraceAndSubstitutionBookkeeping) {
  const AttackConfig c = Small(4);
  const auto r = FreezeVlaAttack(model_, image_, c, Prompts(4), lexicon_, spec_);
  ASSERT_EQ(r.loss_trace.size(), 8u);
  EXPECT_EQ(r.initial_prompts, Prompts(4));
  EXPECT_EQ(r.final_prompts.size(), 4u);
  std::size_t proposals = 0, accepted = 0;
  for (std::size_t k = 0; k < r.loss_trace.size(); ++k) {
    const auto& rec = r.loss_trace[k];
    EXPECT_EQ(rec.iteration, static_cast<int>(k));
    EXPECT_EQ(rec.step.step, static_cast<int>(k));
    EXPECT_LE(rec.step.linf_from_base, c.epsilon + kBallTolerance);
    proposals += rec.proposals;
    accepted += rec.accepted;
  }
  EXPECT_EQ(proposals, r.substitutions.size());
  std::size_t counted = 0;
  for (const auto& s : r.substitutions) {
    EXPECT_GE(s.outer_iteration, 0);
    EXPECT_LT(s.outer_iteration, 8);
    EXPECT_LT(s.round, c.inner_steps);
    counted += s.accepted;
  }
  EXPECT_EQ(counted, accepted);
  EXPECT_EQ(r.adversarial_image.base(), image_);
}

TEST_F(OrchestratorTest, HardenEverySkipsIterations) {
  AttackConfig c = Small(3);
  c.harden_every = 3;
  const auto r = FreezeVlaAttack(model_, image_, c, Prompts(3), lexicon_, spec_);
  for (const auto& s : r.substitutions) EXPECT_EQ(s.outer_iteration % 3, 0);
  for (const auto& rec : r.loss_trace) {
    if (rec.iteration % 3 != 0) {
      EXPECT_EQ(rec.proposals, 0);
    }
  }
}

TEST_F(OrchestratorTest, AdapterFailureCarriesPartialResult) {
  const AttackConfig c = Small(2);
  // Each outer step costs 2 gradient + 2 trace evaluations without hardening.
  testing::FailingAdapter failing(model_, 10);
  try {
    BaselineAttack(AttackKind::kMultiPrompt, failing, image_, c, Prompts(2), spec_);
    FAIL();
  } catch (const AttackError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAdapter);
    EXPECT_EQ(e.partial().loss_trace.size(), 2u);
    EXPECT_LE(LinfDistance(e.partial().adversarial_image.current(), image_),
              c.epsilon + kBallTolerance);
  }
}

TEST_F(OrchestratorTest, RandomNoiseStaysInBallAndIsSeeded) {
  AttackConfig c = Small(1);
  c.seed = 3;
  const auto a = BaselineAttack(AttackKind::kRandomNoise, model_, image_, c, {}, spec_);
  const auto b = BaselineAttack(AttackKind::kRandomNoise, model_, image_, c, {}, spec_);
  c.seed = 4;
  const auto other = BaselineAttack(AttackKind::kRandomNoise, model_, image_, c, {}, spec_);
  EXPECT_EQ(a.adversarial_image, b.adversarial_image);
  EXPECT_NE(a.adversarial_image, other.adversarial_image);
  EXPECT_LE(LinfDistance(a.adversarial_image.current(), image_), c.epsilon + kBallTolerance);
  EXPECT_GT(LinfDistance(a.adversarial_image.current(), image_), 0.0);
  EXPECT_TRUE(a.loss_trace.empty());
}

TEST_F(OrchestratorTest, ValidationErrors) {
  auto code_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  AttackConfig c = Small(3);
  c.step_size = 2 * c.epsilon;
  EXPECT_EQ(code_of([&] { FreezeVlaAttack(model_, image_, c, Prompts(3), lexicon_, spec_); }),
            ErrorCode::kValidation);
  EXPECT_EQ(code_of([&] {
              FreezeVlaAttack(model_, image_, Small(3), Prompts(2), lexicon_, spec_);
            }),
            ErrorCode::kValidation);
  EXPECT_EQ(code_of([&] {
              BaselineAttack(AttackKind::kPgdSingle, model_, image_, Small(1), Prompts(2), spec_);
            }),
            ErrorCode::kValidation);
  EXPECT_EQ(code_of([&] {
              BaselineAttack(AttackKind::kFreezeVla, model_, image_, Small(1), Prompts(1), spec_);
            }),
            ErrorCode::kValidation);
  EXPECT_EQ(code_of([&] {
              BaselineAttack(AttackKind::kMultiPrompt, model_, Image::Filled({8, 8, 3}, 0.5),
                             Small(1), Prompts(1), spec_);
            }),
            ErrorCode::kDimension);
}

TEST(AttackNamesTest, RoundTripAndLabels) {
  for (auto k : {AttackKind::kRandomNoise, AttackKind::kPgdSingle, AttackKind::kMultiPrompt,
                 AttackKind::kFreezeVla}) {
    EXPECT_EQ(ParseAttackKind(AttackKindName(k)), k);
  }
  EXPECT_EQ(AttackDisplayName(AttackKind::kFreezeVla, PromptSourceKind::kLlmGenerated),
            "FreezeVLA + GPT");
  EXPECT_EQ(AttackDisplayName(AttackKind::kPgdSingle, PromptSourceKind::kLlmGenerated), "PGD");
  EXPECT_EQ(AttackDisplayName(AttackKind::kMultiPrompt, PromptSourceKind::kCorpusRandom),
            "Multi-Prompt");
  EXPECT_FALSE(ParseAttackKind("fgsm"));
}

}  // namespace
}  // namespace vlafreeze
