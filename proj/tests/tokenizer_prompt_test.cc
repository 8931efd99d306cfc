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

#include <gtest/gtest.h>

#include "vlafreeze/error.h"
#include "vlafreeze/prompt.h"
#include "vlafreeze/rng.h"
#include "vlafreeze/tokenizer.h"

namespace vlafreeze {
namespace {

TEST(PieceTokenizerTest, RoundTripsNormalizedLowercaseText) {
  const PieceTokenizer tok;
  const std::string text = "what action should the robot take to put it's mug-away?";
  const Encoding e = tok.Encode(text);
  EXPECT_EQ(tok.Decode(e.ids), text);
  EXPECT_EQ(tok.Canonical("Put The MUG"), "put the mug");
  for (int id : e.ids) {
    EXPECT_GE(id, 0);
    EXPECT_LT(id, tok.vocabulary_size());
  }
}

TEST(PieceTokenizerTest, WordOfTokenTracksWords) {
  const PieceTokenizer tok;
  const Encoding e = tok.Encode("abc de?");
  ASSERT_EQ(e.words, (std::vector<std::string>{"abc", "de", "?"}));
  EXPECT_EQ(e.word_of_token, (std::vector<int>{0, 0, 1, 2}));
}

TEST(PieceTokenizerTest, RejectsUnknownCharactersAndIds) {
  const PieceTokenizer tok;
  EXPECT_THROW(tok.Encode("caf\xc3\xa9"), Error);
  const std::vector<int> bad = {tok.vocabulary_size()};
  EXPECT_THROW(tok.Decode(bad), Error);
}

// Property: random words over the alphabet decode exactly.
TEST(PieceTokenizerTest, RandomWordsRoundTrip) {
  const PieceTokenizer tok;
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const int words = 1 + static_cast<int>(rng.Below(5));
    for (int w = 0; w < words; ++w) {
      if (w) text += ' ';
      const int len = 1 + static_cast<int>(rng.Below(7));
      for (int i = 0; i < len; ++i) {
        text += PieceTokenizer::kAlphabet[rng.Below(26 + 10)];
      }
    }
    EXPECT_EQ(tok.Decode(tok.Encode(text).ids), text);
  }
}

TEST(PromptTest, TaskSpanCoversOnlyTaskWords) {
  const PieceTokenizer tok;
  const Prompt p = Prompt::FromTask(tok, DefaultTemplate(), "  Put the bowl. ");
  EXPECT_EQ(p.task(), "Put the bowl");
  EXPECT_EQ(p.text(), "What action should the robot take to Put the bowl?");
  EXPECT_EQ(p.task_words(), (std::vector<std::string>{"Put", "the", "bowl"}));
  const Encoding prefix = tok.Encode(DefaultTemplate().prefix);
  EXPECT_EQ(p.task_span().begin, prefix.ids.size());
  EXPECT_EQ(p.task_span().end, p.tokens().size() - 1);  // trailing "?"
  EXPECT_EQ(p.WordTokens(2).size(), 2u);  // "bo" "wl"
  EXPECT_THROW(p.WordTokens(3), Error);
}

TEST(PromptTest, OpenVlaTemplateKeepsSpan) {
  const PieceTokenizer tok;
  const Prompt p = Prompt::FromTask(tok, OpenVlaTemplate(), "open drawer");
  EXPECT_EQ(p.text(), "In: What action should the robot take to open drawer?\nOut:");
  std::string span;
  const auto ids = p.tokens().subspan(p.task_span().begin, p.task_span().size());
  EXPECT_EQ(tok.Decode(std::vector<int>(ids.begin(), ids.end())), "open drawer");
}

TEST(PromptTest, EmptyTaskRejected) {
  const PieceTokenizer tok;
  EXPECT_THROW(Prompt::FromTask(tok, DefaultTemplate(), " ?! "), Error);
}

TEST(PromptTest, SubstitutionRetokenizesAndRecordsHistory) {
  const PieceTokenizer tok;
  const Prompt p = Prompt::FromTask(tok, DefaultTemplate(), "put the can on the rack");
  const Prompt q = p.WithSubstitution(tok, 5, "weighing machine");
  EXPECT_EQ(q.task(), "put the can on the weighing machine");
  EXPECT_EQ(q.task_words().size(), 7u);
  ASSERT_EQ(q.history().size(), 1u);
  EXPECT_EQ(q.history()[0], (Substitution{5, "rack", "weighing machine"}));
  EXPECT_EQ(tok.Decode(q.tokens()),
            "what action should the robot take to put the can on the weighing machine?");
  EXPECT_THROW(p.WithSubstitution(tok, 6, "x"), Error);
  EXPECT_THROW(p.WithSubstitution(tok, 0, "  "), Error);
}

}  // namespace
}  // namespace vlafreeze
