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

#include "vlafreeze/text.h"

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "vlafreeze/rng.h"

namespace vlafreeze {
namespace {

TEST(NormalizeTest, FoldsCompatibilityForms) {
  EXPECT_EQ(Normalize("\xEF\xBD\x90\xEF\xBD\x95\xEF\xBD\x94 the mug"),  // ｐｕｔ
            "put the mug");
  EXPECT_EQ(Normalize("ﬁll the cup"), "fill the cup");
}

TEST(NormalizeTest, WhiteSpaceCollapsesAndTrims) {
  EXPECT_EQ(Normalize("  pick\tup\n the bowl  "), "pick up the bowl");
  EXPECT_EQ(Normalize("put​down"), "putdown");
}

TEST(NormalizeTest, TerminalRunBecomesOneQuestionMark) {
  EXPECT_EQ(Normalize("What now?!.."), "What now?");
  EXPECT_EQ(Normalize("What now ? ?"), "What now?");
  EXPECT_EQ(Normalize("no mark"), "no mark");
  EXPECT_EQ(Normalize("strip me!!", TerminalPunctuation::kStrip), "strip me");
  EXPECT_EQ(NormalizeTask("open the drawer."), "open the drawer");
}

TEST(NormalizeTest, PunctuationTableEntriesApplyInContext) {
  for (const PunctuationMapping& m : PunctuationTable()) {
    std::string ch;
    char32_t c = m.from;
    // UTF-8 encode the table's code point.
    if (c < 0x80) {
      ch += static_cast<char>(c);
    } else if (c < 0x800) {
      ch += static_cast<char>(0xC0 | (c >> 6));
      ch += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      ch += static_cast<char>(0xE0 | (c >> 12));
      ch += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      ch += static_cast<char>(0x80 | (c & 0x3F));
    }
    const std::string in = "a" + ch + "b";
    EXPECT_EQ(Normalize(in), "a" + std::string(m.to) + "b")
        << "code point U+" << std::hex << static_cast<unsigned>(c);
  }
}

TEST(NormalizeTest, InvalidUtf8IsReplaced) {
  const std::string out = Normalize(std::string("bad \xff byte"));
  EXPECT_NE(out.find("\xEF\xBF\xBD"), std::string::npos);
}

// Property: normalization is idempotent over random mixes of awkward
// characters.
TEST(NormalizeTest, IdempotentOnRandomText) {
  const std::vector<std::string> pool = {
      "a", "B", " ", "  ", "\t", "\n", "?", "!", ".", ",", "'", "-",
      " ", " ", "​", "﻿", "’", "“", "\u2014",
      "\u2013", "。", "¿", "¡", "‽", "Ａ", "？",
      "é", "é", "ﬁ", "①", "½", "、"};
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const int len = static_cast<int>(rng.Below(12));
    for (int i = 0; i < len; ++i) s += pool[rng.Below(pool.size())];
    for (auto mode : {TerminalPunctuation::kCollapseToQuestion,
                      TerminalPunctuation::kStrip}) {
      const std::string once = Normalize(s, mode);
      EXPECT_EQ(Normalize(once, mode), once) << "input: " << s;
    }
  }
}

TEST(DedupKeyTest, CaseAndPunctuationInsensitive) {
  EXPECT_EQ(DedupKey("Put the Mug"), DedupKey("put the mug."));
  EXPECT_EQ(DedupKey("PUT  THE MUG"), DedupKey("put the mug"));
  EXPECT_NE(DedupKey("put the mug"), DedupKey("put a mug"));
}

TEST(SplitWordsTest, PeelsOuterPunctuation) {
  EXPECT_EQ(SplitWords("take (the) robot's arm-rest, now?"),
            (std::vector<std::string>{"take", "(", "the", ")", "robot's",
                                      "arm-rest", ",", "now", "?"}));
  EXPECT_TRUE(SplitWords("   ").empty());
  const std::vector<std::string> words = {"a", "b", "c"};
  EXPECT_EQ(JoinWords(words), "a b c");
}

TEST(TextTest, AsciiLowerAndTrim) {
  EXPECT_EQ(AsciiLower("AbC\xc3\x89"), "abc\xc3\x89");
  EXPECT_EQ(Trim("  x y \n"), "x y");
}

}  // namespace
}  // namespace vlafreeze
