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

#include "vlafreeze/tokenizer.h"

#include "vlafreeze/error.h"
#include "vlafreeze/text.h"

namespace vlafreeze {
namespace {

constexpr int kAlphabetSize =
    static_cast<int>(PieceTokenizer::kAlphabet.size());
constexpr int kPunctuationCount =
    static_cast<int>(PieceTokenizer::kPunctuation.size());
constexpr int kPieceCount = kAlphabetSize + kAlphabetSize * kAlphabetSize;

int CharIndex(char c) {
  const auto pos = PieceTokenizer::kAlphabet.find(c);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

}  // namespace

PieceTokenizer::PieceTokenizer() = default;

int PieceTokenizer::vocabulary_size() const {
  return kPunctuationCount + 2 * kPieceCount;
}

int PieceTokenizer::PieceIndex(std::string_view piece) const {
  if (piece.size() == 1) return CharIndex(piece[0]);
  return kAlphabetSize + CharIndex(piece[0]) * kAlphabetSize +
         CharIndex(piece[1]);
}

std::string PieceTokenizer::PieceString(int index) const {
  if (index < kAlphabetSize) return std::string(1, kAlphabet[index]);
  index -= kAlphabetSize;
  return {kAlphabet[index / kAlphabetSize], kAlphabet[index % kAlphabetSize]};
}

Encoding PieceTokenizer::Encode(std::string_view text) const {
  Encoding encoding;
  encoding.words = SplitWords(text);
  for (std::size_t w = 0; w < encoding.words.size(); ++w) {
    const std::string& word = encoding.words[w];
    const int word_index = static_cast<int>(w);
    if (word.size() == 1) {
      const auto punct = kPunctuation.find(word[0]);
      if (punct != std::string_view::npos) {
        encoding.ids.push_back(static_cast<int>(punct));
        encoding.word_of_token.push_back(word_index);
        continue;
      }
    }
    const std::string lower = AsciiLower(word);
    for (char c : lower) {
      if (CharIndex(c) < 0) {
        Fail(ErrorCode::kTokenizer,
             "cannot encode character '" + std::string(1, c) + "' in word '" +
                 word + "'");
      }
    }
    for (std::size_t i = 0; i < lower.size(); i += 2) {
      const std::string_view piece =
          std::string_view(lower).substr(i, std::min<std::size_t>(2, lower.size() - i));
      const int continuation = i == 0 ? 0 : 1;
      encoding.ids.push_back(kPunctuationCount + 2 * PieceIndex(piece) +
                             continuation);
      encoding.word_of_token.push_back(word_index);
    }
  }
  return encoding;
}

std::string PieceTokenizer::Decode(std::span<const int> ids) const {
  std::string out;
  for (int id : ids) {
    if (id < 0 || id >= vocabulary_size()) {
      Fail(ErrorCode::kTokenizer, "token id " + std::to_string(id) +
                                      " outside vocabulary of " +
                                      std::to_string(vocabulary_size()));
    }
    if (id < kPunctuationCount) {
      out.push_back(kPunctuation[id]);
      continue;
    }
    const int piece = (id - kPunctuationCount) / 2;
    const bool initial = (id - kPunctuationCount) % 2 == 0;
    if (initial && !out.empty()) out.push_back(' ');
    out += PieceString(piece);
  }
  return out;
}

std::string PieceTokenizer::Canonical(std::string_view text) const {
  const Encoding encoding = Encode(text);
  return Decode(encoding.ids);
}

}  // namespace vlafreeze
