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

#ifndef VLAFREEZE_TOKENIZER_H_
#define VLAFREEZE_TOKENIZER_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vlafreeze {

// Token ids with, for each token, the index of the word (per SplitWords)
// it came from.
struct Encoding {
  std::vector<int> ids;
  std::vector<int> word_of_token;
  std::vector<std::string> words;
};

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual int vocabulary_size() const = 0;

  // Throws kTokenizer for text the vocabulary cannot represent.
  virtual Encoding Encode(std::string_view text) const = 0;

  // Throws kTokenizer for ids outside [0, vocabulary_size()).
  virtual std::string Decode(std::span<const int> ids) const = 0;

  // Case-folding the tokenizer applies before encoding; Decode(Encode(t))
  // equals Canonical(t) for every encodable normalized t.
  virtual std::string Canonical(std::string_view text) const = 0;
};

// Word-piece tokenizer over [a-z0-9'-] with pieces of at most two
// characters. Every piece has a word-initial id and a continuation id, so
// decoding is exact. A handful of ASCII punctuation marks are standalone
// tokens that attach to the preceding word when decoded. Input is
// lowercased; any other character is a tokenizer error.
class PieceTokenizer final : public Tokenizer {
 public:
  PieceTokenizer();

  int vocabulary_size() const override;
  Encoding Encode(std::string_view text) const override;
  std::string Decode(std::span<const int> ids) const override;
  std::string Canonical(std::string_view text) const override;

  static constexpr std::string_view kAlphabet =
      "abcdefghijklmnopqrstuvwxyz0123456789'-";
  static constexpr std::string_view kPunctuation = "?,.!:;";

 private:
  int PieceIndex(std::string_view piece) const;
  std::string PieceString(int index) const;
};

}  // namespace vlafreeze

#endif  // VLAFREEZE_TOKENIZER_H_
