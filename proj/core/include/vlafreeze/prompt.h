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

#ifndef VLAFREEZE_PROMPT_H_
#define VLAFREEZE_PROMPT_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlafreeze/tokenizer.h"

namespace vlafreeze {

// Fixed text around the task description. `prefix` must end in white space
// (or be empty) and `suffix` must start with punctuation or white space (or
// be empty), so the task words tokenize independently of the template.
struct PromptTemplate {
  std::string prefix;
  std::string suffix;

  std::string Apply(std::string_view task) const;
  friend bool operator==(const PromptTemplate&,
                         const PromptTemplate&) = default;
};

// "What action should the robot take to <task>?"
const PromptTemplate& DefaultTemplate();
// "In: What action should the robot take to <task>?\nOut:"
const PromptTemplate& OpenVlaTemplate();
// "<task>"
const PromptTemplate& BareTemplate();

// Half-open token range.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// An accepted synonym substitution inside the task span.
struct Substitution {
  std::size_t word_index = 0;  // within the task words
  std::string old_phrase;
  std::string new_phrase;
  friend bool operator==(const Substitution&, const Substitution&) = default;
};

// A templated prompt: token ids, the token range of the mutable task words,
// and the history of substitutions applied to reach it.
class Prompt {
 public:
  // Normalizes `task` and applies the template. Throws kValidation for an
  // empty task and kTokenizer for text the tokenizer cannot encode.
  static Prompt FromTask(const Tokenizer& tokenizer,
                         const PromptTemplate& prompt_template,
                         std::string_view task);

  const std::string& text() const { return text_; }
  std::span<const int> tokens() const { return tokens_; }
  const std::string& task() const { return task_; }
  const std::vector<std::string>& task_words() const { return task_words_; }
  TokenSpan task_span() const { return task_span_; }
  const PromptTemplate& prompt_template() const { return template_; }
  const std::vector<Substitution>& history() const { return history_; }

  // Tokens of the i-th task word.
  TokenSpan WordTokens(std::size_t task_word) const;

  // Replaces task word `task_word` with `phrase` (one or more words),
  // retokenizes, and appends to the history.
  Prompt WithSubstitution(const Tokenizer& tokenizer, std::size_t task_word,
                          std::string_view phrase) const;

  friend bool operator==(const Prompt&, const Prompt&) = default;

 private:
  Prompt() = default;
  void Build(const Tokenizer& tokenizer);

  std::string text_;
  std::vector<int> tokens_;
  std::string task_;
  std::vector<std::string> task_words_;
  std::vector<TokenSpan> word_tokens_;
  TokenSpan task_span_;
  PromptTemplate template_;
  std::vector<Substitution> history_;
};

}  // namespace vlafreeze

#endif  // VLAFREEZE_PROMPT_H_
