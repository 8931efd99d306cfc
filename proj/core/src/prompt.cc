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

#include "vlafreeze/prompt.h"

#include "vlafreeze/error.h"
#include "vlafreeze/text.h"

namespace vlafreeze {

std::string PromptTemplate::Apply(std::string_view task) const {
  std::string out = prefix;
  out += task;
  out += suffix;
  return out;
}

const PromptTemplate& DefaultTemplate() {
  static const PromptTemplate kTemplate{
      "What action should the robot take to ", "?"};
  return kTemplate;
}

const PromptTemplate& OpenVlaTemplate() {
  static const PromptTemplate kTemplate{
      "In: What action should the robot take to ", "?\nOut:"};
  return kTemplate;
}

const PromptTemplate& BareTemplate() {
  static const PromptTemplate kTemplate{"", ""};
  return kTemplate;
}

Prompt Prompt::FromTask(const Tokenizer& tokenizer,
                        const PromptTemplate& prompt_template,
                        std::string_view task) {
  Prompt prompt;
  prompt.template_ = prompt_template;
  prompt.task_ = NormalizeTask(task);
  if (prompt.task_.empty()) {
    Fail(ErrorCode::kValidation, "task description is empty");
  }
  prompt.Build(tokenizer);
  return prompt;
}

void Prompt::Build(const Tokenizer& tokenizer) {
  task_words_ = SplitWords(task_);
  text_ = template_.Apply(task_);
  Encoding encoding = tokenizer.Encode(text_);
  tokens_ = std::move(encoding.ids);

  const std::size_t prefix_words = SplitWords(template_.prefix).size();
  const std::size_t first = prefix_words;
  const std::size_t last = prefix_words + task_words_.size();
  for (std::size_t w = 0; w < task_words_.size(); ++w) {
    if (first + w >= encoding.words.size() ||
        encoding.words[first + w] != task_words_[w]) {
      Fail(ErrorCode::kValidation,
           "template does not separate task words cleanly: '" + text_ + "'");
    }
  }

  word_tokens_.assign(task_words_.size(), TokenSpan{});
  task_span_ = TokenSpan{tokens_.size(), tokens_.size()};
  bool seen = false;
  for (std::size_t t = 0; t < tokens_.size(); ++t) {
    const auto word = static_cast<std::size_t>(encoding.word_of_token[t]);
    if (word < first || word >= last) continue;
    TokenSpan& span = word_tokens_[word - first];
    if (span.empty()) span = TokenSpan{t, t};
    span.end = t + 1;
    if (!seen) task_span_.begin = t;
    seen = true;
    task_span_.end = t + 1;
  }
  if (!seen) task_span_ = TokenSpan{0, 0};
}

TokenSpan Prompt::WordTokens(std::size_t task_word) const {
  if (task_word >= word_tokens_.size()) {
    Fail(ErrorCode::kValidation,
         "task word " + std::to_string(task_word) + " out of range");
  }
  return word_tokens_[task_word];
}

Prompt Prompt::WithSubstitution(const Tokenizer& tokenizer,
                                std::size_t task_word,
                                std::string_view phrase) const {
  if (task_word >= task_words_.size()) {
    Fail(ErrorCode::kValidation,
         "substitution index " + std::to_string(task_word) + " out of range");
  }
  const std::string normalized = NormalizeTask(phrase);
  if (normalized.empty()) {
    Fail(ErrorCode::kValidation, "substitution phrase is empty");
  }
  Prompt next = *this;
  std::vector<std::string> words = task_words_;
  const std::string old_phrase = words[task_word];
  words[task_word] = normalized;
  next.task_ = JoinWords(words);
  next.Build(tokenizer);
  next.history_.push_back(Substitution{task_word, old_phrase, normalized});
  return next;
}

}  // namespace vlafreeze
