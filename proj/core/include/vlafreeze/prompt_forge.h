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

#ifndef VLAFREEZE_PROMPT_FORGE_H_
#define VLAFREEZE_PROMPT_FORGE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlafreeze/error.h"
#include "vlafreeze/prompt.h"

namespace vlafreeze {

enum class CorpusSource {
  kLlmGenerated,
  kLibero10,
  kLiberoGoal,
  kLiberoObject,
  kLiberoSpatial,
  kUser,
};

std::string_view CorpusSourceName(CorpusSource source);
std::optional<CorpusSource> ParseCorpusSource(std::string_view name);

// Normalized task strings (no template), unique case-insensitively.
class PromptCorpus {
 public:
  // Entries are normalized; throws kValidation if the list is empty, an
  // entry normalizes to nothing, or two entries collide case-insensitively.
  PromptCorpus(std::string name, std::vector<std::string> entries,
               CorpusSource source);

  // Same, but later case-insensitive duplicates and empty entries are
  // dropped instead of rejected.
  static PromptCorpus Deduplicated(std::string name,
                                   std::vector<std::string> entries,
                                   CorpusSource source);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& entries() const { return entries_; }
  CorpusSource source() const { return source_; }
  std::size_t size() const { return entries_.size(); }

  bool ContainsCaseInsensitive(std::string_view task) const;

  std::vector<Prompt> ToPrompts(const Tokenizer& tokenizer,
                                const PromptTemplate& prompt_template) const;

  friend bool operator==(const PromptCorpus&, const PromptCorpus&) = default;

 private:
  std::string name_;
  std::vector<std::string> entries_;
  CorpusSource source_;
};

// "What action should the robot take to <task>?" with the task normalized.
// Throws kValidation if the task is empty after normalization.
std::string ApplyTemplate(std::string_view task,
                          const PromptTemplate& prompt_template =
                              DefaultTemplate());

// Inverse of ApplyTemplate, matching the template case-insensitively after
// normalization. Returns nullopt if `text` is not an instance of it.
std::optional<std::string> ExtractTask(std::string_view text,
                                       const PromptTemplate& prompt_template =
                                           DefaultTemplate());

// Corpus text: one task per line, '#' starts a comment line, blank lines
// ignored. Lines that are full template instances are reduced to the task.
PromptCorpus ParseCorpus(std::string_view text, std::string name,
                         CorpusSource source);
PromptCorpus LoadCorpus(const std::filesystem::path& path, CorpusSource source);
std::string FormatCorpus(const PromptCorpus& corpus);
void SaveCorpus(const PromptCorpus& corpus, const std::filesystem::path& path);

// n entries without replacement in draw order (Rng(seed).SampleIndices).
// Throws kValidation if n is zero or exceeds the corpus.
PromptCorpus SampleCorpusPrompts(const PromptCorpus& corpus, std::size_t n,
                                 std::uint64_t seed);

// Union of several corpora in order, later duplicates dropped.
PromptCorpus MergeCorpora(std::string name,
                          std::span<const PromptCorpus> corpora,
                          CorpusSource source);

// ---------------------------------------------------------------------------
// Reference prompt generation through an external chat-completion service.

std::string ReferenceSystemPrompt(int num_prompts);
std::string ReferenceUserPrompt(int num_prompts);

struct LlmGenerationRequest {
  int num_prompts = 20;
  std::string system_prompt;
  std::string user_prompt;
  int retry_limit = 2;
  double timeout_seconds = 60.0;
  // PNG bytes of the scene, attached when the service accepts images.
  std::optional<std::string> scene_png;
  // Text stand-in used when no image is attached.
  std::optional<std::string> scene_description;

  // Request with both prompts instantiated for `num_prompts`.
  static LlmGenerationRequest ForCount(int num_prompts);
  void Validate() const;
};

class LlmService {
 public:
  virtual ~LlmService() = default;
  virtual std::string name() const = 0;
  // One completion. Throws kGeneration when the service cannot be reached
  // or refuses the request.
  virtual std::string Complete(const LlmGenerationRequest& request) = 0;
};

// One numbered list parsed out of a completion.
struct ParsedPromptList {
  std::vector<std::string> tasks;     // normalized, template removed
  std::vector<std::string> rejected;  // numbered lines failing the template
};

// Accepts lines "<index>. What action should the robot take to <task>?"
// (also "<index>)"). Numbered lines whose body does not match the template,
// or whose task contains anything but ASCII letters, digits and spaces, are
// rejected. Throws kParse when the completion contains no
// numbered line or the numbering does not run 1, 2, 3, ...
ParsedPromptList ParseNumberedPromptList(std::string_view completion);

struct TranscriptEntry {
  int attempt = 0;
  int requested = 0;
  std::string system_prompt;
  std::string user_prompt;
  std::string response;
  std::vector<std::string> accepted;
  std::vector<std::string> rejected;
  std::vector<std::string> duplicates;
  std::string error;
};

struct GenerationTranscript {
  std::string service;
  std::vector<TranscriptEntry> entries;

  std::string ToJson() const;
  static GenerationTranscript FromJson(std::string_view json);
  void Save(const std::filesystem::path& path) const;
};

class GenerationError : public Error {
 public:
  GenerationError(const std::string& message, std::vector<std::string> partial)
      : Error(ErrorCode::kGeneration, message), partial_(std::move(partial)) {}

  const std::vector<std::string>& partial() const { return partial_; }

 private:
  std::vector<std::string> partial_;
};

// Calls the service up to 1 + retry_limit times, keeping template-valid,
// case-insensitively new prompts until exactly num_prompts are collected.
// Every call is appended to `transcript` when given. Throws GenerationError
// (with the prompts collected so far) on exhaustion or service failure;
// kParse errors from a malformed list propagate.
PromptCorpus GenerateReferencePrompts(LlmService& service,
                                      const LlmGenerationRequest& request,
                                      GenerationTranscript* transcript = nullptr);

// Replays the responses recorded in a transcript, in order.
class ReplayLlmService final : public LlmService {
 public:
  explicit ReplayLlmService(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}
  static ReplayLlmService FromTranscript(const GenerationTranscript& transcript);

  std::string name() const override { return "replay"; }
  std::string Complete(const LlmGenerationRequest& request) override;

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
};

}  // namespace vlafreeze

#endif  // VLAFREEZE_PROMPT_FORGE_H_
