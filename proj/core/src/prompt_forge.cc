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

#include "vlafreeze/prompt_forge.h"

#include <array>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "vlafreeze/rng.h"
#include "vlafreeze/text.h"

namespace vlafreeze {
namespace {

constexpr std::array<std::pair<CorpusSource, std::string_view>, 6> kSources = {{
    {CorpusSource::kLlmGenerated, "llm-generated"},
    {CorpusSource::kLibero10, "libero-10"},
    {CorpusSource::kLiberoGoal, "libero-goal"},
    {CorpusSource::kLiberoObject, "libero-object"},
    {CorpusSource::kLiberoSpatial, "libero-spatial"},
    {CorpusSource::kUser, "user"},
}};

void ReplaceAll(std::string& text, std::string_view from, std::string_view to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

bool IsPlainTask(std::string_view task) {
  for (char c : task) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != ' ') return false;
  }
  return !task.empty();
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    Fail(ErrorCode::kMissingArtifact, "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::string_view CorpusSourceName(CorpusSource source) {
  for (const auto& [s, name] : kSources) {
    if (s == source) return name;
  }
  return "user";
}

std::optional<CorpusSource> ParseCorpusSource(std::string_view name) {
  for (const auto& [s, n] : kSources) {
    if (n == name) return s;
  }
  return std::nullopt;
}

PromptCorpus::PromptCorpus(std::string name, std::vector<std::string> entries,
                           CorpusSource source)
    : name_(std::move(name)), source_(source) {
  if (entries.empty()) {
    Fail(ErrorCode::kValidation, "corpus '" + name_ + "' is empty");
  }
  std::unordered_set<std::string> keys;
  entries_.reserve(entries.size());
  for (const auto& raw : entries) {
    std::string task = NormalizeTask(raw);
    if (task.empty()) {
      Fail(ErrorCode::kValidation,
           "corpus '" + name_ + "' has an empty entry");
    }
    if (!keys.insert(DedupKey(task)).second) {
      Fail(ErrorCode::kValidation, "corpus '" + name_ +
                                       "' repeats entry '" + task + "'");
    }
    entries_.push_back(std::move(task));
  }
}

PromptCorpus PromptCorpus::Deduplicated(std::string name,
                                        std::vector<std::string> entries,
                                        CorpusSource source) {
  std::unordered_set<std::string> keys;
  std::vector<std::string> kept;
  for (const auto& raw : entries) {
    std::string task = NormalizeTask(raw);
    if (task.empty()) continue;
    if (keys.insert(DedupKey(task)).second) kept.push_back(std::move(task));
  }
  return PromptCorpus(std::move(name), std::move(kept), source);
}

bool PromptCorpus::ContainsCaseInsensitive(std::string_view task) const {
  const std::string key = DedupKey(task);
  for (const auto& entry : entries_) {
    if (DedupKey(entry) == key) return true;
  }
  return false;
}

std::vector<Prompt> PromptCorpus::ToPrompts(
    const Tokenizer& tokenizer, const PromptTemplate& prompt_template) const {
  std::vector<Prompt> prompts;
  prompts.reserve(entries_.size());
  for (const auto& entry : entries_) {
    prompts.push_back(Prompt::FromTask(tokenizer, prompt_template, entry));
  }
  return prompts;
}

std::string ApplyTemplate(std::string_view task,
                          const PromptTemplate& prompt_template) {
  const std::string normalized = NormalizeTask(task);
  if (normalized.empty()) {
    Fail(ErrorCode::kValidation, "task description is empty");
  }
  return prompt_template.Apply(normalized);
}

std::optional<std::string> ExtractTask(std::string_view text,
                                       const PromptTemplate& prompt_template) {
  const std::string body = AsciiLower(Normalize(text));
  const std::string prefix = AsciiLower(Normalize(prompt_template.prefix));
  const std::string suffix = AsciiLower(Normalize(prompt_template.suffix));
  std::size_t begin = 0;
  if (!prefix.empty()) {
    if (body.size() <= prefix.size() || body.compare(0, prefix.size(), prefix) != 0 ||
        body[prefix.size()] != ' ') {
      return std::nullopt;
    }
    begin = prefix.size() + 1;
  }
  std::size_t end = body.size();
  if (!suffix.empty()) {
    if (end < begin + suffix.size() ||
        body.compare(end - suffix.size(), suffix.size(), suffix) != 0) {
      return std::nullopt;
    }
    end -= suffix.size();
  }
  // Slice the original-case normalized text so casing survives.
  const std::string original = Normalize(text);
  std::string task = NormalizeTask(original.substr(begin, end - begin));
  if (task.empty()) return std::nullopt;
  return task;
}

PromptCorpus ParseCorpus(std::string_view text, std::string name,
                         CorpusSource source) {
  std::vector<std::string> entries;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (auto task = ExtractTask(trimmed)) {
      entries.push_back(*task);
    } else {
      entries.push_back(trimmed);
    }
  }
  return PromptCorpus::Deduplicated(std::move(name), std::move(entries), source);
}

PromptCorpus LoadCorpus(const std::filesystem::path& path, CorpusSource source) {
  return ParseCorpus(ReadFile(path), path.stem().string(), source);
}

std::string FormatCorpus(const PromptCorpus& corpus) {
  std::string out = "# corpus: " + corpus.name() + " (" +
                    std::string(CorpusSourceName(corpus.source())) + ")\n";
  for (const auto& entry : corpus.entries()) out += entry + "\n";
  return out;
}

void SaveCorpus(const PromptCorpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << FormatCorpus(corpus);
}

PromptCorpus SampleCorpusPrompts(const PromptCorpus& corpus, std::size_t n,
                                 std::uint64_t seed) {
  if (n == 0 || n > corpus.size()) {
    Fail(ErrorCode::kValidation,
         "cannot sample " + std::to_string(n) + " prompts from corpus '" +
             corpus.name() + "' of size " + std::to_string(corpus.size()));
  }
  Rng rng(seed);
  std::vector<std::string> picked;
  picked.reserve(n);
  for (std::size_t index : rng.SampleIndices(corpus.size(), n)) {
    picked.push_back(corpus.entries()[index]);
  }
  return PromptCorpus(corpus.name() + "-sample", std::move(picked),
                      corpus.source());
}

PromptCorpus MergeCorpora(std::string name,
                          std::span<const PromptCorpus> corpora,
                          CorpusSource source) {
  std::vector<std::string> entries;
  for (const auto& corpus : corpora) {
    entries.insert(entries.end(), corpus.entries().begin(),
                   corpus.entries().end());
  }
  return PromptCorpus::Deduplicated(std::move(name), std::move(entries), source);
}

std::string ReferenceSystemPrompt(int num_prompts) {
  std::string text =
      "You are an expert robot task planning assistant.\n"
      "Given an image, analyze the scene and generate a list of clear, "
      "concise, high-quality reference prompts describing different specific "
      "actions the robot could take.\n"
      "Focus on actionable, unambiguous instructions suitable for downstream "
      "robot planning.\n"
      "Do not include unnecessary information or speculation.\n"
      "Output exactly {num_prompts} imperative English sentences, each using "
      "the template: What action should the robot take to {prompt}?\n"
      "where {prompt} is a concise description of the goal or task in the "
      "image.\n"
      "Number each prompt from 1 to {num_prompts}.\n"
      "If the image does not contain enough obvious actions, please use your "
      "imagination to invent plausible actions that a robot could perform in "
      "this scene.\n"
      "Do not repeat similar actions; make each prompt as unique as possible.\n"
      "Please ensure that the prompts do not contain any special symbols or "
      "punctuation marks, such as commas, dashes, colons, or any other "
      "punctuation.";
  ReplaceAll(text, "{num_prompts}", std::to_string(num_prompts));
  return text;
}

std::string ReferenceUserPrompt(int num_prompts) {
  std::string text =
      "Based on the image, generate {num_prompts} high-quality, diverse "
      "reference prompts that clearly describe different specific actions the "
      "robot could perform. If the image content is limited, please use your "
      "imagination to create more possible actions. Be precise and concise. "
      "Output as a numbered list.";
  ReplaceAll(text, "{num_prompts}", std::to_string(num_prompts));
  return text;
}

LlmGenerationRequest LlmGenerationRequest::ForCount(int num_prompts) {
  LlmGenerationRequest request;
  request.num_prompts = num_prompts;
  request.system_prompt = ReferenceSystemPrompt(num_prompts);
  request.user_prompt = ReferenceUserPrompt(num_prompts);
  return request;
}

void LlmGenerationRequest::Validate() const {
  if (num_prompts < 1) {
    Fail(ErrorCode::kValidation, "num_prompts must be at least 1");
  }
  if (retry_limit < 0) {
    Fail(ErrorCode::kValidation, "retry_limit must be non-negative");
  }
  if (!(timeout_seconds > 0.0)) {
    Fail(ErrorCode::kValidation, "timeout_seconds must be positive");
  }
}

ParsedPromptList ParseNumberedPromptList(std::string_view completion) {
  static const std::regex kNumbered(R"(^\s*(\d+)\s*[.)]\s*(.*?)\s*$)");
  ParsedPromptList parsed;
  std::istringstream lines{std::string(completion)};
  std::string line;
  int expected = 1;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch match;
    if (!std::regex_match(line, match, kNumbered)) continue;
    const int index = std::stoi(match[1].str());
    if (index != expected) {
      Fail(ErrorCode::kParse, "numbered list expected item " +
                                  std::to_string(expected) + ", got: " + line);
    }
    ++expected;
    const std::string body = match[2].str();
    auto task = ExtractTask(body);
    if (task && IsPlainTask(*task)) {
      parsed.tasks.push_back(*task);
    } else {
      parsed.rejected.push_back(body);
    }
  }
  if (expected == 1) {
    Fail(ErrorCode::kParse,
         "completion contains no numbered list: " + std::string(completion));
  }
  return parsed;
}

std::string GenerationTranscript::ToJson() const {
  nlohmann::ordered_json doc;
  doc["schema"] = "vlafreeze.llm-transcript/1";
  doc["service"] = service;
  doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json item;
    item["attempt"] = e.attempt;
    item["requested"] = e.requested;
    item["system_prompt"] = e.system_prompt;
    item["user_prompt"] = e.user_prompt;
    item["response"] = e.response;
    item["accepted"] = e.accepted;
    item["rejected"] = e.rejected;
    item["duplicates"] = e.duplicates;
    item["error"] = e.error;
    doc["entries"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

GenerationTranscript GenerationTranscript::FromJson(std::string_view json) {
  GenerationTranscript transcript;
  try {
    const auto doc = nlohmann::json::parse(json);
    transcript.service = doc.value("service", "");
    for (const auto& item : doc.at("entries")) {
      TranscriptEntry e;
      e.attempt = item.value("attempt", 0);
      e.requested = item.value("requested", 0);
      e.system_prompt = item.value("system_prompt", "");
      e.user_prompt = item.value("user_prompt", "");
      e.response = item.value("response", "");
      e.accepted = item.value("accepted", std::vector<std::string>{});
      e.rejected = item.value("rejected", std::vector<std::string>{});
      e.duplicates = item.value("duplicates", std::vector<std::string>{});
      e.error = item.value("error", "");
      transcript.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    Fail(ErrorCode::kParse, std::string("bad transcript JSON: ") + ex.what());
  }
  return transcript;
}

void GenerationTranscript::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << ToJson();
}

PromptCorpus GenerateReferencePrompts(LlmService& service,
                                      const LlmGenerationRequest& request,
                                      GenerationTranscript* transcript) {
  request.Validate();
  if (transcript != nullptr && transcript->service.empty()) {
    transcript->service = service.name();
  }
  const auto wanted = static_cast<std::size_t>(request.num_prompts);
  std::vector<std::string> collected;
  std::unordered_set<std::string> keys;

  for (int attempt = 0; attempt <= request.retry_limit; ++attempt) {
    TranscriptEntry entry;
    entry.attempt = attempt;
    entry.requested = request.num_prompts;
    entry.system_prompt = request.system_prompt;
    entry.user_prompt = request.user_prompt;
    auto record = [&] {
      if (transcript != nullptr) transcript->entries.push_back(entry);
    };

    try {
      entry.response = service.Complete(request);
    } catch (const Error& error) {
      entry.error = error.what();
      record();
      throw GenerationError("LLM service failed on attempt " +
                                std::to_string(attempt) + ": " + error.what(),
                            collected);
    }

    ParsedPromptList parsed;
    try {
      parsed = ParseNumberedPromptList(entry.response);
    } catch (const Error& error) {
      entry.error = error.what();
      record();
      throw;
    }
    entry.rejected = parsed.rejected;
    for (auto& task : parsed.tasks) {
      if (!keys.insert(DedupKey(task)).second) {
        entry.duplicates.push_back(task);
      } else if (collected.size() < wanted) {
        entry.accepted.push_back(task);
        collected.push_back(std::move(task));
      }
    }
    record();
    if (collected.size() == wanted) {
      return PromptCorpus("llm-generated", std::move(collected),
                          CorpusSource::kLlmGenerated);
    }
  }
  const std::size_t have = collected.size();
  throw GenerationError("collected " + std::to_string(have) + " of " +
                            std::to_string(wanted) + " prompts after " +
                            std::to_string(request.retry_limit + 1) +
                            " attempt(s)",
                        std::move(collected));
}

ReplayLlmService ReplayLlmService::FromTranscript(
    const GenerationTranscript& transcript) {
  std::vector<std::string> responses;
  for (const auto& entry : transcript.entries) {
    responses.push_back(entry.response);
  }
  return ReplayLlmService(std::move(responses));
}

std::string ReplayLlmService::Complete(const LlmGenerationRequest&) {
  if (next_ >= responses_.size()) {
    Fail(ErrorCode::kGeneration, "replay transcript exhausted after " +
                                     std::to_string(responses_.size()) +
                                     " response(s)");
  }
  return responses_[next_++];
}

}  // namespace vlafreeze
