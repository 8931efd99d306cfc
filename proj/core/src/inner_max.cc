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

#include "vlafreeze/inner_max.h"

#include "vlafreeze/error.h"
#include "vlafreeze/parallel.h"
#include "vlafreeze/text.h"

namespace vlafreeze {

std::size_t CandidateCursor::Next(const std::string& lemma,
                                  std::size_t candidates) {
  std::size_t& offset = offsets_[lemma];
  const std::size_t pick = offset % candidates;
  offset = pick + 1;
  return pick;
}

std::size_t CandidateCursor::Peek(const std::string& lemma,
                                  std::size_t candidates) const {
  auto it = offsets_.find(lemma);
  return it == offsets_.end() ? 0 : it->second % candidates;
}

std::optional<SubstitutionProposal> ProposeSubstitution(
    const ModelAdapter& adapter, const Image& image, const Prompt& prompt,
    const SynonymLexicon& lexicon, const FreezeSpec& spec,
    CandidateCursor& cursor) {
  const auto& words = prompt.task_words();
  if (words.empty()) return std::nullopt;
  bool any = false;
  for (const auto& word : words) any |= lexicon.Find(word) != nullptr;
  if (!any) return std::nullopt;

  const std::vector<double> scores =
      WordSaliency(prompt, TokenSaliency(adapter, image, prompt, spec));
  std::optional<std::size_t> best;
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (lexicon.Find(words[w]) == nullptr) continue;
    if (!best || scores[w] > scores[*best]) best = w;
  }

  const std::string lemma = AsciiLower(words[*best]);
  const auto& candidates = *lexicon.Find(lemma);
  const std::string& phrase = candidates[cursor.Next(lemma, candidates.size())];
  SubstitutionProposal proposal{
      prompt.WithSubstitution(adapter.tokenizer(), *best, phrase), *best,
      words[*best], phrase};
  return proposal;
}

AcceptDecision AcceptOrRevert(const ModelAdapter& adapter, const Image& image,
                              const Prompt& prompt,
                              const SubstitutionProposal& proposal,
                              const FreezeSpec& spec) {
  const LossEvaluation before = adapter.Evaluate(image, prompt, spec, kNoGradient);
  const LossEvaluation after =
      adapter.Evaluate(image, proposal.candidate, spec, kNoGradient);
  SubstitutionRecord record;
  record.word_index = proposal.word_index;
  record.old_phrase = proposal.old_phrase;
  record.new_phrase = proposal.new_phrase;
  record.loss_before = before.loss;
  record.loss_after = after.loss;
  record.probability_before = before.freeze_probability;
  record.probability_after = after.freeze_probability;
  record.accepted = after.freeze_probability <= before.freeze_probability;
  return AcceptDecision{record.accepted ? proposal.candidate : prompt,
                        std::move(record)};
}

HardenResult HardenPrompts(const ModelAdapter& adapter, const Image& image,
                           std::vector<Prompt> prompts, int rounds,
                           const SynonymLexicon& lexicon,
                           const FreezeSpec& spec,
                           std::vector<CandidateCursor>* cursors,
                           int workers) {
  if (rounds < 0) Fail(ErrorCode::kValidation, "inner rounds must be >= 0");
  if (prompts.empty()) Fail(ErrorCode::kValidation, "no prompts to harden");
  std::vector<CandidateCursor> local;
  if (cursors == nullptr) cursors = &local;
  cursors->resize(prompts.size());
  if (!adapter.concurrent_reads()) workers = 1;

  HardenResult result;
  std::vector<std::optional<SubstitutionRecord>> round_records(prompts.size());
  for (int round = 0; round < rounds; ++round) {
    ParallelFor(prompts.size(), workers, [&](std::size_t i) {
      round_records[i].reset();
      auto proposal = ProposeSubstitution(adapter, image, prompts[i], lexicon,
                                          spec, (*cursors)[i]);
      if (!proposal) return;
      AcceptDecision decision =
          AcceptOrRevert(adapter, image, prompts[i], *proposal, spec);
      decision.record.prompt_index = i;
      decision.record.round = round;
      prompts[i] = std::move(decision.chosen);
      round_records[i] = std::move(decision.record);
    });
    for (auto& record : round_records) {
      if (record) result.records.push_back(std::move(*record));
    }
  }
  result.prompts = std::move(prompts);
  return result;
}

}  // namespace vlafreeze
