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

#ifndef VLAFREEZE_INNER_MAX_H_
#define VLAFREEZE_INNER_MAX_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vlafreeze/freeze.h"
#include "vlafreeze/image.h"
#include "vlafreeze/lexicon.h"
#include "vlafreeze/model_adapter.h"
#include "vlafreeze/prompt.h"

namespace vlafreeze {

struct SubstitutionRecord {
  std::size_t prompt_index = 0;
  std::size_t word_index = 0;  // within the task words
  std::string old_phrase;
  std::string new_phrase;
  double loss_before = 0.0;
  double loss_after = 0.0;
  double probability_before = 0.0;
  double probability_after = 0.0;
  bool accepted = false;
  int outer_iteration = -1;
  int round = -1;

  friend bool operator==(const SubstitutionRecord&,
                         const SubstitutionRecord&) = default;
};

// Which lexicon candidate each lemma proposes next, for one prompt. Lists
// are cycled in lexicon order so later rounds try new synonyms first.
class CandidateCursor {
 public:
  std::size_t Next(const std::string& lemma, std::size_t candidates);
  std::size_t Peek(const std::string& lemma, std::size_t candidates) const;

  friend bool operator==(const CandidateCursor&,
                         const CandidateCursor&) = default;

 private:
  std::map<std::string, std::size_t> offsets_;
};

struct SubstitutionProposal {
  Prompt candidate;
  std::size_t word_index = 0;
  std::string old_phrase;
  std::string new_phrase;
};

// Picks the substitutable task word with the largest word saliency (ties to
// the lowest index) and swaps in the cursor's next candidate for it.
// Returns nullopt when no task word has lexicon candidates.
std::optional<SubstitutionProposal> ProposeSubstitution(
    const ModelAdapter& adapter, const Image& image, const Prompt& prompt,
    const SynonymLexicon& lexicon, const FreezeSpec& spec,
    CandidateCursor& cursor);

struct AcceptDecision {
  Prompt chosen;
  SubstitutionRecord record;
};

// Keeps `proposal` iff its freeze probability is <= that of `prompt`.
AcceptDecision AcceptOrRevert(const ModelAdapter& adapter, const Image& image,
                              const Prompt& prompt,
                              const SubstitutionProposal& proposal,
                              const FreezeSpec& spec);

struct HardenResult {
  std::vector<Prompt> prompts;
  std::vector<SubstitutionRecord> records;
};

// `rounds` passes; each visits every prompt once, proposing and accepting
// or reverting one substitution. `cursors` (one per prompt) carries the
// candidate cycling state across calls; a fresh set is used when null.
// Prompts are independent within a round and run on up to `workers`
// threads when the adapter allows concurrent reads.
HardenResult HardenPrompts(const ModelAdapter& adapter, const Image& image,
                           std::vector<Prompt> prompts, int rounds,
                           const SynonymLexicon& lexicon,
                           const FreezeSpec& spec,
                           std::vector<CandidateCursor>* cursors = nullptr,
                           int workers = 1);

}  // namespace vlafreeze

#endif  // VLAFREEZE_INNER_MAX_H_
