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

#ifndef VLAFREEZE_LEXICON_H_
#define VLAFREEZE_LEXICON_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vlafreeze {

// Lowercase lemma -> ordered replacement phrases. Candidates are normalized,
// deduplicated in first-seen order, and never equal to their lemma.
class SynonymLexicon {
 public:
  // Throws kValidation for an empty lemma, an empty candidate list, or a
  // candidate equal to the lemma.
  void Add(std::string_view lemma, const std::vector<std::string>& candidates);

  // Lookup by lowercase surface form; nullptr when absent.
  const std::vector<std::string>* Find(std::string_view word) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t candidate_count() const;
  const std::map<std::string, std::vector<std::string>>& entries() const {
    return entries_;
  }

  // "lemma<TAB>cand1|cand2|..." per line; blank lines and lines starting
  // with '#' are skipped. Errors name the source and line number. A lemma
  // may appear on only one line.
  static SynonymLexicon Parse(std::string_view text,
                              std::string_view source = "<lexicon>");
  static SynonymLexicon Load(const std::filesystem::path& path);

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

}  // namespace vlafreeze

#endif  // VLAFREEZE_LEXICON_H_
