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

#include "vlafreeze/lexicon.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "vlafreeze/error.h"
#include "vlafreeze/text.h"

namespace vlafreeze {

void SynonymLexicon::Add(std::string_view lemma,
                         const std::vector<std::string>& candidates) {
  const std::string key = AsciiLower(NormalizeTask(lemma));
  if (key.empty()) Fail(ErrorCode::kValidation, "lexicon lemma is empty");
  std::vector<std::string> cleaned;
  for (const auto& raw : candidates) {
    std::string candidate = AsciiLower(NormalizeTask(raw));
    if (candidate.empty()) continue;
    if (candidate == key) {
      Fail(ErrorCode::kValidation,
           "lexicon lemma '" + key + "' lists itself as a candidate");
    }
    if (std::find(cleaned.begin(), cleaned.end(), candidate) == cleaned.end()) {
      cleaned.push_back(std::move(candidate));
    }
  }
  if (cleaned.empty()) {
    Fail(ErrorCode::kValidation,
         "lexicon lemma '" + key + "' has no candidates");
  }
  auto& slot = entries_[key];
  for (auto& candidate : cleaned) {
    if (std::find(slot.begin(), slot.end(), candidate) == slot.end()) {
      slot.push_back(std::move(candidate));
    }
  }
}

const std::vector<std::string>* SynonymLexicon::Find(std::string_view word) const {
  auto it = entries_.find(AsciiLower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t SynonymLexicon::candidate_count() const {
  std::size_t total = 0;
  for (const auto& [lemma, candidates] : entries_) total += candidates.size();
  return total;
}

SynonymLexicon SynonymLexicon::Parse(std::string_view text,
                                     std::string_view source) {
  SynonymLexicon lexicon;
  std::istringstream lines{std::string(text)};
  std::string line;
  int line_number = 0;
  auto where = [&] {
    return std::string(source) + ":" + std::to_string(line_number) + ": ";
  };
  while (std::getline(lines, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      Fail(ErrorCode::kParse, where() + "expected 'lemma<TAB>candidates'");
    }
    const std::string lemma = AsciiLower(NormalizeTask(line.substr(0, tab)));
    if (lexicon.entries_.count(lemma) != 0) {
      Fail(ErrorCode::kValidation, where() + "lemma '" + lemma +
                                       "' already defined");
    }
    std::vector<std::string> candidates;
    std::string rest = line.substr(tab + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto bar = rest.find('|', start);
      const auto end = bar == std::string::npos ? rest.size() : bar;
      candidates.push_back(rest.substr(start, end - start));
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
    try {
      lexicon.Add(lemma, candidates);
    } catch (const Error& error) {
      Fail(error.code(), where() + error.what());
    }
  }
  return lexicon;
}

SynonymLexicon SynonymLexicon::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kMissingArtifact, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str(), path.string());
}

}  // namespace vlafreeze
