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

#ifndef VLAFREEZE_TEXT_H_
#define VLAFREEZE_TEXT_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vlafreeze {

// One entry of the punctuation folding table applied after NFKC. Only code
// points NFKC leaves alone are listed.
struct PunctuationMapping {
  char32_t from;
  std::string_view to;
};

std::span<const PunctuationMapping> PunctuationTable();

enum class TerminalPunctuation {
  kCollapseToQuestion,  // trailing ?/!/. run becomes a single "?"
  kStrip,               // trailing ?/!/. run is removed
};

// Unicode NFKC, the punctuation table above, every Unicode white-space code
// point folded to ASCII space, runs collapsed, ends trimmed, then the
// trailing terminal-punctuation run handled per `terminal`. Idempotent.
// Invalid UTF-8 is replaced with U+FFFD before normalization.
std::string Normalize(std::string_view text,
                      TerminalPunctuation terminal =
                          TerminalPunctuation::kCollapseToQuestion);

// Normalized task description: no terminal punctuation.
inline std::string NormalizeTask(std::string_view task) {
  return Normalize(task, TerminalPunctuation::kStrip);
}

// ASCII lowercase; other bytes pass through.
std::string AsciiLower(std::string_view text);

// Case-insensitive identity key used for deduplication and disjointness.
std::string DedupKey(std::string_view text);

// Splits on ASCII white space, then peels leading and trailing ASCII
// punctuation (apostrophes and hyphens inside a word stay attached) into
// single-character words.
std::vector<std::string> SplitWords(std::string_view text);

std::string JoinWords(std::span<const std::string> words);

std::string Trim(std::string_view text);

}  // namespace vlafreeze

#endif  // VLAFREEZE_TEXT_H_
