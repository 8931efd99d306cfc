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

#include "vlafreeze/text.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <array>
#include <cctype>

#include "vlafreeze/error.h"

namespace vlafreeze {
namespace {

constexpr std::array<PunctuationMapping, 16> kPunctuationTable = {{
    {U'؟', "?"},  // arabic question mark
    {U'⸮', "?"},  // reversed question mark
    {U'‽', "?"},  // interrobang
    {U'¿', ""},   // inverted question mark
    {U'¡', ""},   // inverted exclamation mark
    {U'。', "."},  // ideographic full stop
    {U'۔', "."},  // arabic full stop
    {U'।', "."},  // devanagari danda
    {U'‘', "'"},
    {U'’', "'"},
    {U'“', "\""},
    {U'”', "\""},
    {U'\u2013', "-"},  // en dash
    {U'\u2014', "-"},  // em dash
    {U'−', "-"},  // minus sign
    {U'、', ","},  // ideographic comma
}};

bool IsTerminalMark(char c) { return c == '?' || c == '!' || c == '.'; }

bool IsPeelable(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) && c != '\'' && c != '-';
}

std::string NormalizeOnce(std::string_view text, TerminalPunctuation terminal) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) {
    Fail(ErrorCode::kValidation, "ICU NFKC normalizer unavailable");
  }
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = nfkc->normalize(source, status);
  if (U_FAILURE(status)) {
    Fail(ErrorCode::kValidation, "NFKC normalization failed");
  }

  icu::UnicodeString folded;
  for (int32_t i = 0; i < normalized.length();) {
    const UChar32 c = normalized.char32At(i);
    i += U16_LENGTH(c);
    auto mapped = std::find_if(
        kPunctuationTable.begin(), kPunctuationTable.end(),
        [c](const PunctuationMapping& m) {
          return static_cast<UChar32>(m.from) == c;
        });
    if (mapped != kPunctuationTable.end()) {
      folded.append(icu::UnicodeString::fromUTF8(
          icu::StringPiece(mapped->to.data(),
                           static_cast<int32_t>(mapped->to.size()))));
    } else if (u_charType(c) == U_FORMAT_CHAR) {
      // zero-width joiners, BOM, and friends vanish (u_iscntrl counts them)
    } else if (u_isUWhiteSpace(c) || u_iscntrl(c)) {
      folded.append(static_cast<UChar>(' '));
    } else {
      folded.append(c);
    }
  }
  std::string utf8;
  folded.toUTF8String(utf8);

  std::string collapsed;
  collapsed.reserve(utf8.size());
  for (char c : utf8) {
    if (c == ' ' && (collapsed.empty() || collapsed.back() == ' ')) continue;
    collapsed.push_back(c);
  }
  while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();

  bool had_terminal = false;
  while (!collapsed.empty() &&
         (IsTerminalMark(collapsed.back()) || collapsed.back() == ' ')) {
    had_terminal |= collapsed.back() != ' ';
    collapsed.pop_back();
  }
  if (had_terminal && terminal == TerminalPunctuation::kCollapseToQuestion) {
    collapsed.push_back('?');
  }
  return collapsed;
}

}  // namespace

std::span<const PunctuationMapping> PunctuationTable() {
  return kPunctuationTable;
}

std::string Normalize(std::string_view text, TerminalPunctuation terminal) {
  // A single pass can expose a new composition at a trimmed boundary; a
  // couple of passes reach the fixed point on everything seen in practice.
  std::string current = NormalizeOnce(text, terminal);
  for (int pass = 0; pass < 3; ++pass) {
    std::string next = NormalizeOnce(current, terminal);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::string AsciiLower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string DedupKey(std::string_view text) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(NormalizeTask(text)));
  s.foldCase();
  std::string out;
  s.toUTF8String(out);
  return out;
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() &&
           std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    std::size_t j = i;
    while (j < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[j]))) {
      ++j;
    }
    if (j == i) break;
    std::string_view chunk = text.substr(i, j - i);
    std::size_t lead = 0;
    while (lead < chunk.size() && IsPeelable(chunk[lead])) ++lead;
    std::size_t tail = chunk.size();
    while (tail > lead && IsPeelable(chunk[tail - 1])) --tail;
    for (std::size_t k = 0; k < lead; ++k) words.emplace_back(1, chunk[k]);
    if (tail > lead) words.emplace_back(chunk.substr(lead, tail - lead));
    for (std::size_t k = tail; k < chunk.size(); ++k) {
      words.emplace_back(1, chunk[k]);
    }
    i = j;
  }
  return words;
}

std::string JoinWords(std::span<const std::string> words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

std::string Trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

}  // namespace vlafreeze
