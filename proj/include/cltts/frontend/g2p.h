// include/cltts/frontend/g2p.h

// Copyright 2026  The cltts Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cltts/frontend/phoneme.h"

namespace cltts::frontend {

struct PinyinSyllable {
  std::string initial;  // empty for zero-initial syllables
  std::string final;
  int tone = 5;  // 1..4, 5 = neutral

  std::string ToString() const { return initial + final + std::to_string(tone); }
  bool operator==(const PinyinSyllable &) const = default;
};

// Toneless syllables accepted by ParsePinyin (data/pinyin-syllables.txt,
// compiled into the library).
const std::set<std::string> &BundledSyllables();
std::set<std::string> ParseSyllableList(const std::string &text);

// Splits "xiang3" into ("x", "iang", 3). Throws kMalformedSyllable for a
// missing or out-of-range tone digit, non-lowercase letters, or a base not
// in the syllable table.
PinyinSyllable ParsePinyin(const std::string &syllable);

// Pinyin unit -> shared-inventory symbols, loaded from the tab-separated
// mapping file.
class PinyinMapping {
 public:
  static const PinyinMapping &Default();
  static PinyinMapping FromText(const std::string &text);
  static PinyinMapping FromFile(const std::string &path);

  // Throws kUnmappedUnit.
  const std::vector<int> &Lookup(const std::string &unit) const;
  bool Contains(const std::string &unit) const { return table_.count(unit) != 0; }
  const std::map<std::string, std::vector<int>> &table() const { return table_; }

  // Initials map to tokens with mark None; every vowel produced by the final
  // carries the tone (neutral tone 5 -> None), consonants of the final None.
  std::vector<PhonemeToken> ToTokens(const std::string &initial, const std::string &final,
                                     int tone) const;
  std::vector<PhonemeToken> ToTokens(const PinyinSyllable &s) const {
    return ToTokens(s.initial, s.final, s.tone);
  }

 private:
  std::map<std::string, std::vector<int>> table_;
};

// Table key for a final in the context of its initial (u -> v after
// j/q/x/y, i -> -i after retroflex and dental sibilants, e -> eh after y).
std::string NormalizeFinal(const std::string &initial, const std::string &final);

// ARPABET symbol with optional stress digit; 1 -> Stress1, 2 -> Stress2,
// 0 or none -> None. Mandarin-only symbols are rejected (kUnknownPhoneme),
// digits other than 0-2 or on consonants give kBadStressDigit.
PhonemeToken ParseArpabet(const std::string &token);

// Whitespace-separated numbered pinyin (Mandarin) or ARPABET (English).
// Errors are rethrown with the 1-based token position in the message.
InputSequence BuildInputSequence(const std::string &text, Language language,
                                 const PinyinMapping &mapping = PinyinMapping::Default());

}  // namespace cltts::frontend
