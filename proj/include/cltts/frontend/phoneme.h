// include/cltts/frontend/phoneme.h

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

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cltts/base/tensor.h"

namespace cltts::frontend {

enum class PhonemeOrigin { kShared, kMandarinOnly };

struct Phoneme {
  std::string symbol;
  PhonemeOrigin origin;
};

// ARPABET consonants and vowels plus the Mandarin-only J, Q, X. Indices are
// contiguous from 0 and fixed across releases (new symbols append).
class PhonemeInventory {
 public:
  static const PhonemeInventory &Shared();

  std::size_t size() const { return entries_.size(); }
  const Phoneme &At(int id) const;
  std::optional<int> Find(const std::string &symbol) const;
  // Throws kUnknownPhoneme.
  int Id(const std::string &symbol) const;
  bool IsVowel(int id) const;
  const std::vector<Phoneme> &entries() const { return entries_; }

 private:
  PhonemeInventory();

  std::vector<Phoneme> entries_;
  std::vector<bool> vowel_;
  std::unordered_map<std::string, int> index_;
};

// Seven categories; lexical tones and stress levels never share a slot
// except None, which covers both Mandarin neutral tone and English
// unstressed vowels.
enum class ToneStressMark {
  kNone = 0,
  kTone1,
  kTone2,
  kTone3,
  kTone4,
  kStress1,
  kStress2,
};

inline constexpr std::size_t kNumMarks = 7;

std::array<double, kNumMarks> EncodeMark(ToneStressMark mark);
inline int MarkIndex(ToneStressMark mark) { return static_cast<int>(mark); }
inline bool IsTone(ToneStressMark m) {
  return m >= ToneStressMark::kTone1 && m <= ToneStressMark::kTone4;
}
inline bool IsStress(ToneStressMark m) {
  return m == ToneStressMark::kStress1 || m == ToneStressMark::kStress2;
}

struct PhonemeToken {
  int phoneme_id = 0;
  ToneStressMark mark = ToneStressMark::kNone;
  bool operator==(const PhonemeToken &) const = default;
};

enum class Language { kEnglish = 0, kMandarin = 1 };

// Throws kInvalidArgument for anything but "en" / "zh".
Language ParseLanguage(const std::string &tag);
const char *LanguageTag(Language lang);

struct InputSequence {
  std::vector<PhonemeToken> tokens;
  Language language = Language::kEnglish;
  Matrix one_hots;  // tokens.size() x 7

  std::size_t length() const { return tokens.size(); }
};

// Builds one_hots from tokens; throws kEmptyInput when tokens is empty.
InputSequence MakeInputSequence(std::vector<PhonemeToken> tokens, Language lang);

// "SYMBOL/markIndex" pairs separated by spaces.
std::string FormatTokens(const InputSequence &seq);

}  // namespace cltts::frontend
