// src/frontend/phoneme.cc

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

#include "cltts/frontend/phoneme.h"

#include "cltts/base/error.h"

namespace cltts::frontend {

namespace {

struct InventoryEntry {
  const char *symbol;
  bool vowel;
  PhonemeOrigin origin;
};

constexpr PhonemeOrigin kS = PhonemeOrigin::kShared;
constexpr PhonemeOrigin kM = PhonemeOrigin::kMandarinOnly;

constexpr InventoryEntry kEntries[] = {
    {"AA", true, kS},  {"AE", true, kS},  {"AH", true, kS},  {"AO", true, kS},  {"AW", true, kS},
    {"AY", true, kS},  {"B", false, kS},  {"CH", false, kS}, {"D", false, kS},  {"DH", false, kS},
    {"EH", true, kS},  {"ER", true, kS},  {"EY", true, kS},  {"F", false, kS},  {"G", false, kS},
    {"HH", false, kS}, {"IH", true, kS},  {"IY", true, kS},  {"JH", false, kS}, {"K", false, kS},
    {"L", false, kS},  {"M", false, kS},  {"N", false, kS},  {"NG", false, kS}, {"OW", true, kS},
    {"OY", true, kS},  {"P", false, kS},  {"R", false, kS},  {"S", false, kS},  {"SH", false, kS},
    {"T", false, kS},  {"TH", false, kS}, {"UH", true, kS},  {"UW", true, kS},  {"V", false, kS},
    {"W", false, kS},  {"Y", false, kS},  {"Z", false, kS},  {"ZH", false, kS}, {"J", false, kM},
    {"Q", false, kM},  {"X", false, kM},
};

}  // namespace

PhonemeInventory::PhonemeInventory() {
  for (const auto &e : kEntries) {
    index_.emplace(e.symbol, static_cast<int>(entries_.size()));
    entries_.push_back({e.symbol, e.origin});
    vowel_.push_back(e.vowel);
  }
}

const PhonemeInventory &PhonemeInventory::Shared() {
  static const PhonemeInventory inventory;
  return inventory;
}

const Phoneme &PhonemeInventory::At(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= entries_.size())
    throw Error(ErrorCode::kIdOutOfRange, "phoneme id " + std::to_string(id));
  return entries_[id];
}

std::optional<int> PhonemeInventory::Find(const std::string &symbol) const {
  auto it = index_.find(symbol);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int PhonemeInventory::Id(const std::string &symbol) const {
  auto id = Find(symbol);
  if (!id) throw Error(ErrorCode::kUnknownPhoneme, "'" + symbol + "'");
  return *id;
}

bool PhonemeInventory::IsVowel(int id) const {
  At(id);
  return vowel_[id];
}

std::array<double, kNumMarks> EncodeMark(ToneStressMark mark) {
  std::array<double, kNumMarks> v{};
  v[MarkIndex(mark)] = 1.0;
  return v;
}

Language ParseLanguage(const std::string &tag) {
  if (tag == "en") return Language::kEnglish;
  if (tag == "zh") return Language::kMandarin;
  throw Error(ErrorCode::kInvalidArgument, "language must be en or zh, got '" + tag + "'");
}

const char *LanguageTag(Language lang) { return lang == Language::kEnglish ? "en" : "zh"; }

InputSequence MakeInputSequence(std::vector<PhonemeToken> tokens, Language lang) {
  if (tokens.empty()) throw Error(ErrorCode::kEmptyInput, "no tokens");
  InputSequence seq;
  seq.language = lang;
  seq.one_hots = Matrix(tokens.size(), kNumMarks);
  for (std::size_t t = 0; t < tokens.size(); ++t) seq.one_hots(t, MarkIndex(tokens[t].mark)) = 1.0;
  seq.tokens = std::move(tokens);
  return seq;
}

std::string FormatTokens(const InputSequence &seq) {
  const auto &inv = PhonemeInventory::Shared();
  std::string out;
  for (std::size_t t = 0; t < seq.tokens.size(); ++t) {
    if (t) out += ' ';
    out += inv.At(seq.tokens[t].phoneme_id).symbol;
    out += '/';
    out += std::to_string(MarkIndex(seq.tokens[t].mark));
  }
  return out;
}

}  // namespace cltts::frontend
