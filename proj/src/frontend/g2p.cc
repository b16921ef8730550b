// src/frontend/g2p.cc

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

#include "cltts/frontend/g2p.h"

#include <array>
#include <sstream>

#include "cltts/base/csv.h"
#include "cltts/base/error.h"

namespace cltts::frontend {

// Generated from data/ at configure time.
extern const char *const kBundledSyllableText;
extern const char *const kBundledMappingText;

namespace {

// Longest-first so "zh" wins over "z".
constexpr std::array<const char *, 23> kInitials = {"zh", "ch", "sh", "b", "p", "m", "f", "d",
                                                    "t",  "n",  "l",  "g", "k", "h", "j", "q",
                                                    "x",  "r",  "z",  "c", "s", "y", "w"};

bool StartsWith(const std::string &s, const std::string &prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

std::vector<std::string> SplitWhitespace(const std::string &text) {
  std::istringstream is(text);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::set<std::string> ParseSyllableList(const std::string &text) {
  std::set<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    for (auto &s : SplitWhitespace(line)) out.insert(s);
  }
  return out;
}

const std::set<std::string> &BundledSyllables() {
  static const std::set<std::string> syllables = ParseSyllableList(kBundledSyllableText);
  return syllables;
}

PinyinSyllable ParsePinyin(const std::string &syllable) {
  if (syllable.size() < 2) throw Error(ErrorCode::kMalformedSyllable, "'" + syllable + "'");
  char digit = syllable.back();
  if (digit < '1' || digit > '5')
    throw Error(ErrorCode::kMalformedSyllable,
                "'" + syllable + "' needs a trailing tone digit 1-5");
  std::string base = syllable.substr(0, syllable.size() - 1);
  for (char c : base)
    if (c < 'a' || c > 'z')
      throw Error(ErrorCode::kMalformedSyllable, "'" + syllable + "' has illegal character");
  if (!BundledSyllables().count(base))
    throw Error(ErrorCode::kMalformedSyllable, "'" + base + "' is not a pinyin syllable");

  PinyinSyllable out;
  out.tone = digit - '0';
  for (const char *ini : kInitials) {
    if (StartsWith(base, ini) && base.size() > std::char_traits<char>::length(ini)) {
      out.initial = ini;
      break;
    }
  }
  out.final = base.substr(out.initial.size());
  return out;
}

std::string NormalizeFinal(const std::string &initial, const std::string &final) {
  if (initial == "j" || initial == "q" || initial == "x" || initial == "y") {
    if (final == "u") return "v";
    if (final == "ue") return "ve";
    if (final == "uan") return "van";
    if (final == "un") return "vn";
  }
  if (initial == "y" && final == "e") return "eh";
  if ((initial == "zh" || initial == "ch" || initial == "sh" || initial == "r" || initial == "z" ||
       initial == "c" || initial == "s") &&
      final == "i")
    return "-i";
  return final;
}

PinyinMapping PinyinMapping::FromText(const std::string &text) {
  const auto &inv = PhonemeInventory::Shared();
  PinyinMapping m;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw Error(ErrorCode::kFormat,
                  "mapping line " + std::to_string(line_no) + ": expected unit<TAB>symbols");
    std::string unit = line.substr(0, tab);
    std::vector<int> ids;
    std::istringstream syms(line.substr(tab + 1));
    std::string sym;
    while (std::getline(syms, sym, ',')) ids.push_back(inv.Id(sym));
    if (!m.table_.emplace(unit, std::move(ids)).second)
      throw Error(ErrorCode::kFormat,
                  "mapping line " + std::to_string(line_no) + ": duplicate unit '" + unit + "'");
  }
  return m;
}

PinyinMapping PinyinMapping::FromFile(const std::string &path) {
  return FromText(ReadTextFile(path));
}

const PinyinMapping &PinyinMapping::Default() {
  static const PinyinMapping mapping = FromText(kBundledMappingText);
  return mapping;
}

const std::vector<int> &PinyinMapping::Lookup(const std::string &unit) const {
  auto it = table_.find(unit);
  if (it == table_.end()) throw Error(ErrorCode::kUnmappedUnit, "no mapping for '" + unit + "'");
  return it->second;
}

std::vector<PhonemeToken> PinyinMapping::ToTokens(const std::string &initial,
                                                  const std::string &final, int tone) const {
  if (tone < 1 || tone > 5)
    throw Error(ErrorCode::kMalformedSyllable, "tone " + std::to_string(tone));
  const auto &inv = PhonemeInventory::Shared();
  ToneStressMark mark = tone == 5 ? ToneStressMark::kNone : static_cast<ToneStressMark>(tone);
  std::vector<PhonemeToken> out;
  if (!initial.empty())
    for (int id : Lookup(initial)) out.push_back({id, ToneStressMark::kNone});
  for (int id : Lookup(NormalizeFinal(initial, final)))
    out.push_back({id, inv.IsVowel(id) ? mark : ToneStressMark::kNone});
  return out;
}

PhonemeToken ParseArpabet(const std::string &token) {
  if (token.empty()) throw Error(ErrorCode::kUnknownPhoneme, "empty token");
  const auto &inv = PhonemeInventory::Shared();
  std::string symbol = token;
  ToneStressMark mark = ToneStressMark::kNone;
  char last = token.back();
  bool has_digit = last >= '0' && last <= '9';
  if (has_digit) symbol.pop_back();
  auto id = inv.Find(symbol);
  if (!id || inv.At(*id).origin != PhonemeOrigin::kShared)
    throw Error(ErrorCode::kUnknownPhoneme, "'" + token + "'");
  if (has_digit) {
    if (last > '2' || !inv.IsVowel(*id)) throw Error(ErrorCode::kBadStressDigit, "'" + token + "'");
    if (last == '1') mark = ToneStressMark::kStress1;
    if (last == '2') mark = ToneStressMark::kStress2;
  }
  return {*id, mark};
}

InputSequence BuildInputSequence(const std::string &text, Language language,
                                 const PinyinMapping &mapping) {
  auto words = SplitWhitespace(text);
  if (words.empty()) throw Error(ErrorCode::kEmptyInput, "empty text");
  std::vector<PhonemeToken> tokens;
  for (std::size_t i = 0; i < words.size(); ++i) {
    try {
      if (language == Language::kMandarin) {
        auto toks = mapping.ToTokens(ParsePinyin(words[i]));
        tokens.insert(tokens.end(), toks.begin(), toks.end());
      } else {
        tokens.push_back(ParseArpabet(words[i]));
      }
    } catch (const Error &e) {
      throw Error(e.code(), "token " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return MakeInputSequence(std::move(tokens), language);
}

}  // namespace cltts::frontend
