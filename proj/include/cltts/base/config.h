// include/cltts/base/config.h

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

#include <boost/property_tree/ptree.hpp>
#include <optional>
#include <string>

namespace cltts {

// Sectioned key/value configuration ("INI" text):
//
//   [dsp]
//   sample_rate = 16000
//   [synth]
//   decoder_dim = 64
//
// Keys are addressed as "section.key". Missing keys fall back to the
// caller's default so every built-in default stays overridable.
class Config {
 public:
  Config() = default;
  static Config FromFile(const std::string &path);
  static Config FromString(const std::string &text);

  template <typename T>
  T Get(const std::string &key, const T &fallback) const {
    return tree_.get<T>(key, fallback);
  }
  std::optional<std::string> GetString(const std::string &key) const;
  bool Has(const std::string &key) const;
  void Set(const std::string &key, const std::string &value);

 private:
  boost::property_tree::ptree tree_;
};

}  // namespace cltts
