// src/base/config.cc

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

#include "cltts/base/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <sstream>

#include "cltts/base/error.h"

namespace cltts {

Config Config::FromFile(const std::string &path) {
  Config c;
  try {
    boost::property_tree::read_ini(path, c.tree_);
  } catch (const boost::property_tree::ini_parser_error &e) {
    throw Error(ErrorCode::kFormat, "config " + path + ": " + e.message());
  }
  return c;
}

Config Config::FromString(const std::string &text) {
  Config c;
  std::istringstream is(text);
  try {
    boost::property_tree::read_ini(is, c.tree_);
  } catch (const boost::property_tree::ini_parser_error &e) {
    throw Error(ErrorCode::kFormat, "config: " + e.message());
  }
  return c;
}

std::optional<std::string> Config::GetString(const std::string &key) const {
  auto v = tree_.get_optional<std::string>(key);
  if (!v) return std::nullopt;
  return *v;
}

bool Config::Has(const std::string &key) const { return tree_.get_child_optional(key).has_value(); }

void Config::Set(const std::string &key, const std::string &value) { tree_.put(key, value); }

}  // namespace cltts
