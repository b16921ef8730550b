// include/cltts/base/csv.h

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
#include <string>
#include <vector>

namespace cltts {

// Comma-separated table with a header row. Fields may be double-quoted;
// quotes inside quoted fields are backslash-escaped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, throws kFormat when absent.
  std::size_t Column(const std::string &name) const;
};

CsvTable ParseCsv(const std::string &text);
CsvTable ReadCsv(const std::string &path);

// Fields listed in quoted_columns (by index) are always quoted.
std::string FormatCsv(const CsvTable &table, const std::vector<bool> &quoted_columns = {});
void WriteCsv(const std::string &path, const CsvTable &table,
              const std::vector<bool> &quoted_columns = {});

std::string ReadTextFile(const std::string &path);
void WriteTextFile(const std::string &path, const std::string &text);

}  // namespace cltts
