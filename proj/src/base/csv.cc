// src/base/csv.cc

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

#include "cltts/base/csv.h"

#include <boost/tokenizer.hpp>
#include <fstream>
#include <sstream>

#include "cltts/base/error.h"

namespace cltts {

std::size_t CsvTable::Column(const std::string &name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error(ErrorCode::kFormat, "missing CSV column '" + name + "'");
}

CsvTable ParseCsv(const std::string &text) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  CsvTable table;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    try {
      Tokenizer tok(line);
      fields.assign(tok.begin(), tok.end());
    } catch (const boost::escaped_list_error &e) {
      throw Error(ErrorCode::kFormat, std::string("bad CSV line: ") + e.what());
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
      continue;
    }
    if (fields.size() != table.header.size())
      throw Error(ErrorCode::kFormat, "CSV row has " + std::to_string(fields.size()) +
                                          " fields, header has " +
                                          std::to_string(table.header.size()));
    table.rows.push_back(std::move(fields));
  }
  if (first) throw Error(ErrorCode::kFormat, "CSV has no header");
  return table;
}

CsvTable ReadCsv(const std::string &path) { return ParseCsv(ReadTextFile(path)); }

namespace {

std::string Quote(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void AppendRow(std::string &out, const std::vector<std::string> &row,
               const std::vector<bool> &quoted) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    bool q =
        (i < quoted.size() && quoted[i]) || row[i].find_first_of(",\"\\\n") != std::string::npos;
    out += q ? Quote(row[i]) : row[i];
  }
  out += '\n';
}

}  // namespace

std::string FormatCsv(const CsvTable &table, const std::vector<bool> &quoted) {
  std::string out;
  AppendRow(out, table.header, {});
  for (const auto &row : table.rows) AppendRow(out, row, quoted);
  return out;
}

void WriteCsv(const std::string &path, const CsvTable &table, const std::vector<bool> &quoted) {
  WriteTextFile(path, FormatCsv(table, quoted));
}

std::string ReadTextFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string &path, const std::string &text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  os << text;
  if (!os) throw Error(ErrorCode::kIo, "failed writing " + path);
}

}  // namespace cltts
