// tools/frontend-commands.cc

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

#include <memory>
#include <sstream>

#include "cltts/base/csv.h"
#include "cltts/base/error.h"
#include "cltts/frontend/g2p.h"
#include "commands.h"

namespace cltts::tools {

void AddFrontendCommands(CLI::App &app, Globals &) {
  auto *fe = app.add_subcommand("frontend", "Text frontend");
  fe->require_subcommand(1);
  auto *g2p = fe->add_subcommand("g2p", "Pinyin or ARPABET lines to SYMBOL/markIndex tokens");
  struct Args {
    std::string lang = "en", in, out, mapping;
  };
  auto a = std::make_shared<Args>();
  g2p->add_option("--lang", a->lang, "en or zh")->check(CLI::IsMember({"en", "zh"}));
  g2p->add_option("--in", a->in, "One utterance per line")->required();
  g2p->add_option("--out", a->out, "Token file")->required();
  g2p->add_option("--mapping", a->mapping, "Pinyin mapping table (default: bundled)");
  g2p->callback([a] {
    auto language = frontend::ParseLanguage(a->lang);
    frontend::PinyinMapping table = a->mapping.empty()
                                        ? frontend::PinyinMapping::Default()
                                        : frontend::PinyinMapping::FromFile(a->mapping);
    std::istringstream is(ReadTextFile(a->in));
    std::string line, result;
    int line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        result += frontend::FormatTokens(frontend::BuildInputSequence(line, language, table));
      } catch (const Error &e) {
        throw Error(e.code(), a->in + ":" + std::to_string(line_no) + ": " + e.what());
      }
      result += '\n';
    }
    WriteTextFile(a->out, result);
  });
}

}  // namespace cltts::tools
