// tools/tts.cc

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

#include <cstdio>

#include "cltts/base/error.h"
#include "commands.h"

namespace cltts::tools {

void Log(const std::string &msg) { std::fprintf(stderr, "tts: %s\n", msg.c_str()); }

}  // namespace cltts::tools

int main(int argc, char **argv) {
  using namespace cltts::tools;
  CLI::App app{"Cross-lingual multi-speaker TTS toolkit"};
  app.require_subcommand(1);
  // Global options such as --seed may also follow the subcommand.
  app.fallthrough();
  Globals g;
  app.add_option_function<std::uint64_t>(
         "--seed",
         [&g](const std::uint64_t &s) {
           g.seed = s;
           g.seed_given = true;
         },
         "Seed for every random choice")
      ->configurable();
  app.add_flag("-v,--verbose", g.verbose, "Log stages to stderr");
  AddFrontendCommands(app, g);
  AddSpeakerCommands(app, g);
  AddDspCommands(app, g);
  AddSynthCommands(app, g);
  AddVocoderCommands(app, g);
  AddEvalCommands(app, g);
  AddPipelineCommand(app, g);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  } catch (const cltts::Error &e) {
    std::fprintf(stderr, "tts: %s\n", e.what());
    return 1;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "tts: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
