// tools/commands.h

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

#include <cstdint>
#include <string>

#include "CLI11.hpp"

namespace cltts::tools {

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool verbose = false;
};

void AddFrontendCommands(CLI::App &app, Globals &g);
void AddSpeakerCommands(CLI::App &app, Globals &g);
void AddDspCommands(CLI::App &app, Globals &g);
void AddSynthCommands(CLI::App &app, Globals &g);
void AddVocoderCommands(CLI::App &app, Globals &g);
void AddEvalCommands(CLI::App &app, Globals &g);
void AddPipelineCommand(CLI::App &app, Globals &g);

// Log line to stderr.
void Log(const std::string &msg);

}  // namespace cltts::tools
