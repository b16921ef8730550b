// tools/eval-commands.cc

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

#include <fmt/format.h>

#include <memory>

#include "cltts/base/error.h"
#include "cltts/eval/eer-report.h"
#include "cltts/eval/eval-set.h"
#include "cltts/eval/pipeline.h"
#include "cltts/eval/ratings.h"
#include "commands.h"

namespace cltts::tools {

void AddEvalCommands(CLI::App &app, Globals &g) {
  auto *ev = app.add_subcommand("eval", "Listening-test and verification reports");
  ev->require_subcommand(1);

  auto ratings_path = std::make_shared<std::string>();
  auto *validate = ev->add_subcommand("validate", "Check a ratings CSV");
  validate->add_option("--ratings", *ratings_path, "CSV rater_id,utterance_id,axis,score")
      ->required();
  validate->callback([ratings_path] {
    auto records = eval::ReadRatings(*ratings_path);
    fmt::print("{} ratings ok\n", records.size());
  });

  struct MosArgs {
    std::string ratings, manifest;
  };
  auto m = std::make_shared<MosArgs>();
  auto *mos = ev->add_subcommand("mos", "Mean and 95% interval per condition, model, axis");
  mos->add_option("--ratings", m->ratings, "Ratings CSV")->required();
  mos->add_option("--manifest", m->manifest, "Manifest CSV of the rated utterances")->required();
  mos->callback([m] {
    auto table =
        eval::SummarizeRatings(eval::ReadRatings(m->ratings), eval::ReadManifest(m->manifest));
    fmt::print("{}", eval::FormatMosTable(table));
  });

  struct SetArgs {
    std::string manifest, out, config;
  };
  auto s = std::make_shared<SetArgs>();
  auto *build = ev->add_subcommand("build-set", "Draw the 100-utterance listening set");
  build->add_option("--manifest", s->manifest, "Manifest CSV of every pool")->required();
  build->add_option("--out", s->out, "Manifest CSV of the set, in presentation order")->required();
  build->add_option("--config", s->config, "Config file ([eval] quotas)");
  build->callback([s, &g] {
    eval::EvalSetLayout layout;
    if (!s->config.empty()) layout = eval::EvalSetLayout::FromConfig(Config::FromFile(s->config));
    auto set =
        eval::BuildEvalSet(eval::GroupPools(eval::ReadManifest(s->manifest)), g.seed, layout);
    eval::WriteManifest(s->out, set.entries);
    if (g.verbose) Log(fmt::format("{} utterances, seed {}", set.entries.size(), g.seed));
  });

  auto systems = std::make_shared<std::string>();
  auto *eer = ev->add_subcommand("eer-report", "SV EER table for several systems");
  eer->add_option("--systems", *systems, "CSV system,train_set,embeddings,trials[,norm]")
      ->required();
  eer->callback([systems] {
    std::vector<eval::EerRow> rows;
    for (const auto &sys : eval::ReadEerSystems(*systems))
      rows.push_back(eval::EvaluateSystem(sys));
    fmt::print("{}", eval::FormatEerTable(rows));
  });
}

void AddPipelineCommand(CLI::App &app, Globals &g) {
  struct Args {
    std::string config, vocoder, out_dir;
  };
  auto a = std::make_shared<Args>();
  auto *p = app.add_subcommand("pipeline", "Text to WAV through every stage");
  p->add_option("--config", a->config, "Config file with a [pipeline] section")->required();
  p->add_option("--vocoder", a->vocoder, "wavenet or griffinlim")
      ->check(CLI::IsMember({"wavenet", "griffinlim"}));
  p->add_option("--out-dir", a->out_dir, "Override pipeline.out_dir");
  p->callback([a, &g] {
    auto cfg = eval::PipelineConfig::FromFile(a->config);
    if (!a->vocoder.empty()) cfg.vocoder = a->vocoder;
    if (!a->out_dir.empty()) cfg.out_dir = a->out_dir;
    if (g.seed_given) cfg.seed = g.seed;
    eval::LogFn log;
    if (g.verbose) log = Log;
    auto r = eval::RunPipeline(cfg, log);
    fmt::print("{}\t{} frames\t{} samples\n", r.wav_path, r.frames, r.samples);
  });
}

}  // namespace cltts::tools
