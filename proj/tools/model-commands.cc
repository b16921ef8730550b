// tools/model-commands.cc

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
#include <sstream>

#include "cltts/base/csv.h"
#include "cltts/base/error.h"
#include "cltts/dsp/audio.h"
#include "cltts/dsp/spectral.h"
#include "cltts/embedding/embedding.h"
#include "cltts/eval/pipeline.h"
#include "cltts/frontend/g2p.h"
#include "cltts/synth/synthesizer.h"
#include "cltts/vocoder/vocoder.h"
#include "commands.h"

namespace cltts::tools {

namespace {

std::string FirstLine(const std::string &text) {
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);)
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  throw Error(ErrorCode::kEmptyInput, "text file is empty");
}

void ReportCurve(const std::vector<double> &curve, bool verbose) {
  if (curve.empty()) return;
  if (verbose) {
    std::size_t every = std::max<std::size_t>(1, curve.size() / 20);
    for (std::size_t i = 0; i < curve.size(); i += every)
      Log(fmt::format("step {} loss {:.6f}", i, curve[i]));
  }
  Log(fmt::format("loss {:.6f} -> {:.6f} over {} steps", curve.front(), curve.back(),
                  curve.size()));
}

}  // namespace

void AddSynthCommands(CLI::App &app, Globals &g) {
  auto *sy = app.add_subcommand("synth", "Mel-spectrogram synthesizer");
  sy->require_subcommand(1);

  struct TrainArgs {
    std::string manifest, config, out, speakers, norm = "none";
  };
  auto t = std::make_shared<TrainArgs>();
  auto *train = sy->add_subcommand("train", "Teacher-forced training from a manifest");
  train->add_option("--manifest", t->manifest, "CSV text,lang,speaker,mel")->required();
  train->add_option("--config", t->config, "Config file ([synth] section)")->required();
  train->add_option("--out", t->out, "Checkpoint")->required();
  train->add_option("--speaker-embeddings", t->speakers,
                    "Embedding file (default: synth.speaker_embeddings)");
  train->add_option("--norm", t->norm, "Embedding normalization")
      ->check(CLI::IsMember({"none", "l2", "whiten"}));
  train->callback([t, &g] {
    auto c = Config::FromFile(t->config);
    auto cfg = synth::SynthConfig::FromConfig(c);
    auto opts = synth::TrainOptions::FromConfig(c);
    if (g.seed_given) {
      cfg.init_seed = g.seed;
      opts.seed = g.seed;
    }
    std::string spk =
        t->speakers.empty() ? c.Get<std::string>("synth.speaker_embeddings", "") : t->speakers;
    if (spk.empty()) throw Error(ErrorCode::kInvalidArgument, "no speaker embeddings given");
    auto data = eval::LoadSynthManifest(t->manifest, embedding::ReadEmbeddings(spk),
                                        embedding::ParseNormMode(t->norm));
    auto params = synth::InitParameters(cfg);
    ReportCurve(synth::Train(data, cfg, params, opts), g.verbose);
    synth::SaveCheckpoint(t->out, cfg, params);
  });

  struct InferArgs {
    std::string ckpt, text, speakers, speaker, lang = "en", out, norm = "none";
  };
  auto in = std::make_shared<InferArgs>();
  auto *infer = sy->add_subcommand("infer", "Free-running synthesis to a mel file");
  infer->add_option("--ckpt", in->ckpt, "Checkpoint")->required();
  infer->add_option("--text", in->text, "Text file, first non-empty line is used")->required();
  infer->add_option("--speaker-embedding", in->speakers, "Embedding file")->required();
  infer->add_option("--speaker", in->speaker, "Key in the embedding file (default: first)");
  infer->add_option("--norm", in->norm, "Embedding normalization")
      ->check(CLI::IsMember({"none", "l2", "whiten"}));
  infer->add_option("--lang", in->lang, "en or zh")->check(CLI::IsMember({"en", "zh"}));
  infer->add_option("--out", in->out, "Mel file")->required();
  infer->callback([in, &g] {
    auto ckpt = synth::LoadCheckpoint(in->ckpt);
    auto lang = frontend::ParseLanguage(in->lang);
    auto seq = frontend::BuildInputSequence(FirstLine(ReadTextFile(in->text)), lang);
    auto set = embedding::Normalize(embedding::ReadEmbeddings(in->speakers),
                                    embedding::ParseNormMode(in->norm));
    const auto *e = in->speaker.empty() ? &set[0] : set.Find(in->speaker);
    if (!e) throw Error(ErrorCode::kInvalidArgument, "speaker '" + in->speaker + "' not found");
    auto fr = synth::Forward(seq, e->vector, static_cast<int>(lang), ckpt.cfg, ckpt.params);
    if (g.verbose) Log(fmt::format("{} frames", fr.output.mel.rows()));
    dsp::WriteMel(in->out, fr.output.mel);
  });
}

void AddVocoderCommands(CLI::App &app, Globals &g) {
  auto *vo = app.add_subcommand("voc", "Autoregressive vocoder");
  vo->require_subcommand(1);

  struct TrainArgs {
    std::string wav, mel, config, out;
  };
  auto t = std::make_shared<TrainArgs>();
  auto *train = vo->add_subcommand("train", "Teacher-forced training on one recording");
  train->add_option("--wav", t->wav, "WAV file")->required();
  train->add_option("--mel", t->mel, "Aligned mel file (dsp mel --aligned)")->required();
  train->add_option("--config", t->config, "Config file ([vocoder] section)")->required();
  train->add_option("--out", t->out, "Checkpoint")->required();
  train->callback([t, &g] {
    auto c = Config::FromFile(t->config);
    auto cfg = vocoder::VocoderConfig::FromConfig(c);
    auto opts = vocoder::TrainOptions::FromConfig(c);
    if (g.seed_given) {
      cfg.init_seed = g.seed;
      opts.seed = g.seed;
    }
    auto audio = dsp::ReadWav(t->wav);
    auto mel = dsp::ReadMel(t->mel);
    auto params = vocoder::InitParameters(cfg);
    ReportCurve(vocoder::Train(audio, mel, cfg, params, opts), g.verbose);
    vocoder::SaveCheckpoint(t->out, cfg, params);
  });

  struct GenArgs {
    std::string mel, ckpt, out;
    double temperature = 1.0;
    int sample_rate = 16000;
  };
  auto gen = std::make_shared<GenArgs>();
  auto *generate = vo->add_subcommand("generate", "Sample a waveform from a mel file");
  generate->add_option("--mel", gen->mel, "Mel file")->required();
  generate->add_option("--ckpt", gen->ckpt, "Checkpoint")->required();
  generate->add_option("--temperature", gen->temperature, "Softmax temperature");
  generate->add_option("--sample-rate", gen->sample_rate, "Output rate");
  generate->add_option("--out", gen->out, "WAV file")->required();
  generate->callback([gen, &g] {
    auto ckpt = vocoder::LoadCheckpoint(gen->ckpt);
    vocoder::GenerateOptions opts;
    opts.seed = g.seed;
    opts.temperature = gen->temperature;
    auto w =
        vocoder::Generate(vocoder::ConditioningTrack(dsp::ReadMel(gen->mel), ckpt.cfg.hop_length),
                          ckpt.cfg, ckpt.params, opts, gen->sample_rate);
    dsp::WriteWav(gen->out, w);
  });
}

}  // namespace cltts::tools
