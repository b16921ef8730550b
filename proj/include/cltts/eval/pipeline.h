// include/cltts/eval/pipeline.h

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
#include <functional>
#include <string>
#include <vector>

#include "cltts/base/config.h"
#include "cltts/base/error.h"
#include "cltts/dsp/spectral.h"
#include "cltts/embedding/embedding.h"
#include "cltts/frontend/phoneme.h"
#include "cltts/synth/synthesizer.h"

namespace cltts::eval {

// Failure inside one pipeline stage (frontend, speaker, synthesizer,
// vocoder, output). The message starts with the stage name.
class StageError : public Error {
 public:
  StageError(const std::string &stage, const std::string &message)
      : Error(ErrorCode::kStage, stage + ": " + message), stage_(stage) {}
  const std::string &stage() const { return stage_; }

 private:
  std::string stage_;
};

struct PipelineConfig {
  std::string text;  // numbered pinyin or ARPABET, one utterance
  frontend::Language language = frontend::Language::kEnglish;
  std::string speaker_embeddings;  // embedding file
  std::string speaker;             // key inside it
  embedding::NormMode norm = embedding::NormMode::kNone;
  std::string synth_checkpoint;
  std::string vocoder = "wavenet";  // or "griffinlim"
  std::string vocoder_checkpoint;
  std::string out_dir = "out";
  std::string run_name;  // defaults to "run-<seed>"
  std::uint64_t seed = 0;
  double temperature = 1.0;
  dsp::DspConfig dsp;

  // [pipeline] keys text (or text_file), lang, speaker_embeddings, speaker,
  // norm, synth_checkpoint, vocoder, vocoder_checkpoint, out_dir, run_name,
  // seed, temperature; the [dsp] section fills dsp. Relative paths are
  // resolved against base_dir.
  static PipelineConfig FromConfig(const Config &c, const std::string &base_dir = "");
  static PipelineConfig FromFile(const std::string &path);
};

struct PipelineResult {
  std::string run_dir;
  std::string wav_path;
  std::string mel_path;
  std::string tokens_path;
  std::size_t frames = 0;  // decoder steps T_out
  std::size_t hop = 0;
  std::size_t samples = 0;  // frames * hop
};

using LogFn = std::function<void(const std::string &)>;

// text -> frontend -> synthesizer mel -> vocoder (or Griffin-Lim) -> files
// under out_dir/run_name: tokens.txt, mel.bin and audio.wav. The waveform
// always has frames * hop samples. Throws StageError.
PipelineResult RunPipeline(const PipelineConfig &cfg, const LogFn &log = {});

// Rows of a synthesizer training manifest: CSV header text,lang,speaker,mel
// with mel files in the WriteMel format (relative to the manifest). The
// speaker column is a key into speakers.
std::vector<synth::Utterance> LoadSynthManifest(
    const std::string &path, const embedding::EmbeddingSet &speakers,
    embedding::NormMode norm = embedding::NormMode::kNone);

}  // namespace cltts::eval
