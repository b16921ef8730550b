// src/eval/pipeline.cc

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

#include "cltts/eval/pipeline.h"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>

#include "cltts/base/csv.h"
#include "cltts/dsp/audio.h"
#include "cltts/frontend/g2p.h"
#include "cltts/vocoder/vocoder.h"

namespace cltts::eval {

namespace fs = std::filesystem;

namespace {

std::string Resolve(const std::string &base, const std::string &p) {
  if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).string();
}

template <typename F>
auto RunStage(const std::string &stage, const LogFn &log, F &&body) {
  if (log) log("stage " + stage);
  try {
    return body();
  } catch (const StageError &) {
    throw;
  } catch (const std::exception &e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

PipelineConfig PipelineConfig::FromConfig(const Config &c, const std::string &base_dir) {
  PipelineConfig p;
  if (auto t = c.GetString("pipeline.text")) p.text = *t;
  if (auto f = c.GetString("pipeline.text_file")) p.text = ReadTextFile(Resolve(base_dir, *f));
  p.language = frontend::ParseLanguage(c.Get<std::string>("pipeline.lang", "en"));
  p.speaker_embeddings = Resolve(base_dir, c.Get<std::string>("pipeline.speaker_embeddings", ""));
  p.speaker = c.Get<std::string>("pipeline.speaker", "");
  p.norm = embedding::ParseNormMode(c.Get<std::string>("pipeline.norm", "none"));
  p.synth_checkpoint = Resolve(base_dir, c.Get<std::string>("pipeline.synth_checkpoint", ""));
  p.vocoder = c.Get<std::string>("pipeline.vocoder", p.vocoder);
  p.vocoder_checkpoint = Resolve(base_dir, c.Get<std::string>("pipeline.vocoder_checkpoint", ""));
  p.out_dir = Resolve(base_dir, c.Get<std::string>("pipeline.out_dir", p.out_dir));
  p.run_name = c.Get<std::string>("pipeline.run_name", "");
  p.seed = c.Get<std::uint64_t>("pipeline.seed", p.seed);
  p.temperature = c.Get<double>("pipeline.temperature", p.temperature);
  p.dsp = dsp::DspConfig::FromConfig(c);
  return p;
}

PipelineConfig PipelineConfig::FromFile(const std::string &path) {
  return FromConfig(Config::FromFile(path), fs::path(path).parent_path().string());
}

PipelineResult RunPipeline(const PipelineConfig &cfg, const LogFn &log) {
  auto seq = RunStage("frontend", log,
                      [&] { return frontend::BuildInputSequence(cfg.text, cfg.language); });

  auto speaker = RunStage("speaker", log, [&] {
    if (cfg.speaker_embeddings.empty())
      throw Error(ErrorCode::kInvalidArgument, "no speaker_embeddings file configured");
    auto set = embedding::Normalize(embedding::ReadEmbeddings(cfg.speaker_embeddings), cfg.norm);
    const embedding::SpeakerEmbedding *e = cfg.speaker.empty() ? &set[0] : set.Find(cfg.speaker);
    if (!e) throw Error(ErrorCode::kInvalidArgument, "speaker '" + cfg.speaker + "' not found");
    return e->vector;
  });

  Matrix mel = RunStage("synthesizer", log, [&] {
    if (cfg.synth_checkpoint.empty())
      throw Error(ErrorCode::kInvalidArgument, "no synth_checkpoint configured");
    auto ckpt = synth::LoadCheckpoint(cfg.synth_checkpoint);
    auto fr = synth::Forward(seq, speaker, static_cast<int>(cfg.language), ckpt.cfg, ckpt.params);
    return fr.output.mel;
  });
  if (log) log(fmt::format("synthesizer produced {} frames", mel.rows()));

  std::size_t hop = 0;
  dsp::Waveform wav = RunStage("vocoder", log, [&] {
    if (cfg.vocoder == "griffinlim") {
      const auto &d = cfg.dsp;
      dsp::MelFilterbank fb(d.n_mels, d.stft.fft_size, d.sample_rate, d.f_min, d.f_max);
      auto gl = dsp::GriffinLim(dsp::MelToLinear(mel, fb), d.stft, d.griffin_lim_iters, cfg.seed,
                                d.sample_rate);
      hop = d.stft.hop_length;
      gl.waveform.samples.resize(mel.rows() * hop, 0.0);
      return gl.waveform;
    }
    if (cfg.vocoder != "wavenet")
      throw Error(ErrorCode::kInvalidArgument, "unknown vocoder '" + cfg.vocoder + "'");
    if (cfg.vocoder_checkpoint.empty())
      throw Error(ErrorCode::kInvalidArgument, "no vocoder_checkpoint configured");
    auto ckpt = vocoder::LoadCheckpoint(cfg.vocoder_checkpoint);
    hop = ckpt.cfg.hop_length;
    vocoder::GenerateOptions g;
    g.seed = cfg.seed;
    g.temperature = cfg.temperature;
    return vocoder::Generate(vocoder::ConditioningTrack(mel, hop), ckpt.cfg, ckpt.params, g,
                             cfg.dsp.sample_rate);
  });

  return RunStage("output", log, [&] {
    PipelineResult r;
    std::string name = cfg.run_name.empty() ? fmt::format("run-{}", cfg.seed) : cfg.run_name;
    fs::path dir = fs::path(cfg.out_dir) / name;
    fs::create_directories(dir);
    r.run_dir = dir.string();
    r.tokens_path = (dir / "tokens.txt").string();
    r.mel_path = (dir / "mel.bin").string();
    r.wav_path = (dir / "audio.wav").string();
    WriteTextFile(r.tokens_path, frontend::FormatTokens(seq) + "\n");
    dsp::WriteMel(r.mel_path, mel);
    dsp::WriteWav(r.wav_path, wav);
    r.frames = mel.rows();
    r.hop = hop;
    r.samples = wav.samples.size();
    if (log) log(fmt::format("wrote {} ({} samples)", r.wav_path, r.samples));
    return r;
  });
}

std::vector<synth::Utterance> LoadSynthManifest(const std::string &path,
                                                const embedding::EmbeddingSet &speakers,
                                                embedding::NormMode norm) {
  CsvTable t = ReadCsv(path);
  const std::string base = fs::path(path).parent_path().string();
  const std::size_t text = t.Column("text"), lang = t.Column("lang"), spk = t.Column("speaker"),
                    mel = t.Column("mel");
  auto normed = embedding::Normalize(speakers, norm);
  std::vector<synth::Utterance> out;
  for (const auto &row : t.rows) {
    synth::Utterance u;
    auto language = frontend::ParseLanguage(row[lang]);
    u.input = frontend::BuildInputSequence(row[text], language);
    u.language_id = static_cast<int>(language);
    const auto *e = normed.Find(row[spk]);
    if (!e) throw Error(ErrorCode::kInvalidArgument, "speaker '" + row[spk] + "' not found");
    u.speaker = e->vector;
    u.mel = dsp::ReadMel(Resolve(base, row[mel]));
    out.push_back(std::move(u));
  }
  if (out.empty()) throw Error(ErrorCode::kEmptyInput, path + " has no utterances");
  return out;
}

}  // namespace cltts::eval
