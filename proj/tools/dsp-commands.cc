// tools/dsp-commands.cc

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
#include "commands.h"

namespace cltts::tools {

namespace {

dsp::DspConfig LoadDsp(const std::string &path) {
  return path.empty() ? dsp::DspConfig{} : dsp::DspConfig::FromConfig(Config::FromFile(path));
}

dsp::MelFilterbank Filterbank(const dsp::DspConfig &d) {
  return dsp::MelFilterbank(d.n_mels, d.stft.fft_size, d.sample_rate, d.f_min, d.f_max);
}

void CheckRate(const dsp::Waveform &w, const dsp::DspConfig &d) {
  if (w.sample_rate != d.sample_rate)
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("audio is {} Hz, config expects {} Hz", w.sample_rate, d.sample_rate));
}

}  // namespace

void AddDspCommands(CLI::App &app, Globals &g) {
  auto *d = app.add_subcommand("dsp", "Signal processing");
  d->require_subcommand(1);

  struct MelArgs {
    std::string config, in, out;
    bool aligned = false;
  };
  auto m = std::make_shared<MelArgs>();
  auto *mel = d->add_subcommand("mel", "WAV to log-mel file");
  mel->add_option("--config", m->config, "Config file ([dsp] section)");
  mel->add_option("--in", m->in, "WAV file")->required();
  mel->add_option("--out", m->out, "Mel file")->required();
  mel->add_flag("--aligned", m->aligned, "ceil(N/hop) frames for vocoder conditioning");
  mel->callback([m] {
    auto cfg = LoadDsp(m->config);
    auto w = dsp::ReadWav(m->in);
    CheckRate(w, cfg);
    auto fb = Filterbank(cfg);
    auto spec = m->aligned ? dsp::ComputeAlignedMel(w, cfg.stft, fb, cfg.mel_floor)
                           : dsp::ComputeMelSpectrogram(w, cfg.stft, fb, cfg.mel_floor);
    dsp::WriteMel(m->out, spec.frames);
  });

  struct MuArgs {
    std::string direction, in, out;
    int sample_rate = 16000;
  };
  auto mu = std::make_shared<MuArgs>();
  auto *mulaw = d->add_subcommand("mulaw", "8-bit mu-law: enc WAV->codes, dec codes->WAV");
  mulaw->add_option("direction", mu->direction, "enc or dec")
      ->required()
      ->check(CLI::IsMember({"enc", "dec"}));
  mulaw->add_option("--in", mu->in, "Input file")->required();
  mulaw->add_option("--out", mu->out, "Output file")->required();
  mulaw->add_option("--sample-rate", mu->sample_rate, "Rate of the decoded WAV");
  mulaw->callback([mu] {
    if (mu->direction == "enc") {
      auto w = dsp::ReadWav(mu->in);
      std::string text;
      for (int c : dsp::MuLawEncode(w.samples)) text += std::to_string(c) + "\n";
      WriteTextFile(mu->out, text);
      return;
    }
    std::istringstream is(ReadTextFile(mu->in));
    std::vector<int> codes;
    for (int c; is >> c;) codes.push_back(c);
    if (!is.eof()) throw Error(ErrorCode::kFormat, mu->in + " holds a non-integer code");
    dsp::Waveform w;
    w.sample_rate = mu->sample_rate;
    w.samples = dsp::MuLawDecode(codes);
    dsp::WriteWav(mu->out, w);
  });

  struct SegArgs {
    std::string config, in, out_dir;
  };
  auto s = std::make_shared<SegArgs>();
  auto *seg = d->add_subcommand("segment", "Cut a recording at long silences");
  seg->add_option("--config", s->config, "Config file ([dsp] section)");
  seg->add_option("--in", s->in, "WAV file")->required();
  seg->add_option("--out-dir", s->out_dir, "Write each piece as NNN.wav here");
  seg->callback([s] {
    auto cfg = LoadDsp(s->config);
    auto w = dsp::ReadWav(s->in);
    dsp::SegmentOptions opts;
    opts.min_silence_s = cfg.min_silence_s;
    opts.min_segment_s = cfg.min_segment_s;
    opts.max_segment_s = cfg.max_segment_s;
    opts.silence_db = cfg.silence_db;
    auto segs = dsp::SegmentOnSilence(w, opts);
    for (std::size_t i = 0; i < segs.size(); ++i) {
      fmt::print("{}\t{}\t{}\t{:.3f}\n", i, segs[i].start, segs[i].end,
                 segs[i].duration(w.sample_rate));
      if (s->out_dir.empty()) continue;
      dsp::Waveform piece;
      piece.sample_rate = w.sample_rate;
      piece.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(segs[i].start),
                           w.samples.begin() + static_cast<std::ptrdiff_t>(segs[i].end));
      dsp::WriteWav(fmt::format("{}/{:03d}.wav", s->out_dir, i), piece);
    }
  });

  struct GlArgs {
    std::string config, mel, out;
    int iters = -1;
  };
  auto gl = std::make_shared<GlArgs>();
  auto *grif = d->add_subcommand("griffinlim", "Log-mel file to WAV by phase retrieval");
  grif->add_option("--config", gl->config, "Config file ([dsp] section)");
  grif->add_option("--mel", gl->mel, "Mel file")->required();
  grif->add_option("--out", gl->out, "WAV file")->required();
  grif->add_option("--iters", gl->iters, "Iterations (default from config)");
  grif->callback([gl, &g] {
    auto cfg = LoadDsp(gl->config);
    auto mel = dsp::ReadMel(gl->mel);
    auto mag = dsp::MelToLinear(mel, Filterbank(cfg));
    int iters = gl->iters >= 0 ? gl->iters : cfg.griffin_lim_iters;
    auto r = dsp::GriffinLim(mag, cfg.stft, iters, g.seed, cfg.sample_rate);
    if (g.verbose && !r.objective.empty())
      Log(fmt::format("spectral convergence {:.4f} -> {:.4f}", r.objective.front(),
                      r.objective.back()));
    dsp::WriteWav(gl->out, r.waveform);
  });
}

}  // namespace cltts::tools
