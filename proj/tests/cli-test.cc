// tests/cli-test.cc

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

#include <sys/wait.h>

#include <array>
#include <cstdio>

#include "cltts/base/csv.h"
#include "cltts/dsp/audio.h"
#include "cltts/dsp/spectral.h"
#include "cltts/embedding/embedding.h"
#include "doctest.h"
#include "test-util.h"

using namespace cltts;

namespace {

struct Run {
  int status = -1;
  std::string output;
};

Run Tts(const std::string &args) {
  std::string cmd = std::string(TTS_BINARY) + " " + args + " 2>&1";
  Run r;
  FILE *pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

}  // namespace

TEST_CASE("help and unknown subcommands") {
  auto help = Tts("--help");
  CHECK(help.status == 0);
  for (const char *sub : {"frontend", "spk", "dsp", "synth", "voc", "eval", "pipeline"})
    CHECK(help.output.find(sub) != std::string::npos);
  CHECK(Tts("bogus").status != 0);
}

TEST_CASE("frontend g2p") {
  cltts::testing::TempDir dir("cli");
  WriteTextFile(dir.File("zh.txt"), "ni3 hao3\n");
  auto r =
      Tts("frontend g2p --lang zh --in " + dir.File("zh.txt") + " --out " + dir.File("zh.tok"));
  INFO(r.output);
  REQUIRE(r.status == 0);
  std::string tokens = ReadTextFile(dir.File("zh.tok"));
  CHECK(tokens.find("/3") != std::string::npos);
  WriteTextFile(dir.File("bad.txt"), "xq7\n");
  auto bad = Tts("frontend g2p --lang zh --in " + dir.File("bad.txt") + " --out " + dir.File("b"));
  CHECK(bad.status != 0);
  CHECK(bad.output.find("bad.txt:1") != std::string::npos);
}

TEST_CASE("mu-law and mel round through files") {
  cltts::testing::TempDir dir("cli");
  dsp::Waveform w;
  for (int t = 0; t < 1600; ++t) w.samples.push_back(0.4 * std::sin(t * 0.17));
  dsp::WriteWav(dir.File("a.wav"), w);
  auto enc = Tts("dsp mulaw enc --in " + dir.File("a.wav") + " --out " + dir.File("a.codes"));
  INFO(enc.output);
  REQUIRE(enc.status == 0);
  auto dec = Tts("dsp mulaw dec --in " + dir.File("a.codes") + " --out " + dir.File("b.wav"));
  REQUIRE(dec.status == 0);
  auto back = dsp::ReadWav(dir.File("b.wav"));
  REQUIRE(back.samples.size() == w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    CHECK(std::abs(back.samples[i] - w.samples[i]) < 0.03);
  auto mel =
      Tts("dsp mel --in " + dir.File("a.wav") + " --out " + dir.File("a.mel") + " --aligned");
  REQUIRE(mel.status == 0);
  CHECK(dsp::ReadMel(dir.File("a.mel")).rows() == 8);
}

TEST_CASE("speaker tools and seeds") {
  cltts::testing::TempDir dir("cli");
  auto make = [&](const std::string &tag, const std::string &seed_arg) {
    return Tts(seed_arg + " spk synthetic --embeddings " + dir.File(tag + ".emb") + " --trials " +
               dir.File(tag + ".trials") + " --dim 8 --clusters 2 --speakers 4 --utterances 3");
  };
  REQUIRE(make("a", "--seed 5").status == 0);
  REQUIRE(make("b", "--seed 5").status == 0);
  REQUIRE(make("c", "--seed 6").status == 0);
  CHECK(ReadTextFile(dir.File("a.emb")) == ReadTextFile(dir.File("b.emb")));
  CHECK(ReadTextFile(dir.File("a.emb")) != ReadTextFile(dir.File("c.emb")));
  CHECK(embedding::ReadEmbeddings(dir.File("a.emb")).dim() == 8);
  auto eer = Tts("spk eer --trials " + dir.File("a.trials") + " --embeddings " + dir.File("a.emb"));
  INFO(eer.output);
  CHECK(eer.status == 0);
  CHECK(eer.output.find("EER") != std::string::npos);
  auto norm =
      Tts("spk normalize --mode whiten --in " + dir.File("a.emb") + " --out " + dir.File("w.emb"));
  CHECK(norm.status == 0);
  CHECK(embedding::ReadEmbeddings(dir.File("w.emb")).size() == 24);
}

TEST_CASE("rating validation reports bad scores") {
  cltts::testing::TempDir dir("cli");
  WriteTextFile(dir.File("ok.csv"), "rater_id,utterance_id,axis,score\nr1,u1,N,4.5\n");
  WriteTextFile(dir.File("bad.csv"), "rater_id,utterance_id,axis,score\nr1,u1,N,4.3\n");
  CHECK(Tts("eval validate --ratings " + dir.File("ok.csv")).status == 0);
  auto bad = Tts("eval validate --ratings " + dir.File("bad.csv"));
  CHECK(bad.status != 0);
  CHECK(bad.output.find("BadScore") != std::string::npos);
  WriteTextFile(
      dir.File("m.csv"),
      "utterance_id,condition,model,speaker_id,gender,seen,path\nu1,GT,none,s1,M,1,a.wav\n");
  auto mos = Tts("eval mos --ratings " + dir.File("ok.csv") + " --manifest " + dir.File("m.csv"));
  CHECK(mos.status == 0);
  CHECK(mos.output.find("4.50 ± 0.00") != std::string::npos);
}
