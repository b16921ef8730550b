// tools/speaker-commands.cc

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

#include "cltts/base/csv.h"
#include "cltts/embedding/embedding.h"
#include "commands.h"

namespace cltts::tools {

void AddSpeakerCommands(CLI::App &app, Globals &g) {
  auto *spk = app.add_subcommand("spk", "Speaker embedding toolkit");
  spk->require_subcommand(1);

  struct NormArgs {
    std::string mode = "none", in, out, fit;
    double epsilon = embedding::kDefaultWhiteningEpsilon;
  };
  auto n = std::make_shared<NormArgs>();
  auto *norm = spk->add_subcommand("normalize", "L2-normalize or whiten an embedding file");
  norm->add_option("--mode", n->mode, "none, l2 or whiten")
      ->check(CLI::IsMember({"none", "l2", "whiten"}));
  norm->add_option("--in", n->in, "Embedding file")->required();
  norm->add_option("--out", n->out, "Output embedding file")->required();
  norm->add_option("--fit", n->fit, "Fit whitening on this set instead of --in");
  norm->add_option("--epsilon", n->epsilon, "Whitening eigenvalue floor");
  norm->callback([n] {
    auto set = embedding::ReadEmbeddings(n->in);
    std::unique_ptr<embedding::EmbeddingSet> fit;
    if (!n->fit.empty())
      fit = std::make_unique<embedding::EmbeddingSet>(embedding::ReadEmbeddings(n->fit));
    auto out = embedding::Normalize(set, embedding::ParseNormMode(n->mode), fit.get(), n->epsilon);
    embedding::WriteEmbeddings(n->out, out);
  });

  struct EerArgs {
    std::string trials, embeddings, mode = "none";
  };
  auto e = std::make_shared<EerArgs>();
  auto *eer = spk->add_subcommand("eer", "Cosine-scored equal error rate");
  eer->add_option("--trials", e->trials, "Trial list")->required();
  eer->add_option("--embeddings", e->embeddings, "Embedding file")->required();
  eer->add_option("--mode", e->mode, "Normalization before scoring")
      ->check(CLI::IsMember({"none", "l2", "whiten"}));
  eer->callback([e] {
    auto set = embedding::Normalize(embedding::ReadEmbeddings(e->embeddings),
                                    embedding::ParseNormMode(e->mode));
    auto scores = embedding::ScoreTrials(set, embedding::ReadTrials(e->trials));
    auto r = embedding::ComputeEer(scores);
    fmt::print("EER {:.2f}% threshold {:.6f} trials {}\n", 100.0 * r.eer, r.threshold,
               scores.size());
  });

  struct ProjArgs {
    std::string embeddings, out;
  };
  auto p = std::make_shared<ProjArgs>();
  auto *proj = spk->add_subcommand("project2d", "PCA projection to CSV x,y,label");
  proj->add_option("--embeddings", p->embeddings, "Embedding file")->required();
  proj->add_option("--out", p->out, "CSV file")->required();
  proj->callback([p] {
    CsvTable t;
    t.header = {"x", "y", "label"};
    for (const auto &pt : embedding::Project2d(embedding::ReadEmbeddings(p->embeddings)))
      t.rows.push_back({fmt::format("{:.9g}", pt.x), fmt::format("{:.9g}", pt.y), pt.label});
    WriteCsv(p->out, t);
  });

  struct SynArgs {
    std::string embeddings, trials;
    embedding::SyntheticOptions opts;
  };
  auto s = std::make_shared<SynArgs>();
  auto *syn = spk->add_subcommand("synthetic", "Write a synthetic clustered corpus");
  syn->add_option("--embeddings", s->embeddings, "Output embedding file")->required();
  syn->add_option("--trials", s->trials, "Output trial list")->required();
  syn->add_option("--dim", s->opts.dim, "Dimension");
  syn->add_option("--clusters", s->opts.num_clusters, "Datasets");
  syn->add_option("--speakers", s->opts.speakers_per_cluster, "Speakers per dataset");
  syn->add_option("--utterances", s->opts.utterances_per_speaker, "Utterances per speaker");
  syn->callback([s, &g] {
    auto opts = s->opts;
    opts.seed = g.seed;
    auto corpus = embedding::MakeSyntheticCorpus(opts);
    embedding::WriteEmbeddings(s->embeddings, corpus.embeddings);
    std::string text;
    for (const auto &t : corpus.trials)
      text += t.enroll_id + "\t" + t.test_id + "\t" + (t.is_target ? "target" : "nontarget") + "\n";
    WriteTextFile(s->trials, text);
  });
}

}  // namespace cltts::tools
