// Copyright 2026 The trajlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end pipeline on a small synthetic corpus:
// gen -> curate -> pretext -> eval (with loss replay) -> stats.
// Pass an output directory, default ./pipeline_demo_out.

#include <cstdio>
#include <filesystem>

#include "trajlab/trajlab.hpp"

int main(int argc, char** argv) {
  using namespace trajlab;
  const std::filesystem::path root =
      argc > 1 ? argv[1] : "pipeline_demo_out";

  GenOptions gen;
  gen.count = 24;
  gen.seed = 42;
  gen.output_dir = root / "gen";
  const GenResult g = run_gen(gen);
  std::printf("gen: %zu scenes\n", g.n_scenes);

  CurateOptions curate;
  curate.input = root / "gen";
  curate.output_dir = root / "curated";
  const CurateResult c = run_curate(curate);
  std::printf("curate: %zu scenes, %zu pairs (%zu retained), %zu rejected\n",
              c.scenes_out, c.pairs_total, c.pairs_retained, c.rejected);

  PretextOptions pretext;
  pretext.input_dir = root / "curated";
  pretext.output_dir = root / "curated";
  const PretextResult p = run_pretext(pretext);
  std::printf("pretext: %zu labels, %zu skipped\n", p.pairs_labeled,
              p.pairs_skipped);

  EvalOptions eval;
  eval.input_dir = root / "curated";
  eval.preds_path = root / "gen" / "preds.jsonl";
  eval.labels_path = root / "curated" / "labels.jsonl";
  eval.output_dir = root / "eval";
  eval.with_losses = true;
  const EvalResult e = run_eval(eval);
  std::printf("eval: min_fde=%.4f miss_rate=%.4f cam=%.4f\n",
              e.report.min_fde_mean, e.report.miss_rate,
              e.report.cross_agent_miss);
  std::printf("loss: main=%.4f pretext=%.4f total=%.4f over %zu scenes\n",
              e.main_loss_mean, e.pretext_loss_mean, e.total_loss_mean,
              e.n_loss_scenes);

  StatsOptions stats;
  stats.input_dir = root / "curated";
  stats.labels_path = root / "curated" / "labels.jsonl";
  const StatsResult s = run_stats(stats);
  std::fputs(s.text.c_str(), stdout);
  return 0;
}
