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

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "trajlab/trajlab.hpp"

namespace {

namespace fs = std::filesystem;
using trajlab::Errc;
using trajlab::Error;
using trajlab::json;

// Exit codes: 0 success, 1 data or I/O failure, 2 usage error.
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

/// 0 means auto: one worker per available hardware thread.
[[nodiscard]] int resolve_threads(int requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Settings file support: a flat JSON object whose keys mirror the stage
/// manifest config. Explicit command line flags win over file values.
[[nodiscard]] json load_config(const std::string& path,
                               std::initializer_list<const char*> known) {
  if (path.empty()) return json::object();
  const json j = trajlab::read_json_file(path);
  if (!j.is_object()) {
    throw Error(Errc::kInvalidSpec, "config file must hold a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) {
      throw Error(Errc::kInvalidSpec, "unknown config key '" + key + "'");
    }
  }
  return j;
}

template <typename T>
void apply_config(const json& cfg, const char* key, const CLI::App& sub,
                  const std::string& flag, T* out) {
  if (!cfg.contains(key) || sub.count(flag) > 0) return;
  try {
    *out = cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::kInvalidSpec,
                std::string("config key '") + key + "' has the wrong type");
  }
}

int run_gen_cmd(const CLI::App& sub, const trajlab::GenOptions& parsed,
                const std::string& config_path) {
  trajlab::GenOptions opt = parsed;
  const json cfg = load_config(
      config_path, {"count", "seed", "noise_sigma", "with_predictions"});
  apply_config(cfg, "count", sub, "--count", &opt.count);
  apply_config(cfg, "seed", sub, "--seed", &opt.seed);
  apply_config(cfg, "noise_sigma", sub, "--noise-sigma", &opt.noise_sigma);
  bool with_predictions = opt.with_predictions;
  apply_config(cfg, "with_predictions", sub, "--no-predictions",
               &with_predictions);
  opt.with_predictions = with_predictions;

  const trajlab::GenResult res = trajlab::run_gen(opt);
  std::printf("gen: scenes=%zu dir=%s\n", res.n_scenes,
              opt.output_dir.string().c_str());
  return 0;
}

int run_curate_cmd(const CLI::App& sub, const trajlab::CurateOptions& parsed,
                   const std::string& config_path) {
  trajlab::CurateOptions opt = parsed;
  const json cfg = load_config(
      config_path, {"d_th", "min_traj_len", "oncoming_angle",
                    "turn_heading_delta", "waiting_speed",
                    "lane_change_lateral"});
  apply_config(cfg, "d_th", sub, "--d-th", &opt.label_config.d_th);
  apply_config(cfg, "min_traj_len", sub, "--min-traj-len",
               &opt.label_config.min_traj_len);
  apply_config(cfg, "oncoming_angle", sub, "--oncoming-angle",
               &opt.label_config.oncoming_angle);
  apply_config(cfg, "turn_heading_delta", sub, "--turn-heading-delta",
               &opt.label_config.turn_heading_delta);
  apply_config(cfg, "waiting_speed", sub, "--waiting-speed",
               &opt.label_config.waiting_speed);
  apply_config(cfg, "lane_change_lateral", sub, "--lane-change-lateral",
               &opt.label_config.lane_change_lateral);

  const trajlab::CurateResult res = trajlab::run_curate(opt);
  std::printf(
      "curate: scenes_in=%zu scenes_out=%zu rejected=%zu pairs=%zu "
      "retained=%zu\n",
      res.scenes_in, res.scenes_out, res.rejected, res.pairs_total,
      res.pairs_retained);
  return 0;
}

int run_pretext_cmd(const CLI::App& sub, const trajlab::PretextOptions& parsed,
                    const std::string& config_path) {
  trajlab::PretextOptions opt = parsed;
  const json cfg = load_config(config_path, {"eps_d"});
  apply_config(cfg, "eps_d", sub, "--eps-d", &opt.pretext_config.eps_d);

  const trajlab::PretextResult res = trajlab::run_pretext(opt);
  std::printf("pretext: scenes=%zu pairs_labeled=%zu pairs_skipped=%zu\n",
              res.scenes, res.pairs_labeled, res.pairs_skipped);
  return 0;
}

int run_eval_cmd(const CLI::App& sub, const trajlab::EvalOptions& parsed,
                 const std::string& config_path, const std::string& cam_mode,
                 const std::string& labels_flag) {
  trajlab::EvalOptions opt = parsed;
  const json cfg = load_config(
      config_path, {"miss_threshold", "d_cam", "cam_mode", "strong_only",
                    "lambda", "with_losses"});
  apply_config(cfg, "miss_threshold", sub, "--miss-threshold",
               &opt.metrics.miss_threshold);
  apply_config(cfg, "d_cam", sub, "--d-cam", &opt.metrics.d_cam);
  apply_config(cfg, "strong_only", sub, "--strong-only",
               &opt.metrics.strong_only);
  apply_config(cfg, "lambda", sub, "--lambda", &opt.weights.lambda);
  apply_config(cfg, "with_losses", sub, "--with-losses", &opt.with_losses);
  std::string mode = cam_mode;
  apply_config(cfg, "cam_mode", sub, "--cam-mode", &mode);
  if (mode == "argmax") {
    opt.metrics.cam_mode = trajlab::CamMode::kArgmaxConfidence;
  } else if (mode == "best-of-k") {
    opt.metrics.cam_mode = trajlab::CamMode::kBestOfK;
  } else {
    throw Error(Errc::kInvalidSpec, "cam_mode must be argmax or best-of-k");
  }

  if (opt.preds_path.empty()) opt.preds_path = opt.input_dir / "preds.jsonl";
  if (!labels_flag.empty()) {
    opt.labels_path = fs::path(labels_flag);
  } else if (fs::exists(opt.input_dir / "labels.jsonl")) {
    opt.labels_path = opt.input_dir / "labels.jsonl";
  }
  if (opt.output_dir.empty()) opt.output_dir = opt.input_dir;

  const trajlab::EvalResult res = trajlab::run_eval(opt);
  std::printf("eval: scenes=%zu report=%s\n", res.report.n_scenes,
              (opt.output_dir / "report.txt").string().c_str());
  std::printf("  min_fde=%s miss_rate=%s cam=%s\n",
              trajlab::detail::format_metric(res.report.min_fde_mean).c_str(),
              trajlab::detail::format_metric(res.report.miss_rate).c_str(),
              trajlab::detail::format_metric(res.report.cross_agent_miss)
                  .c_str());
  if (opt.with_losses) {
    std::printf("  main_loss=%s pretext_loss=%s total_loss=%s\n",
                trajlab::detail::format_metric(res.main_loss_mean).c_str(),
                trajlab::detail::format_metric(res.pretext_loss_mean).c_str(),
                trajlab::detail::format_metric(res.total_loss_mean).c_str());
  }
  return 0;
}

int run_stats_cmd(const trajlab::StatsOptions& parsed,
                  const std::string& labels_flag,
                  const std::string& render_flag) {
  trajlab::StatsOptions opt = parsed;
  if (!labels_flag.empty()) {
    opt.labels_path = fs::path(labels_flag);
  } else if (fs::exists(opt.input_dir / "labels.jsonl")) {
    opt.labels_path = opt.input_dir / "labels.jsonl";
  }
  if (!render_flag.empty()) opt.render_dir = fs::path(render_flag);

  const trajlab::StatsResult res = trajlab::run_stats(opt);
  std::fputs(res.text.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajectory interaction curation and evaluation toolkit"};
  app.require_subcommand(1);

  std::string config_path;

  // gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand(
      "gen", "generate a synthetic scenario corpus with oracle annotations");
  trajlab::GenOptions gen_opt;
  gen_opt.threads = 0;
  std::string gen_out;
  gen->add_option("-o,--output", gen_out, "output directory")->required();
  gen->add_option("-n,--count", gen_opt.count, "number of scenes")
      ->capture_default_str();
  gen->add_option("--seed", gen_opt.seed, "master seed")
      ->capture_default_str();
  gen->add_option("--noise-sigma", gen_opt.noise_sigma,
                  "per-sample position noise, meters")
      ->capture_default_str();
  gen->add_flag("--no-predictions", "skip the synthetic prediction file");
  gen->add_option("--threads", gen_opt.threads, "worker threads (0 = auto)")
      ->capture_default_str();
  gen->add_option("--config", config_path, "JSON settings file");

  // curate ---------------------------------------------------------------
  auto* curate = app.add_subcommand(
      "curate", "normalize scenes and label interaction pairs");
  trajlab::CurateOptions curate_opt;
  curate_opt.threads = 0;
  std::string curate_in;
  std::string curate_out;
  std::string curate_lanes;
  curate->add_option("-i,--input", curate_in,
                     "scenes.jsonl directory, CSV directory, or one CSV file")
      ->required();
  curate->add_option("-o,--output", curate_out, "output directory")
      ->required();
  curate->add_option("--lanes", curate_lanes,
                     "lane graph JSON used for CSV input");
  curate->add_option("--d-th", curate_opt.label_config.d_th,
                     "interaction distance threshold, meters")
      ->capture_default_str();
  curate->add_option("--min-traj-len", curate_opt.label_config.min_traj_len,
                     "minimum samples for a track to participate")
      ->capture_default_str();
  curate->add_option("--oncoming-angle", curate_opt.label_config.oncoming_angle,
                     "heading difference beyond which traffic is oncoming")
      ->capture_default_str();
  curate->add_option("--turn-heading-delta",
                     curate_opt.label_config.turn_heading_delta,
                     "net heading change that counts as a turn")
      ->capture_default_str();
  curate->add_option("--waiting-speed", curate_opt.label_config.waiting_speed,
                     "mean speed below which a turn is waiting")
      ->capture_default_str();
  curate->add_option("--lane-change-lateral",
                     curate_opt.label_config.lane_change_lateral,
                     "lateral drift that counts as a lane change")
      ->capture_default_str();
  curate->add_option("--threads", curate_opt.threads, "worker threads (0 = auto)")
      ->capture_default_str();
  curate->add_option("--config", config_path, "JSON settings file");

  // pretext --------------------------------------------------------------
  auto* pretext = app.add_subcommand(
      "pretext", "emit self-supervised pseudo-labels for retained pairs");
  trajlab::PretextOptions pretext_opt;
  pretext_opt.threads = 0;
  std::string pretext_in;
  std::string pretext_out;
  pretext->add_option("-i,--input", pretext_in, "curated directory")
      ->required();
  pretext->add_option("-o,--output", pretext_out, "output directory")
      ->required();
  pretext->add_option("--eps-d", pretext_opt.pretext_config.eps_d,
                      "distance beyond which an interaction is weak")
      ->capture_default_str();
  pretext->add_option("--threads", pretext_opt.threads, "worker threads (0 = auto)")
      ->capture_default_str();
  pretext->add_option("--config", config_path, "JSON settings file");

  // eval -----------------------------------------------------------------
  auto* eval = app.add_subcommand(
      "eval", "score predictions against a curated corpus");
  trajlab::EvalOptions eval_opt;
  eval_opt.threads = 0;
  std::string eval_in;
  std::string eval_out;
  std::string eval_preds;
  std::string eval_labels;
  std::string cam_mode = "argmax";
  eval->add_option("-i,--input", eval_in, "curated directory")->required();
  eval->add_option("--preds", eval_preds,
                   "prediction JSONL (default <input>/preds.jsonl)");
  eval->add_option("--labels", eval_labels,
                   "pseudo-label JSONL (default <input>/labels.jsonl if present)");
  eval->add_option("-o,--output", eval_out,
                   "report directory (default <input>)");
  eval->add_option("--miss-threshold", eval_opt.metrics.miss_threshold,
                   "endpoint error beyond which a scene is missed")
      ->capture_default_str();
  eval->add_option("--d-cam", eval_opt.metrics.d_cam,
                   "predicted proximity that counts as a cross-agent miss")
      ->capture_default_str();
  eval->add_option("--cam-mode", cam_mode, "argmax or best-of-k")
      ->capture_default_str()
      ->check(CLI::IsMember({"argmax", "best-of-k"}));
  eval->add_flag("--strong-only", eval_opt.metrics.strong_only,
                 "restrict the strong interactive metric to non-weak pairs");
  eval->add_flag("--with-losses", eval_opt.with_losses,
                 "replay the training objective on the predictions");
  eval->add_option("--lambda", eval_opt.weights.lambda,
                   "pretext weight in the combined loss")
      ->capture_default_str();
  eval->add_option("--threads", eval_opt.threads, "worker threads (0 = auto)")
      ->capture_default_str();
  eval->add_option("--config", config_path, "JSON settings file");

  // stats ----------------------------------------------------------------
  auto* stats = app.add_subcommand(
      "stats", "corpus composition counters and optional SVG renders");
  trajlab::StatsOptions stats_opt;
  std::string stats_in;
  std::string stats_labels;
  std::string stats_render;
  stats->add_option("-i,--input", stats_in, "curated directory")->required();
  stats->add_option("--labels", stats_labels,
                    "pseudo-label JSONL (default <input>/labels.jsonl if present)");
  stats->add_option("--render", stats_render, "directory for SVG renders");
  stats->add_option("--render-count", stats_opt.render_count,
                    "how many scenes to render")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      gen_opt.output_dir = gen_out;
      gen_opt.with_predictions = gen->count("--no-predictions") == 0;
      gen_opt.threads = resolve_threads(gen_opt.threads);
      return run_gen_cmd(*gen, gen_opt, config_path);
    }
    if (curate->parsed()) {
      curate_opt.input = curate_in;
      curate_opt.output_dir = curate_out;
      if (!curate_lanes.empty()) curate_opt.lanes_path = fs::path(curate_lanes);
      curate_opt.threads = resolve_threads(curate_opt.threads);
      return run_curate_cmd(*curate, curate_opt, config_path);
    }
    if (pretext->parsed()) {
      pretext_opt.input_dir = pretext_in;
      pretext_opt.output_dir = pretext_out;
      pretext_opt.threads = resolve_threads(pretext_opt.threads);
      return run_pretext_cmd(*pretext, pretext_opt, config_path);
    }
    if (eval->parsed()) {
      eval_opt.input_dir = eval_in;
      eval_opt.output_dir = eval_out;
      eval_opt.preds_path = eval_preds;
      eval_opt.threads = resolve_threads(eval_opt.threads);
      return run_eval_cmd(*eval, eval_opt, config_path, cam_mode, eval_labels);
    }
    if (stats->parsed()) {
      stats_opt.input_dir = stats_in;
      return run_stats_cmd(stats_opt, stats_labels, stats_render);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "trajlab: error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "trajlab: error: unexpected: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
