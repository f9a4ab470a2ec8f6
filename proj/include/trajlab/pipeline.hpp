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

#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "trajlab/csv.hpp"
#include "trajlab/errors.hpp"
#include "trajlab/interaction.hpp"
#include "trajlab/io.hpp"
#include "trajlab/losses.hpp"
#include "trajlab/metrics.hpp"
#include "trajlab/pretext.hpp"
#include "trajlab/scenario.hpp"
#include "trajlab/scene.hpp"
#include "trajlab/svg.hpp"
#include "trajlab/trajectory.hpp"

namespace trajlab {

namespace detail {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must go
/// into pre-sized index i slots, so the merge order (and every output byte)
/// is independent of the worker count.
template <typename Fn>
inline void parallel_for_indexed(std::size_t n, int threads, Fn&& fn) {
  if (threads < 1) {
    throw Error(Errc::kInvalidArgument, "thread count must be >= 1");
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(Errc::kIoError,
                "cannot create directory '" + dir.string() + "': " + ec.message());
  }
}

[[nodiscard]] inline std::string format_metric(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenOptions {
  int count = 120;
  std::uint64_t seed = 0;
  double noise_sigma = 0.05;
  bool with_predictions = true;
  int threads = 1;
  std::filesystem::path output_dir;
};

struct GenResult {
  std::size_t n_scenes = 0;
};

namespace detail {

/// Plausible multi-hypothesis predictions for every agent of a generated
/// scene: mode k is the ground truth plus a ramped endpoint drift (base
/// error drawn per agent), with fixed decreasing confidences. The target
/// also gets per-pair pretext prediction vectors biased toward the true
/// pseudo-labels. Deterministic in the scene seed.
[[nodiscard]] inline PredictionRecord synthesize_predictions(
    const GeneratedScene& gs, std::uint64_t scene_seed) {
  static constexpr double kRamp[6] = {1.0, 1.3, 1.7, 2.2, 3.0, 4.0};
  static constexpr double kConfidences[6] = {0.34, 0.22, 0.16, 0.12, 0.09, 0.07};

  PredictionRecord rec;
  rec.scene_id = gs.scene.scene_id;
  std::uint64_t agent_ordinal = 0;
  for (const auto& [id, track] : gs.scene.agents) {
    const std::uint64_t ordinal = agent_ordinal++;
    if (track.future.empty()) continue;
    Xoshiro256pp rng(derive_stream(scene_seed, 1000 + ordinal));
    const double base = rng.uniform(0.15, 3.0);
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    const Vec2 dir{std::cos(phi), std::sin(phi)};

    AgentPrediction ap;
    ap.set.agent_id = id;
    const double horizon = static_cast<double>(track.future.size());
    for (int k = 0; k < 6; ++k) {
      Trajectory mode;
      mode.agent_id = id;
      mode.kind = TrajKind::kFuture;
      const double mag = base * kRamp[k];
      for (std::size_t t = 0; t < track.future.size(); ++t) {
        const TrajPoint& g = track.future.points[t];
        const double ramp = static_cast<double>(t + 1) / horizon;
        mode.points.push_back({g.x + ramp * mag * dir.x +
                                   0.02 * rng.approx_normal(),
                               g.y + ramp * mag * dir.y +
                                   0.02 * rng.approx_normal(),
                               g.t_index});
      }
      ap.set.modes.push_back(std::move(mode));
      ap.set.confidences.push_back(kConfidences[k]);
    }
    rec.agents[id] = std::move(ap);
  }

  // Pretext vectors: the target against every context agent with a future
  // long enough to carry the full pseudo-label set.
  const auto target_it = gs.scene.agents.find(gs.scene.target_id);
  auto pred_target = rec.agents.find(gs.scene.target_id);
  if (target_it != gs.scene.agents.end() && pred_target != rec.agents.end() &&
      !target_it->second.future.empty()) {
    LabelConfig lcfg;
    IntentClass intent = IntentClass::kOther;
    try {
      intent = classify_intent(target_it->second.past, target_it->second.future,
                               gs.scene.lanes, lcfg);
    } catch (const Error&) {
      intent = IntentClass::kOther;
    }
    std::uint64_t pair_ordinal = 0;
    for (const auto& [id, track] : gs.scene.agents) {
      const std::uint64_t ordinal = pair_ordinal++;
      if (id == gs.scene.target_id) continue;
      if (track.future.size() < static_cast<std::size_t>(kRangeGapSample)) {
        continue;
      }
      Xoshiro256pp rng(derive_stream(scene_seed, 5000 + ordinal));
      InteractionPair pair;
      pair.target_id = gs.scene.target_id;
      pair.other_id = id;
      pair.retained = true;
      const PretextLabelSet truth = label_pair(gs.scene, pair, intent);

      PairPretextPrediction px;
      for (int k = 0; k < 6; ++k) {
        const double spread = 0.25 * static_cast<double>(k);
        px.range_gap.push_back(truth.range_gap.gap +
                               spread * rng.uniform(-1.0, 1.0));
        const double hot = 2.5 - 0.3 * static_cast<double>(k);
        const auto logits = [&rng, hot](int n, int label) {
          std::vector<double> v(static_cast<std::size_t>(n));
          for (double& z : v) z = rng.uniform(-0.4, 0.4);
          v[static_cast<std::size_t>(label)] += hot;
          return v;
        };
        px.closest.push_back(
            logits(kNumClosestDistClasses, truth.closest.class_id));
        px.direction.push_back(
            logits(kNumDirMoveClasses, truth.direction.class_id));
        px.itype.push_back(logits(kNumInteractionTypes,
                                  interaction_type_index(truth.itype.class_id)));
      }
      pred_target->second.pretext[id] = std::move(px);
    }
  }
  return rec;
}

}  // namespace detail

/// Generates a stratified synthetic corpus: scenes.jsonl, oracle.jsonl,
/// preds.jsonl (unless disabled), manifest.json.
inline GenResult run_gen(const GenOptions& opt) {
  if (opt.count < 1) {
    throw Error(Errc::kInvalidSpec, "scene count must be >= 1");
  }
  detail::ensure_dir(opt.output_dir);

  const std::size_t n = static_cast<std::size_t>(opt.count);
  std::vector<GeneratedScene> scenes(n);
  std::vector<PredictionRecord> preds(n);
  detail::parallel_for_indexed(n, opt.threads, [&](std::size_t i) {
    const ScenarioSpec spec =
        suite_spec(static_cast<int>(i), opt.seed, opt.noise_sigma);
    scenes[i] = generate(spec);
    if (opt.with_predictions) {
      preds[i] = detail::synthesize_predictions(scenes[i], spec.seed);
    }
  });

  std::vector<json> scene_lines;
  std::vector<json> oracle_lines;
  std::vector<json> pred_lines;
  scene_lines.reserve(n);
  oracle_lines.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    scene_lines.push_back(encode_scene(scenes[i].scene));
    oracle_lines.push_back(encode_oracle(scenes[i].oracle));
    if (opt.with_predictions) {
      pred_lines.push_back(encode_predictions(preds[i]));
    }
  }
  write_jsonl(opt.output_dir / "scenes.jsonl", scene_lines);
  write_jsonl(opt.output_dir / "oracle.jsonl", oracle_lines);
  if (opt.with_predictions) {
    write_jsonl(opt.output_dir / "preds.jsonl", pred_lines);
  }

  const json config = {{"count", opt.count},
                       {"seed", opt.seed},
                       {"noise_sigma", opt.noise_sigma},
                       {"with_predictions", opt.with_predictions}};
  const json counts = {{"scenes", n}};
  write_json_file(opt.output_dir / "manifest.json",
                  build_manifest("gen", config, counts));
  return {n};
}

// ---------------------------------------------------------------------------
// curate
// ---------------------------------------------------------------------------

struct CurateOptions {
  std::filesystem::path input;   // scenes.jsonl dir, CSV dir, or one CSV file
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> lanes_path;  // lane JSON for CSV input
  LabelConfig label_config;
  int threads = 1;
};

struct CurateResult {
  std::size_t scenes_in = 0;
  std::size_t scenes_out = 0;
  std::size_t rejected = 0;
  std::size_t pairs_total = 0;
  std::size_t pairs_retained = 0;
};

namespace detail {

struct RawSceneSource {
  std::vector<json> jsonl;                  // scene records, or
  std::vector<std::filesystem::path> csvs;  // CSV files, one scene each

  [[nodiscard]] std::size_t size() const noexcept {
    return jsonl.empty() ? csvs.size() : jsonl.size();
  }
};

[[nodiscard]] inline RawSceneSource open_scene_source(
    const std::filesystem::path& input) {
  RawSceneSource src;
  if (std::filesystem::is_directory(input)) {
    const auto jsonl = input / "scenes.jsonl";
    if (std::filesystem::exists(jsonl)) {
      src.jsonl = read_jsonl(jsonl);
      return src;
    }
    for (const auto& entry : std::filesystem::directory_iterator(input)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") {
        src.csvs.push_back(entry.path());
      }
    }
    std::sort(src.csvs.begin(), src.csvs.end());
    if (src.csvs.empty()) {
      throw Error(Errc::kIoError, "no scenes found in '" + input.string() +
                                      "' (need scenes.jsonl or *.csv)");
    }
    return src;
  }
  if (input.extension() == ".csv") {
    src.csvs.push_back(input);
    return src;
  }
  src.jsonl = read_jsonl(input);
  return src;
}

}  // namespace detail

/// Normalizes every scene and runs the interaction filter. Emits normalized
/// scenes.jsonl, pairs.jsonl, rejects.jsonl, manifest.json. Scene-level
/// failures become reject records; the stage fails only on file-level
/// problems.
inline CurateResult run_curate(const CurateOptions& opt) {
  opt.label_config.validate();
  detail::ensure_dir(opt.output_dir);

  std::optional<LaneGraph> lanes;
  if (opt.lanes_path) {
    lanes = decode_lane_graph(read_json_file(*opt.lanes_path));
  }
  const detail::RawSceneSource src = detail::open_scene_source(opt.input);
  const std::size_t n = src.size();

  struct SceneOutcome {
    std::optional<Scene> scene;   // normalized
    PairsRecord pairs;
    std::vector<RejectRecord> rejects;
  };
  std::vector<SceneOutcome> outcomes(n);

  detail::parallel_for_indexed(n, opt.threads, [&](std::size_t i) {
    SceneOutcome& out = outcomes[i];
    Scene scene;
    std::string source_name;
    try {
      if (!src.jsonl.empty()) {
        scene = decode_scene(src.jsonl[i]);
        source_name = scene.scene_id;
      } else {
        source_name = src.csvs[i].filename().string();
        CsvParseResult parsed = parse_trajectory_csv_file(
            src.csvs[i], lanes ? &*lanes : nullptr);
        for (const CsvRowReject& rr : parsed.row_rejects) {
          out.rejects.push_back(
              {source_name + (rr.line_no ? ":" + std::to_string(rr.line_no) : ""),
               rr.error, "row rejected"});
        }
        if (!parsed.ok()) {
          out.rejects.push_back(
              {source_name, errc_name(*parsed.error), parsed.message});
          return;
        }
        scene = std::move(*parsed.scene);
      }
      Scene normalized = normalize_scene(scene);
      out.pairs.scene_id = normalized.scene_id;
      out.pairs.degenerate_heading = normalized.frame->degenerate;
      out.pairs.pairs = label_interactions(normalized, opt.label_config);
      const AgentTrack& target = normalized.target();
      out.pairs.intent = static_cast<int>(target.past.size() +
                                          target.future.size()) >=
                                 opt.label_config.min_traj_len
                             ? classify_intent(target.past, target.future,
                                               normalized.lanes,
                                               opt.label_config)
                             : IntentClass::kOther;
      out.scene = std::move(normalized);
    } catch (const Error& e) {
      out.rejects.push_back({source_name.empty() ? "record " + std::to_string(i)
                                                 : source_name,
                             errc_name(e.code()), e.what()});
      out.scene.reset();
    }
  });

  // Deterministic output order: by scene id, then by input index.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const std::string& ida =
        outcomes[a].scene ? outcomes[a].scene->scene_id : std::string();
    const std::string& idb =
        outcomes[b].scene ? outcomes[b].scene->scene_id : std::string();
    if (ida != idb) return ida < idb;
    return a < b;
  });

  CurateResult result;
  result.scenes_in = n;
  std::vector<json> scene_lines;
  std::vector<json> pair_lines;
  std::vector<json> reject_lines;
  for (const std::size_t i : order) {
    SceneOutcome& out = outcomes[i];
    for (const RejectRecord& r : out.rejects) {
      reject_lines.push_back(encode_reject(r));
    }
    if (!out.scene) {
      ++result.rejected;
      continue;
    }
    ++result.scenes_out;
    result.pairs_total += out.pairs.pairs.size();
    for (const InteractionPair& p : out.pairs.pairs) {
      if (p.retained) ++result.pairs_retained;
    }
    scene_lines.push_back(encode_scene(*out.scene));
    pair_lines.push_back(encode_pairs(out.pairs));
  }
  write_jsonl(opt.output_dir / "scenes.jsonl", scene_lines);
  write_jsonl(opt.output_dir / "pairs.jsonl", pair_lines);
  write_jsonl(opt.output_dir / "rejects.jsonl", reject_lines);

  const json config = {{"d_th", opt.label_config.d_th},
                       {"min_traj_len", opt.label_config.min_traj_len},
                       {"oncoming_angle", opt.label_config.oncoming_angle},
                       {"turn_heading_delta", opt.label_config.turn_heading_delta},
                       {"waiting_speed", opt.label_config.waiting_speed},
                       {"lane_change_lateral", opt.label_config.lane_change_lateral}};
  const json counts = {{"scenes_in", result.scenes_in},
                       {"scenes_out", result.scenes_out},
                       {"rejected", result.rejected},
                       {"pairs_total", result.pairs_total},
                       {"pairs_retained", result.pairs_retained}};
  write_json_file(opt.output_dir / "manifest.json",
                  build_manifest("curate", config, counts));
  return result;
}

// ---------------------------------------------------------------------------
// pretext
// ---------------------------------------------------------------------------

struct PretextOptions {
  std::filesystem::path input_dir;  // curate output
  std::filesystem::path output_dir;
  PretextConfig pretext_config;
  int threads = 1;
};

struct PretextResult {
  std::size_t scenes = 0;
  std::size_t pairs_labeled = 0;
  std::size_t pairs_skipped = 0;
};

/// Produces the four pseudo-labels for every retained pair: labels.jsonl
/// plus a manifest. Pairs whose geometry cannot carry a label (horizon too
/// short for the range gap, no aligned overlap) are recorded as skipped.
inline PretextResult run_pretext(const PretextOptions& opt) {
  detail::ensure_dir(opt.output_dir);
  const std::vector<json> scene_lines = read_jsonl(opt.input_dir / "scenes.jsonl");
  const std::vector<json> pair_lines = read_jsonl(opt.input_dir / "pairs.jsonl");

  std::map<std::string, PairsRecord> pairs_by_scene;
  for (const json& j : pair_lines) {
    PairsRecord rec = decode_pairs(j);
    pairs_by_scene[rec.scene_id] = std::move(rec);
  }

  const std::size_t n = scene_lines.size();
  std::vector<LabelsRecord> records(n);
  detail::parallel_for_indexed(n, opt.threads, [&](std::size_t i) {
    const Scene scene = decode_scene(scene_lines[i]);
    LabelsRecord& rec = records[i];
    rec.scene_id = scene.scene_id;
    const auto pit = pairs_by_scene.find(scene.scene_id);
    if (pit == pairs_by_scene.end()) return;
    for (const InteractionPair& raw_pair : pit->second.pairs) {
      if (!raw_pair.retained) continue;
      InteractionPair pair = raw_pair;
      pair.target_id = scene.target_id;
      try {
        rec.labels.push_back(
            label_pair(scene, pair, pit->second.intent, opt.pretext_config));
      } catch (const Error& e) {
        rec.skipped.push_back({pair.other_id, errc_name(e.code())});
      }
    }
  });

  PretextResult result;
  result.scenes = n;
  std::vector<json> label_lines;
  label_lines.reserve(n);
  for (const LabelsRecord& rec : records) {
    result.pairs_labeled += rec.labels.size();
    result.pairs_skipped += rec.skipped.size();
    label_lines.push_back(encode_labels(rec));
  }
  write_jsonl(opt.output_dir / "labels.jsonl", label_lines);

  const json config = {{"eps_d", opt.pretext_config.eps_d}};
  const json counts = {{"scenes", result.scenes},
                       {"pairs_labeled", result.pairs_labeled},
                       {"pairs_skipped", result.pairs_skipped}};
  write_json_file(opt.output_dir / "manifest.json",
                  build_manifest("pretext", config, counts));
  return result;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOptions {
  std::filesystem::path input_dir;  // curate output (normalized scenes+pairs)
  std::filesystem::path preds_path; // predictions in source coordinates
  std::optional<std::filesystem::path> labels_path;
  std::filesystem::path output_dir;
  MetricsConfig metrics;
  LossWeights weights;
  bool with_losses = false;
  int threads = 1;
};

struct EvalResult {
  MetricsReport report;
  double main_loss_mean = std::numeric_limits<double>::quiet_NaN();
  double pretext_loss_mean = std::numeric_limits<double>::quiet_NaN();
  double total_loss_mean = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_loss_scenes = 0;
  std::size_t n_loss_pairs = 0;
  std::size_t n_loss_pairs_skipped = 0;
};

namespace detail {

/// Predictions are stored in source coordinates; metrics run in the
/// normalized frame, so modes are mapped through the scene's stored frame.
[[nodiscard]] inline PredictionSet transform_prediction(
    const PredictionSet& set, const std::optional<NormalizationFrame>& frame) {
  if (!frame) return set;
  PredictionSet out = set;
  for (Trajectory& mode : out.modes) {
    for (TrajPoint& p : mode.points) {
      const Vec2 q = frame->apply(p.pos());
      p.x = q.x;
      p.y = q.y;
    }
  }
  return out;
}

}  // namespace detail

/// Scores predictions against a curated corpus and (optionally) replays the
/// training objective on them. Writes report.json, report.txt, manifest.json.
inline EvalResult run_eval(const EvalOptions& opt) {
  detail::ensure_dir(opt.output_dir);
  const std::vector<json> scene_lines = read_jsonl(opt.input_dir / "scenes.jsonl");
  const std::vector<json> pair_lines = read_jsonl(opt.input_dir / "pairs.jsonl");
  const std::vector<json> pred_lines = read_jsonl(opt.preds_path);

  std::map<std::string, PairsRecord> pairs_by_scene;
  for (const json& j : pair_lines) {
    PairsRecord rec = decode_pairs(j);
    pairs_by_scene[rec.scene_id] = std::move(rec);
  }
  std::map<std::string, PredictionRecord> preds_by_scene;
  for (const json& j : pred_lines) {
    PredictionRecord rec = decode_predictions(j);
    preds_by_scene[rec.scene_id] = std::move(rec);
  }
  std::map<std::string, LabelsRecord> labels_by_scene;
  if (opt.labels_path) {
    for (const json& j : read_jsonl(*opt.labels_path)) {
      LabelsRecord rec = decode_labels(j);
      labels_by_scene[rec.scene_id] = std::move(rec);
    }
  }

  const std::size_t n = scene_lines.size();
  std::vector<EvalScene> corpus(n);
  detail::parallel_for_indexed(n, opt.threads, [&](std::size_t i) {
    EvalScene& es = corpus[i];
    es.scene = decode_scene(scene_lines[i]);
    const auto pit = pairs_by_scene.find(es.scene.scene_id);
    if (pit != pairs_by_scene.end()) {
      es.pairs = pit->second.pairs;
      for (InteractionPair& p : es.pairs) p.target_id = es.scene.target_id;
    }
    const auto lit = labels_by_scene.find(es.scene.scene_id);
    if (lit != labels_by_scene.end()) es.labels = lit->second.labels;
    es.preds.scene_id = es.scene.scene_id;
    const auto rit = preds_by_scene.find(es.scene.scene_id);
    if (rit != preds_by_scene.end()) {
      for (const auto& [id, ap] : rit->second.agents) {
        es.preds.by_agent[id] =
            detail::transform_prediction(ap.set, es.scene.frame);
      }
    }
  });

  EvalResult result;
  result.report = evaluate_corpus(corpus, opt.metrics);

  if (opt.with_losses) {
    if (!opt.labels_path) {
      throw Error(Errc::kInvalidArgument,
                  "loss replay needs the pseudo-label file");
    }
    double main_total = 0.0;
    double pretext_total = 0.0;
    double combined_total = 0.0;
    for (const EvalScene& es : corpus) {
      const auto agent_it = es.scene.agents.find(es.scene.target_id);
      const auto pred_it = es.preds.by_agent.find(es.scene.target_id);
      if (agent_it == es.scene.agents.end() ||
          agent_it->second.future.empty() ||
          pred_it == es.preds.by_agent.end()) {
        continue;
      }
      const std::vector<double> per_mode =
          main_trajectory_loss(pred_it->second, agent_it->second.future);
      const std::size_t selected = select_mode(per_mode);
      const double main_loss = per_mode[selected];

      // Pretext replay over the retained, labeled pairs of this scene.
      std::vector<double> per_pair;
      const auto rec_it = preds_by_scene.find(es.scene.scene_id);
      if (rec_it != preds_by_scene.end()) {
        const auto tp = rec_it->second.agents.find(es.scene.target_id);
        for (const PretextLabelSet& label : es.labels) {
          const PairPretextPrediction* px = nullptr;
          if (tp != rec_it->second.agents.end()) {
            const auto px_it = tp->second.pretext.find(label.other_id);
            if (px_it != tp->second.pretext.end()) px = &px_it->second;
          }
          if (px == nullptr || px->range_gap.size() <= selected ||
              px->closest.size() <= selected ||
              px->direction.size() <= selected ||
              px->itype.size() <= selected) {
            ++result.n_loss_pairs_skipped;
            continue;
          }
          double pair_loss =
              smooth_l1(px->range_gap[selected], label.range_gap.gap).value;
          pair_loss +=
              cross_entropy(px->closest[selected], label.closest.class_id).value;
          pair_loss += cross_entropy(px->direction[selected],
                                     label.direction.class_id).value;
          pair_loss += cross_entropy(px->itype[selected],
                                     interaction_type_index(label.itype.class_id))
                           .value;
          per_pair.push_back(pair_loss);
        }
      }

      double scene_pretext = 0.0;
      if (!per_pair.empty()) {
        scene_pretext =
            pretext_loss(per_pair, static_cast<int>(per_pair.size()));
        result.n_loss_pairs += per_pair.size();
      }
      main_total += main_loss;
      pretext_total += scene_pretext;
      combined_total += total_loss(main_loss, scene_pretext, opt.weights);
      ++result.n_loss_scenes;
    }
    if (result.n_loss_scenes > 0) {
      const double inv = 1.0 / static_cast<double>(result.n_loss_scenes);
      result.main_loss_mean = main_total * inv;
      result.pretext_loss_mean = pretext_total * inv;
      result.total_loss_mean = combined_total * inv;
    }
  }

  // Report: json twin of the txt, identical keys.
  json rj;
  rj["schema_version"] = kSchemaVersion;
  rj["type"] = "report";
  rj["min_fde"] = result.report.min_fde_mean;
  rj["miss_rate"] = result.report.miss_rate;
  rj["i_min_fde"] = result.report.interactive_min_fde;
  rj["i_min_fde_strong"] = result.report.interactive_min_fde_strong;
  rj["ni_min_fde"] = result.report.non_interactive_min_fde;
  rj["cam"] = result.report.cross_agent_miss;
  rj["n_scenes"] = result.report.n_scenes;
  rj["n_targets"] = result.report.n_targets;
  rj["n_interactive_agents"] = result.report.n_interactive_agents;
  rj["n_interactive_agents_strong"] = result.report.n_interactive_agents_strong;
  rj["n_non_interactive_scenes"] = result.report.n_non_interactive_scenes;
  rj["n_missing_predictions"] = result.report.n_missing_predictions;
  if (opt.with_losses) {
    rj["main_loss"] = result.main_loss_mean;
    rj["pretext_loss"] = result.pretext_loss_mean;
    rj["total_loss"] = result.total_loss_mean;
    rj["lambda"] = opt.weights.lambda;
    rj["n_loss_scenes"] = result.n_loss_scenes;
    rj["n_loss_pairs"] = result.n_loss_pairs;
    rj["n_loss_pairs_skipped"] = result.n_loss_pairs_skipped;
  }
  write_json_file(opt.output_dir / "report.json", rj);

  std::string txt;
  for (const auto& [key, value] : rj.items()) {
    if (key == "schema_version" || key == "type") continue;
    txt += key;
    txt += '=';
    if (value.is_number_float()) {
      txt += detail::format_metric(value.get<double>());
    } else if (value.is_null()) {
      txt += "nan";
    } else {
      txt += value.dump();
    }
    txt += '\n';
  }
  std::ofstream out(opt.output_dir / "report.txt", std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write report.txt");
  out << txt;
  out.close();

  const json config = {{"miss_threshold", opt.metrics.miss_threshold},
                       {"d_cam", opt.metrics.d_cam},
                       {"cam_mode", to_string(opt.metrics.cam_mode)},
                       {"strong_only", opt.metrics.strong_only},
                       {"lambda", opt.weights.lambda},
                       {"with_losses", opt.with_losses}};
  const json counts = {{"scenes", result.report.n_scenes}};
  write_json_file(opt.output_dir / "manifest.json",
                  build_manifest("eval", config, counts));
  return result;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

struct StatsOptions {
  std::filesystem::path input_dir;  // curate output
  std::optional<std::filesystem::path> labels_path;
  std::optional<std::filesystem::path> render_dir;
  int render_count = 8;
};

struct StatsResult {
  std::string text;  // sorted key=value lines, also written to stats.txt
};

/// Corpus composition counters (and optional SVG renders of the first
/// scenes). Reads a curated directory.
inline StatsResult run_stats(const StatsOptions& opt) {
  const std::vector<json> pair_lines = read_jsonl(opt.input_dir / "pairs.jsonl");

  std::map<std::string, std::size_t> counters;
  counters["scenes"] = pair_lines.size();
  for (const json& j : pair_lines) {
    const PairsRecord rec = decode_pairs(j);
    counters[std::string("intent_") + to_string(rec.intent)]++;
    if (rec.degenerate_heading) counters["degenerate_heading_scenes"]++;
    bool any_retained = false;
    for (const InteractionPair& p : rec.pairs) {
      counters["pairs_candidates"]++;
      counters[std::string("pair_reason_") + to_string(p.reason)]++;
      if (p.retained) {
        counters["pairs_retained"]++;
        any_retained = true;
      }
    }
    counters[any_retained ? "scenes_interactive" : "scenes_non_interactive"]++;
  }

  if (opt.labels_path) {
    for (const json& j : read_jsonl(*opt.labels_path)) {
      const LabelsRecord rec = decode_labels(j);
      for (const PretextLabelSet& l : rec.labels) {
        counters["labels_total"]++;
        counters["cd_class_" + std::to_string(l.closest.class_id)]++;
        counters["dm_class_" + std::to_string(l.direction.class_id)]++;
        counters[std::string("itype_") + to_string(l.itype.class_id)]++;
        if (l.itype.lane_fallback) counters["itype_lane_fallback"]++;
      }
      counters["labels_skipped"] += rec.skipped.size();
    }
  }

  StatsResult result;
  for (const auto& [key, value] : counters) {
    result.text += key + "=" + std::to_string(value) + "\n";
  }
  std::ofstream out(opt.input_dir / "stats.txt", std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write stats.txt");
  out << result.text;

  if (opt.render_dir) {
    detail::ensure_dir(*opt.render_dir);
    const std::vector<json> scene_lines =
        read_jsonl(opt.input_dir / "scenes.jsonl");
    const std::size_t n = std::min<std::size_t>(
        scene_lines.size(), static_cast<std::size_t>(opt.render_count));
    for (std::size_t i = 0; i < n; ++i) {
      const Scene scene = decode_scene(scene_lines[i]);
      std::ofstream svg(*opt.render_dir / (scene.scene_id + ".svg"),
                        std::ios::trunc);
      if (!svg) throw Error(Errc::kIoError, "cannot write scene SVG");
      svg << render_scene_svg(scene);
    }
  }
  return result;
}

}  // namespace trajlab
