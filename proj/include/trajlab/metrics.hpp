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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "trajlab/errors.hpp"
#include "trajlab/geometry.hpp"
#include "trajlab/interaction.hpp"
#include "trajlab/pretext.hpp"
#include "trajlab/scene.hpp"
#include "trajlab/trajectory.hpp"

namespace trajlab {

/// K hypothesis trajectories for one agent, with per-mode confidences.
struct PredictionSet {
  std::string agent_id;
  std::vector<Trajectory> modes;
  std::vector<double> confidences;  // same length as modes

  [[nodiscard]] std::size_t k() const noexcept { return modes.size(); }

  /// Index of the highest-confidence mode; ties take the lowest index.
  [[nodiscard]] std::size_t argmax_confidence() const {
    if (confidences.empty()) {
      throw Error(Errc::kInvalidArgument, "prediction set has no confidences");
    }
    return static_cast<std::size_t>(
        std::max_element(confidences.begin(), confidences.end()) -
        confidences.begin());
  }

  void validate() const {
    if (modes.empty()) {
      throw Error(Errc::kMalformedRecord,
                  "prediction set for '" + agent_id + "' has no modes");
    }
    if (confidences.size() != modes.size()) {
      throw Error(Errc::kMalformedRecord,
                  "prediction set for '" + agent_id +
                      "' has mismatched confidences");
    }
    for (const Trajectory& m : modes) {
      if (m.empty()) {
        throw Error(Errc::kMalformedRecord,
                    "empty prediction mode for '" + agent_id + "'");
      }
      validate_trajectory(m);
    }
  }
};

/// Predictions of one scene, keyed by agent id.
struct ScenePredictions {
  std::string scene_id;
  std::map<std::string, PredictionSet> by_agent;
};

enum class CamMode {
  kArgmaxConfidence,  // collisions judged on each agent's top mode
  kBestOfK,           // counted only when every mode-aligned combination collides
};

[[nodiscard]] inline const char* to_string(CamMode m) noexcept {
  return m == CamMode::kArgmaxConfidence ? "argmax" : "best-of-k";
}

struct MetricsConfig {
  double miss_threshold = 2.0;  // endpoint error above this is a miss
  double d_cam = 2.0;           // predicted-collision distance
  CamMode cam_mode = CamMode::kArgmaxConfidence;
  bool strong_only = false;     // drop Weak-type pairs from interactive FDE
};

/// Minimum over modes of the endpoint displacement error. Every mode must
/// end at the ground-truth final time index.
[[nodiscard]] inline double min_fde(const PredictionSet& preds,
                                    const Trajectory& gt_future) {
  if (preds.modes.empty()) {
    throw Error(Errc::kInvalidArgument, "min_fde needs at least one mode");
  }
  if (gt_future.empty()) {
    throw Error(Errc::kEmptyTrajectory, "min_fde needs a ground-truth future");
  }
  const TrajPoint& end = gt_future.points.back();
  double best = std::numeric_limits<double>::infinity();
  for (const Trajectory& mode : preds.modes) {
    if (mode.empty() || mode.points.back().t_index != end.t_index) {
      throw Error(Errc::kLengthMismatch,
                  "prediction mode endpoint time differs from ground truth for '" +
                      preds.agent_id + "'");
    }
    best = std::min(best, distance(mode.points.back().pos(), end.pos()));
  }
  return best;
}

/// Fraction of endpoint errors above the miss threshold.
[[nodiscard]] inline double miss_rate(std::span<const double> endpoint_errors,
                                      const MetricsConfig& cfg = {}) {
  if (endpoint_errors.empty()) {
    throw Error(Errc::kEmptyCorpus, "miss_rate over an empty corpus");
  }
  std::size_t missed = 0;
  for (const double e : endpoint_errors) {
    if (e > cfg.miss_threshold) ++missed;
  }
  return static_cast<double>(missed) / static_cast<double>(endpoint_errors.size());
}

/// Everything the corpus-level metrics need about one scene: ground truth,
/// retained pairs, per-pair labels (for the strong filter), and predictions.
struct EvalScene {
  Scene scene;
  std::vector<InteractionPair> pairs;
  std::vector<PretextLabelSet> labels;  // may be empty when labels are absent
  ScenePredictions preds;
};

namespace detail {

[[nodiscard]] inline const PretextLabelSet* find_label(
    const std::vector<PretextLabelSet>& labels, const std::string& other_id) {
  for (const PretextLabelSet& l : labels) {
    if (l.other_id == other_id) return &l;
  }
  return nullptr;
}

}  // namespace detail

/// Mean endpoint error over every retained interacting context agent in the
/// corpus. strong_only drops pairs labeled Weak (or lacking a type label).
/// Agents without predictions are skipped and counted, not scored.
[[nodiscard]] inline double interactive_min_fde(std::span<const EvalScene> corpus,
                                                bool strong_only,
                                                std::size_t* n_agents = nullptr,
                                                std::size_t* n_skipped = nullptr) {
  double total = 0.0;
  std::size_t count = 0;
  std::size_t skipped = 0;
  for (const EvalScene& es : corpus) {
    for (const InteractionPair& pair : es.pairs) {
      if (!pair.retained) continue;
      if (strong_only) {
        const PretextLabelSet* label = detail::find_label(es.labels, pair.other_id);
        if (label == nullptr || label->itype.class_id == InteractionType::kWeak) {
          continue;
        }
      }
      const auto agent_it = es.scene.agents.find(pair.other_id);
      if (agent_it == es.scene.agents.end() || agent_it->second.future.empty()) {
        ++skipped;
        continue;
      }
      const auto pred_it = es.preds.by_agent.find(pair.other_id);
      if (pred_it == es.preds.by_agent.end()) {
        ++skipped;
        continue;
      }
      total += min_fde(pred_it->second, agent_it->second.future);
      ++count;
    }
  }
  if (n_agents != nullptr) *n_agents = count;
  if (n_skipped != nullptr) *n_skipped = skipped;
  if (count == 0) {
    throw Error(Errc::kEmptyCorpus, "no scored interacting agents in corpus");
  }
  return total / static_cast<double>(count);
}

/// Mean endpoint error of the TARGET agents of scenes with no retained
/// pairs. A corpus with no such scene is an error, not a zero.
[[nodiscard]] inline double non_interactive_min_fde(
    std::span<const EvalScene> corpus, std::size_t* n_targets = nullptr,
    std::size_t* n_skipped = nullptr) {
  double total = 0.0;
  std::size_t count = 0;
  std::size_t skipped = 0;
  for (const EvalScene& es : corpus) {
    const bool any_retained =
        std::any_of(es.pairs.begin(), es.pairs.end(),
                    [](const InteractionPair& p) { return p.retained; });
    if (any_retained) continue;
    const auto agent_it = es.scene.agents.find(es.scene.target_id);
    if (agent_it == es.scene.agents.end() || agent_it->second.future.empty()) {
      ++skipped;
      continue;
    }
    const auto pred_it = es.preds.by_agent.find(es.scene.target_id);
    if (pred_it == es.preds.by_agent.end()) {
      ++skipped;
      continue;
    }
    total += min_fde(pred_it->second, agent_it->second.future);
    ++count;
  }
  if (n_targets != nullptr) *n_targets = count;
  if (n_skipped != nullptr) *n_skipped = skipped;
  if (count == 0) {
    throw Error(Errc::kEmptyCorpus, "no scored non-interactive scenes in corpus");
  }
  return total / static_cast<double>(count);
}

namespace detail {

/// True when agents a and b "collide" at aligned step t under the CAM mode:
/// predicted distance under d_cam while ground truth stays at or above it.
/// best-of-k requires the predicted condition for every mode index.
[[nodiscard]] inline std::size_t cam_count_scene(const EvalScene& es,
                                                 const MetricsConfig& cfg) {
  // Agents with both a ground-truth future and predictions, id-sorted.
  std::vector<const std::string*> ids;
  for (const auto& [id, pred] : es.preds.by_agent) {
    const auto agent_it = es.scene.agents.find(id);
    if (agent_it != es.scene.agents.end() && !agent_it->second.future.empty() &&
        !pred.modes.empty()) {
      ids.push_back(&id);
    }
  }
  std::size_t fired = 0;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      const PredictionSet& pa = es.preds.by_agent.at(*ids[a]);
      const PredictionSet& pb = es.preds.by_agent.at(*ids[b]);
      const Trajectory& ga = es.scene.agents.at(*ids[a]).future;
      const Trajectory& gb = es.scene.agents.at(*ids[b]).future;

      std::size_t steps = std::min(ga.size(), gb.size());
      const std::size_t k = std::min(pa.k(), pb.k());
      const std::size_t ma = pa.argmax_confidence();
      const std::size_t mb = pb.argmax_confidence();
      if (cfg.cam_mode == CamMode::kArgmaxConfidence) {
        steps = std::min({steps, pa.modes[ma].size(), pb.modes[mb].size()});
      } else {
        for (std::size_t m = 0; m < k; ++m) {
          steps = std::min({steps, pa.modes[m].size(), pb.modes[m].size()});
        }
      }

      for (std::size_t t = 0; t < steps; ++t) {
        const double gt_d = distance(ga.points[t].pos(), gb.points[t].pos());
        if (gt_d < cfg.d_cam) continue;  // a real near-collision cannot fire
        bool predicted = false;
        if (cfg.cam_mode == CamMode::kArgmaxConfidence) {
          predicted = distance(pa.modes[ma].points[t].pos(),
                               pb.modes[mb].points[t].pos()) < cfg.d_cam;
        } else {
          predicted = k > 0;
          for (std::size_t m = 0; m < k && predicted; ++m) {
            predicted = distance(pa.modes[m].points[t].pos(),
                                 pb.modes[m].points[t].pos()) < cfg.d_cam;
          }
        }
        if (predicted) ++fired;
      }
    }
  }
  return fired;
}

}  // namespace detail

/// Cross-agent miss count: predicted collisions (pairwise distance under
/// d_cam at an aligned step) that ground truth contradicts, averaged over
/// scenes.
[[nodiscard]] inline double cross_agent_miss(std::span<const EvalScene> corpus,
                                             const MetricsConfig& cfg = {}) {
  if (corpus.empty()) {
    throw Error(Errc::kEmptyCorpus, "cross_agent_miss over an empty corpus");
  }
  std::size_t fired = 0;
  for (const EvalScene& es : corpus) {
    fired += detail::cam_count_scene(es, cfg);
  }
  return static_cast<double>(fired) / static_cast<double>(corpus.size());
}

/// Corpus-level metric bundle. Means that have no population are NaN and
/// their count fields are 0 (the single-metric functions throw instead).
struct MetricsReport {
  double min_fde_mean = std::numeric_limits<double>::quiet_NaN();
  double miss_rate = std::numeric_limits<double>::quiet_NaN();
  double interactive_min_fde = std::numeric_limits<double>::quiet_NaN();
  double interactive_min_fde_strong = std::numeric_limits<double>::quiet_NaN();
  double non_interactive_min_fde = std::numeric_limits<double>::quiet_NaN();
  double cross_agent_miss = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_scenes = 0;
  std::size_t n_targets = 0;
  std::size_t n_interactive_agents = 0;
  std::size_t n_interactive_agents_strong = 0;
  std::size_t n_non_interactive_scenes = 0;
  std::size_t n_missing_predictions = 0;
};

/// Runs the full metric suite over a corpus. Targets without predictions are
/// skipped and counted in n_missing_predictions.
[[nodiscard]] inline MetricsReport evaluate_corpus(std::span<const EvalScene> corpus,
                                                   const MetricsConfig& cfg = {}) {
  if (corpus.empty()) {
    throw Error(Errc::kEmptyCorpus, "evaluate_corpus over an empty corpus");
  }
  MetricsReport report;
  report.n_scenes = corpus.size();

  std::vector<double> target_fdes;
  target_fdes.reserve(corpus.size());
  for (const EvalScene& es : corpus) {
    const auto agent_it = es.scene.agents.find(es.scene.target_id);
    if (agent_it == es.scene.agents.end() || agent_it->second.future.empty()) {
      ++report.n_missing_predictions;
      continue;
    }
    const auto pred_it = es.preds.by_agent.find(es.scene.target_id);
    if (pred_it == es.preds.by_agent.end()) {
      ++report.n_missing_predictions;
      continue;
    }
    target_fdes.push_back(min_fde(pred_it->second, agent_it->second.future));
  }
  report.n_targets = target_fdes.size();
  if (!target_fdes.empty()) {
    double total = 0.0;
    for (const double e : target_fdes) total += e;
    report.min_fde_mean = total / static_cast<double>(target_fdes.size());
    report.miss_rate = miss_rate(target_fdes, cfg);
  }

  std::size_t skipped = 0;
  try {
    report.interactive_min_fde = interactive_min_fde(
        corpus, /*strong_only=*/false, &report.n_interactive_agents, &skipped);
  } catch (const Error& e) {
    if (e.code() != Errc::kEmptyCorpus) throw;
  }
  report.n_missing_predictions += skipped;
  try {
    report.interactive_min_fde_strong = interactive_min_fde(
        corpus, /*strong_only=*/true, &report.n_interactive_agents_strong, nullptr);
  } catch (const Error& e) {
    if (e.code() != Errc::kEmptyCorpus) throw;
  }
  try {
    report.non_interactive_min_fde = non_interactive_min_fde(
        corpus, &report.n_non_interactive_scenes, nullptr);
  } catch (const Error& e) {
    if (e.code() != Errc::kEmptyCorpus) throw;
  }
  report.cross_agent_miss = cross_agent_miss(corpus, cfg);
  return report;
}

}  // namespace trajlab
