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
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "trajlab/errors.hpp"
#include "trajlab/geometry.hpp"
#include "trajlab/interaction.hpp"
#include "trajlab/scene.hpp"
#include "trajlab/trajectory.hpp"

namespace trajlab {

/// Future sample (1-based) at which the range gap is read: 2.0 s at 10 Hz.
inline constexpr int kRangeGapSample = 20;

/// Closest-distance class edges (m); upper edge inclusive, last bin open.
inline constexpr double kClosestDistEdges[3] = {5.0, 10.0, 15.0};
inline constexpr int kNumClosestDistClasses = 4;

/// Direction-of-movement threshold (m) on D_final - D_init.
inline constexpr double kDirMoveThreshold = 2.0;
inline constexpr int kNumDirMoveClasses = 3;

struct PretextConfig {
  /// Pairs whose cross-time distance exceeds this are weakly interacting.
  double eps_d = 5.0;
};

/// Signed gap (m) between target and context agent at the range-gap sample.
struct RangeGapLabel {
  double gap = 0.0;
};

/// Class over the aligned-time minimum distance, plus the raw value.
struct ClosestDistClass {
  int class_id = 0;
  double d_gt = 0.0;
  int n_aligned = 0;  // samples compared after truncating to the shorter track
};

/// Class over the end-minus-start distance trend, plus the raw value.
struct DirMoveClass {
  int class_id = 0;
  double dir_gt = 0.0;
};

enum class InteractionType {
  kCloseLead,       // context agent passes the conflict point first
  kCloseFollow,     // context agent passes it after the target
  kLeftTurnLead,    // lead variant under a left-turning target
  kLeftTurnFollow,  // follow variant under a left-turning target
  kWeak,            // distant or lane-separated; no lead/follow semantics
};

[[nodiscard]] inline const char* to_string(InteractionType t) noexcept {
  switch (t) {
    case InteractionType::kCloseLead: return "close_lead";
    case InteractionType::kCloseFollow: return "close_follow";
    case InteractionType::kLeftTurnLead: return "left_turn_lead";
    case InteractionType::kLeftTurnFollow: return "left_turn_follow";
    case InteractionType::kWeak: return "weak";
  }
  return "weak";
}

[[nodiscard]] inline InteractionType interaction_type_from_string(
    const std::string& s) {
  if (s == "close_lead") return InteractionType::kCloseLead;
  if (s == "close_follow") return InteractionType::kCloseFollow;
  if (s == "left_turn_lead") return InteractionType::kLeftTurnLead;
  if (s == "left_turn_follow") return InteractionType::kLeftTurnFollow;
  if (s == "weak") return InteractionType::kWeak;
  throw Error(Errc::kMalformedRecord, "unknown interaction type '" + s + "'");
}

[[nodiscard]] inline int interaction_type_index(InteractionType t) noexcept {
  return static_cast<int>(t);
}
inline constexpr int kNumInteractionTypes = 5;

/// Type-of-interaction label with its evidence: the conflict-point passage
/// times (t_index of each agent's closest future sample) and distance.
struct InteractionTypeClass {
  InteractionType class_id = InteractionType::kWeak;
  int t1 = 0;            // target passage time
  int t2 = 0;            // context agent passage time
  double d_i = 0.0;      // cross-time future-future minimum distance
  bool lane_fallback = false;  // target had no lane; lane rules skipped
};

/// All four pseudo-labels of one retained (target, other) pair.
struct PretextLabelSet {
  std::string other_id;
  RangeGapLabel range_gap;
  ClosestDistClass closest;
  DirMoveClass direction;
  InteractionTypeClass itype;
};

/// Distance between target and context agent at the range-gap sample
/// (positional: the 20th available future sample of each).
[[nodiscard]] inline RangeGapLabel range_gap_gt(const Trajectory& target_future,
                                                const Trajectory& other_future) {
  constexpr std::size_t need = static_cast<std::size_t>(kRangeGapSample);
  if (target_future.size() < need || other_future.size() < need) {
    throw Error(Errc::kHorizonTooShort,
                "range gap needs " + std::to_string(kRangeGapSample) +
                    " future samples");
  }
  return {distance(target_future.points[need - 1].pos(),
                   other_future.points[need - 1].pos())};
}

/// Bin of an aligned-minimum distance: [0,5] -> 0, (5,10] -> 1,
/// (10,15] -> 2, (15,inf) -> 3.
[[nodiscard]] inline int closest_distance_bin(double d) {
  if (d < 0.0 || !std::isfinite(d)) {
    throw Error(Errc::kInvalidArgument, "distance must be finite and >= 0");
  }
  for (int c = 0; c < kNumClosestDistClasses - 1; ++c) {
    if (d <= kClosestDistEdges[c]) return c;
  }
  return kNumClosestDistClasses - 1;
}

/// Aligned-time minimum distance class. Tracks of unequal length are
/// truncated to the common prefix; n_aligned records how many samples
/// entered the minimum.
[[nodiscard]] inline ClosestDistClass closest_distance_class(
    const Trajectory& target_future, const Trajectory& other_future) {
  const std::size_t n = std::min(target_future.size(), other_future.size());
  if (n == 0) {
    throw Error(Errc::kEmptyOverlap, "no aligned future samples");
  }
  double best = distance(target_future.points[0].pos(),
                         other_future.points[0].pos());
  for (std::size_t k = 1; k < n; ++k) {
    best = std::min(best, distance(target_future.points[k].pos(),
                                   other_future.points[k].pos()));
  }
  return {closest_distance_bin(best), best, static_cast<int>(n)};
}

/// Class of dir = D_final - D_init: >= +2 m apart -> 0, <= -2 m closing -> 1,
/// otherwise stable -> 2.
[[nodiscard]] inline int direction_bin(double dir) {
  if (dir >= kDirMoveThreshold) return 0;
  if (dir <= -kDirMoveThreshold) return 1;
  return 2;
}

/// Distance trend over the aligned future: first vs last common sample.
[[nodiscard]] inline DirMoveClass direction_class(const Trajectory& target_future,
                                                  const Trajectory& other_future) {
  const std::size_t n = std::min(target_future.size(), other_future.size());
  if (n == 0) {
    throw Error(Errc::kEmptyOverlap, "no aligned future samples");
  }
  const double d_init =
      distance(target_future.points[0].pos(), other_future.points[0].pos());
  const double d_final = distance(target_future.points[n - 1].pos(),
                                  other_future.points[n - 1].pos());
  const double dir = d_final - d_init;
  return {direction_bin(dir), dir};
}

/// Lead/follow/weak label of a retained pair. Each agent's conflict passage
/// time is the t_index of its future sample closest (cross-time) to the
/// other's future; argmin ties take the earliest sample. The context agent
/// leads when it passes first (t1 >= t2, i.e. the target arrives later or
/// simultaneously) and follows otherwise; left-turning targets use the
/// left-turn variants. The label is Weak when the pair never comes within
/// cfg.eps_d, or when lane positions say the agents do not contest the same
/// space (other agent outside a straight target's lane, or in the neighbor
/// lane away from the turn side).
[[nodiscard]] inline InteractionTypeClass interaction_type_label(
    const Scene& scene, const InteractionPair& pair, IntentClass intent,
    const PretextConfig& cfg = {}) {
  const auto target_it = scene.agents.find(pair.target_id);
  const auto other_it = scene.agents.find(pair.other_id);
  if (target_it == scene.agents.end() || other_it == scene.agents.end()) {
    throw Error(Errc::kInvalidArgument,
                "pair references agent missing from scene '" + scene.scene_id + "'");
  }
  const Trajectory& tf = target_it->second.future;
  const Trajectory& of = other_it->second.future;
  if (tf.empty() || of.empty()) {
    throw Error(Errc::kEmptyTrajectory, "interaction type needs both futures");
  }

  InteractionTypeClass out;

  // Conflict geometry: cross-time distance grid over the two futures. Each
  // agent's passage time is the first sample on its own axis whose best
  // cross-distance reaches the global minimum; the two argmins are
  // independent, so ties resolve per axis.
  std::vector<double> row_min(tf.size(), std::numeric_limits<double>::infinity());
  std::vector<double> col_min(of.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < tf.size(); ++i) {
    for (std::size_t j = 0; j < of.size(); ++j) {
      const double d2 = squared_distance(tf.points[i].pos(), of.points[j].pos());
      row_min[i] = std::min(row_min[i], d2);
      col_min[j] = std::min(col_min[j], d2);
    }
  }
  const double best2 = *std::min_element(row_min.begin(), row_min.end());
  const std::size_t bi = static_cast<std::size_t>(
      std::find(row_min.begin(), row_min.end(), best2) - row_min.begin());
  const std::size_t bj = static_cast<std::size_t>(
      std::find(col_min.begin(), col_min.end(), best2) - col_min.begin());
  out.d_i = std::sqrt(best2);
  out.t1 = tf.points[bi].t_index;
  out.t2 = of.points[bj].t_index;

  // Lane separation rules need the agents' present positions; a context
  // agent without past samples is located at its first future sample.
  const Vec2 target_pos = target_it->second.past.empty()
                              ? tf.points.front().pos()
                              : target_it->second.past.points.back().pos();
  const Vec2 other_pos = other_it->second.past.empty()
                             ? of.points.front().pos()
                             : other_it->second.past.points.back().pos();

  bool weak = false;
  const auto target_lane =
      scene.lanes.nearest_lane_within(target_pos, kLaneMembershipLateral);
  if (!target_lane) {
    out.lane_fallback = true;
  } else {
    const Lane& lane = scene.lanes.lanes.at(*target_lane);
    if (intent == IntentClass::kStraight &&
        !scene.lanes.in_lane(other_pos, *target_lane)) {
      weak = true;
    } else if (is_left_turn_intent(intent) && lane.right_neighbor &&
               scene.lanes.in_lane(other_pos, *lane.right_neighbor)) {
      weak = true;
    } else if (is_right_turn_intent(intent) && lane.left_neighbor &&
               scene.lanes.in_lane(other_pos, *lane.left_neighbor)) {
      weak = true;
    }
  }
  if (out.d_i > cfg.eps_d) weak = true;

  if (weak) {
    out.class_id = InteractionType::kWeak;
    return out;
  }
  const bool left = is_left_turn_intent(intent);
  if (out.t1 >= out.t2) {
    out.class_id = left ? InteractionType::kLeftTurnLead : InteractionType::kCloseLead;
  } else {
    out.class_id =
        left ? InteractionType::kLeftTurnFollow : InteractionType::kCloseFollow;
  }
  return out;
}

/// All four pseudo-labels of one retained pair.
[[nodiscard]] inline PretextLabelSet label_pair(const Scene& scene,
                                                const InteractionPair& pair,
                                                IntentClass intent,
                                                const PretextConfig& cfg = {}) {
  if (!pair.retained) {
    throw Error(Errc::kInvalidArgument, "pseudo-labels apply to retained pairs only");
  }
  const auto target_it = scene.agents.find(pair.target_id);
  const auto other_it = scene.agents.find(pair.other_id);
  if (target_it == scene.agents.end() || other_it == scene.agents.end()) {
    throw Error(Errc::kInvalidArgument,
                "pair references agent missing from scene '" + scene.scene_id + "'");
  }
  PretextLabelSet set;
  set.other_id = pair.other_id;
  set.range_gap = range_gap_gt(target_it->second.future, other_it->second.future);
  set.closest =
      closest_distance_class(target_it->second.future, other_it->second.future);
  set.direction =
      direction_class(target_it->second.future, other_it->second.future);
  set.itype = interaction_type_label(scene, pair, intent, cfg);
  return set;
}

}  // namespace trajlab
