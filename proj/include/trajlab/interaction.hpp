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
#include <span>
#include <string>
#include <vector>

#include "trajlab/errors.hpp"
#include "trajlab/geometry.hpp"
#include "trajlab/lane_graph.hpp"
#include "trajlab/scene.hpp"
#include "trajlab/trajectory.hpp"

namespace trajlab {

/// Target maneuver classes used by the interaction rules.
enum class IntentClass {
  kStraight,
  kLaneChange,
  kRightTurn,
  kLeftTurn,
  kRightTurnWaiting,
  kLeftTurnWaiting,
  kOther,
};

[[nodiscard]] constexpr bool is_left_turn_intent(IntentClass c) {
  return c == IntentClass::kLeftTurn || c == IntentClass::kLeftTurnWaiting;
}

[[nodiscard]] constexpr bool is_right_turn_intent(IntentClass c) {
  return c == IntentClass::kRightTurn || c == IntentClass::kRightTurnWaiting;
}

[[nodiscard]] inline const char* to_string(IntentClass c) noexcept {
  switch (c) {
    case IntentClass::kStraight: return "straight";
    case IntentClass::kLaneChange: return "lane_change";
    case IntentClass::kRightTurn: return "right_turn";
    case IntentClass::kLeftTurn: return "left_turn";
    case IntentClass::kRightTurnWaiting: return "right_turn_waiting";
    case IntentClass::kLeftTurnWaiting: return "left_turn_waiting";
    case IntentClass::kOther: return "other";
  }
  return "other";
}

[[nodiscard]] inline IntentClass intent_from_string(const std::string& s) {
  if (s == "straight") return IntentClass::kStraight;
  if (s == "lane_change") return IntentClass::kLaneChange;
  if (s == "right_turn") return IntentClass::kRightTurn;
  if (s == "left_turn") return IntentClass::kLeftTurn;
  if (s == "right_turn_waiting") return IntentClass::kRightTurnWaiting;
  if (s == "left_turn_waiting") return IntentClass::kLeftTurnWaiting;
  if (s == "other") return IntentClass::kOther;
  throw Error(Errc::kMalformedRecord, "unknown intent class '" + s + "'");
}

/// Why a candidate pair ended up retained or dropped.
enum class PairReason {
  kDistancePass,              // close enough, no oncoming conflict
  kFilteredOncoming,          // oncoming and target not turning left: dropped
  kRetainedOncomingLeftTurn,  // oncoming but target turns left: kept
};

[[nodiscard]] inline const char* to_string(PairReason r) noexcept {
  switch (r) {
    case PairReason::kDistancePass: return "distance_pass";
    case PairReason::kFilteredOncoming: return "filtered_oncoming";
    case PairReason::kRetainedOncomingLeftTurn: return "retained_oncoming_left_turn";
  }
  return "distance_pass";
}

[[nodiscard]] inline PairReason pair_reason_from_string(const std::string& s) {
  if (s == "distance_pass") return PairReason::kDistancePass;
  if (s == "filtered_oncoming") return PairReason::kFilteredOncoming;
  if (s == "retained_oncoming_left_turn") return PairReason::kRetainedOncomingLeftTurn;
  throw Error(Errc::kMalformedRecord, "unknown pair reason '" + s + "'");
}

/// One (target, other) candidate with its filter outcome.
struct InteractionPair {
  std::string target_id;
  std::string other_id;
  double d_min = 0.0;   // cross-time future-future minimum distance
  bool oncoming = false;
  bool retained = false;
  PairReason reason = PairReason::kDistancePass;
};

/// Thresholds of the labeling rules. Defaults follow the curation recipe:
/// 5 m interaction radius, 10-sample minimum track, 120 deg oncoming cone,
/// 30 deg turn threshold, 0.5 m/s waiting speed, 1.5 m lane-change offset.
struct LabelConfig {
  double d_th = 5.0;
  int min_traj_len = 10;
  double oncoming_angle = 2.0 * kPi / 3.0;
  double turn_heading_delta = kPi / 6.0;
  double waiting_speed = 0.5;
  double lane_change_lateral = 1.5;

  void validate() const {
    if (!(d_th > 0.0) || min_traj_len < 2 || !(oncoming_angle > 0.0) ||
        !(oncoming_angle <= kPi) || !(turn_heading_delta > 0.0) ||
        !(waiting_speed >= 0.0) || !(lane_change_lateral > 0.0)) {
      throw Error(Errc::kInvalidArgument, "label config out of range");
    }
  }
};

/// Minimum distance between any sample of a and any sample of b, across
/// time (all (t1, t2) combinations, not only aligned ones).
[[nodiscard]] inline double min_pairwise_distance(const Trajectory& a,
                                                  const Trajectory& b) {
  if (a.empty() || b.empty()) {
    throw Error(Errc::kEmptyTrajectory, "min_pairwise_distance on empty trajectory");
  }
  double best2 = squared_distance(a.points[0].pos(), b.points[0].pos());
  for (const TrajPoint& pa : a.points) {
    for (const TrajPoint& pb : b.points) {
      const double d2 = squared_distance(pa.pos(), pb.pos());
      if (d2 < best2) best2 = d2;
    }
  }
  return std::sqrt(best2);
}

namespace detail {

/// Minimum net displacement for a trustworthy windowed heading estimate.
inline constexpr double kHeadingMinDisplacement = 0.5;
/// Preferred chord length for the approach directions of the oncoming test.
/// Longer chords keep per-sample noise out of the angle for fast agents.
inline constexpr double kOncomingChordDisplacement = 2.0;
/// Net-travel floor for a fallback approach direction. A past that never
/// covers this much ground is position jitter with no usable direction.
inline constexpr double kOncomingJitterFloor = 0.3;
/// Preferred start-window length for the lane-change lateral baseline.
inline constexpr double kLateralBaselineDisplacement = 5.0;
/// Chord stride (samples) for noise-robust mean speed.
inline constexpr int kSpeedChordStride = 10;
/// Boxcar half-width (samples) applied before geometric estimates.
inline constexpr int kIntentSmoothRadius = 2;

/// Centered moving average with clamped edges. Suppresses per-sample
/// measurement noise without displacing gentle arcs measurably.
[[nodiscard]] inline std::vector<TrajPoint> smooth_track(
    std::span<const TrajPoint> pts, int radius = kIntentSmoothRadius) {
  std::vector<TrajPoint> out(pts.begin(), pts.end());
  const long n = static_cast<long>(pts.size());
  for (long i = 0; i < n; ++i) {
    const long lo = std::max(0L, i - radius);
    const long hi = std::min(n - 1, i + radius);
    Vec2 acc{0.0, 0.0};
    for (long j = lo; j <= hi; ++j) acc = acc + pts[j].pos();
    const double inv = 1.0 / static_cast<double>(hi - lo + 1);
    out[static_cast<std::size_t>(i)].x = acc.x * inv;
    out[static_cast<std::size_t>(i)].y = acc.y * inv;
  }
  return out;
}

struct WindowHeading {
  double angle = 0.0;
  bool reliable = false;
};

/// Travel direction near the start of the track: the shortest prefix whose
/// net displacement reaches min_disp. Unreliable when none does.
[[nodiscard]] inline WindowHeading heading_from_start(
    std::span<const TrajPoint> pts, double min_disp = kHeadingMinDisplacement) {
  WindowHeading h;
  for (std::size_t w = 1; w < pts.size(); ++w) {
    const Vec2 d = pts[w].pos() - pts[0].pos();
    if (norm(d) >= min_disp) {
      return {std::atan2(d.y, d.x), true};
    }
    h.angle = std::atan2(d.y, d.x);
  }
  return h;
}

[[nodiscard]] inline WindowHeading heading_from_end(
    std::span<const TrajPoint> pts, double min_disp = kHeadingMinDisplacement) {
  WindowHeading h;
  const std::size_t n = pts.size();
  for (std::size_t w = 1; w < n; ++w) {
    const Vec2 d = pts[n - 1].pos() - pts[n - 1 - w].pos();
    if (norm(d) >= min_disp) {
      return {std::atan2(d.y, d.x), true};
    }
    h.angle = std::atan2(d.y, d.x);
  }
  return h;
}

/// Direction of the most recent travel: the shortest end-anchored window
/// covering kOncomingChordDisplacement, else the longest window the track
/// offers. A crawling agent thus still reports its drift direction, while
/// anything under kOncomingJitterFloor of net travel stays unreliable.
[[nodiscard]] inline WindowHeading approach_heading(
    std::span<const TrajPoint> pts) {
  WindowHeading h;
  double best = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t w = 1; w < n; ++w) {
    const Vec2 d = pts[n - 1].pos() - pts[n - 1 - w].pos();
    const double len = norm(d);
    if (len >= kOncomingChordDisplacement) {
      return {std::atan2(d.y, d.x), true};
    }
    if (len > best) {
      best = len;
      h.angle = std::atan2(d.y, d.x);
    }
  }
  h.reliable = best >= kOncomingJitterFloor;
  return h;
}

/// Mean speed from chord lengths at a coarse stride. Chords suppress the
/// per-step measurement noise that inflates polyline length on slow tracks.
[[nodiscard]] inline double chord_mean_speed(std::span<const TrajPoint> pts,
                                             double dt = kSampleDt,
                                             int stride = kSpeedChordStride) {
  if (pts.size() < 2) return 0.0;
  double length = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t k = 0; k < n - 1; k += static_cast<std::size_t>(stride)) {
    const std::size_t j = std::min(k + static_cast<std::size_t>(stride), n - 1);
    length += distance(pts[k].pos(), pts[j].pos());
  }
  return length / (static_cast<double>(n - 1) * dt);
}

/// Max |cross-track offset| of the points from the line through origin with
/// the given direction.
[[nodiscard]] inline double max_line_offset(std::span<const TrajPoint> pts,
                                            Vec2 origin, double angle) {
  const Vec2 u{std::cos(angle), std::sin(angle)};
  double worst = 0.0;
  for (const TrajPoint& p : pts) {
    worst = std::max(worst, std::abs(cross(u, p.pos() - origin)));
  }
  return worst;
}

/// Max distance of the points from a lane centerline.
[[nodiscard]] inline double max_lane_offset(std::span<const TrajPoint> pts,
                                            const Lane& lane) {
  double worst = 0.0;
  for (const TrajPoint& p : pts) {
    worst = std::max(worst, point_polyline_distance(p.pos(), lane.centerline));
  }
  return worst;
}

}  // namespace detail

/// Classifies the target maneuver over its full past+future track.
/// Rules, in order: net heading change beyond turn_heading_delta picks the
/// turn side (with the *Waiting variant under waiting_speed); otherwise a
/// lateral offset beyond lane_change_lateral is LaneChange; otherwise
/// Straight. Tracks too short to estimate a direction fall back to Other.
[[nodiscard]] inline IntentClass classify_intent(const Trajectory& past,
                                                 const Trajectory& future,
                                                 const LaneGraph& lanes,
                                                 const LabelConfig& cfg) {
  cfg.validate();
  std::vector<TrajPoint> raw;
  raw.reserve(past.size() + future.size());
  raw.insert(raw.end(), past.points.begin(), past.points.end());
  raw.insert(raw.end(), future.points.begin(), future.points.end());
  if (static_cast<int>(raw.size()) < cfg.min_traj_len) {
    throw Error(Errc::kTrajectoryTooShort,
                "intent needs >= " + std::to_string(cfg.min_traj_len) +
                    " samples, got " + std::to_string(raw.size()));
  }
  const std::vector<TrajPoint> track = detail::smooth_track(raw);

  const auto start = detail::heading_from_start(track);
  const auto end = detail::heading_from_end(track);
  if (!start.reliable || !end.reliable) return IntentClass::kOther;

  const double speed = detail::chord_mean_speed(track);
  const double dtheta = wrap_angle(end.angle - start.angle);
  const bool waiting = speed < cfg.waiting_speed;
  if (dtheta >= cfg.turn_heading_delta) {
    return waiting ? IntentClass::kLeftTurnWaiting : IntentClass::kLeftTurn;
  }
  if (dtheta <= -cfg.turn_heading_delta) {
    return waiting ? IntentClass::kRightTurnWaiting : IntentClass::kRightTurn;
  }

  // Offset from the initial-heading line, tightened by the offset from the
  // lane occupied at track start when one exists. Taking the min keeps
  // curved roads (small lane offset) and lane polylines that end early
  // (small line offset) from reading as lane changes; a real lane change is
  // large under both measures. The line direction wants a longer window than
  // the turn test: hung on a half-meter chord, sample noise can tilt a 40 m
  // line enough to hide a real lane shift.
  auto base = detail::heading_from_start(track, detail::kLateralBaselineDisplacement);
  if (!base.reliable) base = start;
  double lateral = detail::max_line_offset(track, track.front().pos(), base.angle);
  if (const auto lane_id =
          lanes.nearest_lane_within(track.front().pos(), kLaneMembershipLateral)) {
    lateral = std::min(lateral,
                       detail::max_lane_offset(track, lanes.lanes.at(*lane_id)));
  }
  if (lateral > cfg.lane_change_lateral) return IntentClass::kLaneChange;
  return IntentClass::kStraight;
}

/// True when the two agents' approach directions oppose by more than
/// cfg.oncoming_angle (strict). Directions come from approach_heading over
/// each past; an agent without a usable direction opposes nobody.
[[nodiscard]] inline bool is_oncoming(const Trajectory& target_past,
                                      const Trajectory& other_past,
                                      const LabelConfig& cfg) {
  const auto ht = detail::approach_heading(target_past.points);
  const auto ho = detail::approach_heading(other_past.points);
  if (!ht.reliable || !ho.reliable) return false;
  return abs_angle_diff(ht.angle, ho.angle) > cfg.oncoming_angle;
}

/// Selects the interaction-relevant agents of a scene. For every context
/// agent with a usable future, the pair enters the candidate set when the
/// cross-time future distance to the target is under cfg.d_th; oncoming
/// candidates survive only when the target intent is a left turn. Pairs are
/// returned sorted by other_id; dropped oncoming pairs stay in the list with
/// retained=false. An undersized target track yields no pairs.
[[nodiscard]] inline std::vector<InteractionPair> label_interactions(
    const Scene& scene, const LabelConfig& cfg) {
  cfg.validate();
  const AgentTrack& target = scene.target();
  std::vector<InteractionPair> pairs;
  if (static_cast<int>(target.past.size() + target.future.size()) <
          cfg.min_traj_len ||
      target.future.empty()) {
    return pairs;
  }
  const IntentClass intent =
      classify_intent(target.past, target.future, scene.lanes, cfg);
  const bool left_turning = is_left_turn_intent(intent);

  for (const auto& [id, track] : scene.agents) {
    if (id == scene.target_id) continue;
    if (static_cast<int>(track.future.size()) < cfg.min_traj_len) continue;
    const double d = min_pairwise_distance(target.future, track.future);
    if (!(d < cfg.d_th)) continue;

    const bool oncoming = is_oncoming(target.past, track.past, cfg);

    InteractionPair pair;
    pair.target_id = scene.target_id;
    pair.other_id = id;
    pair.d_min = d;
    pair.oncoming = oncoming;
    if (!oncoming) {
      pair.retained = true;
      pair.reason = PairReason::kDistancePass;
    } else if (left_turning) {
      pair.retained = true;
      pair.reason = PairReason::kRetainedOncomingLeftTurn;
    } else {
      pair.retained = false;
      pair.reason = PairReason::kFilteredOncoming;
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace trajlab
