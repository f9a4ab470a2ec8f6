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
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "trajlab/errors.hpp"
#include "trajlab/geometry.hpp"
#include "trajlab/interaction.hpp"
#include "trajlab/lane_graph.hpp"
#include "trajlab/pretext.hpp"
#include "trajlab/rng.hpp"
#include "trajlab/scene.hpp"
#include "trajlab/trajectory.hpp"

namespace trajlab {

/// Scene archetypes. Every archetype's construction keeps >= 0.5 m of
/// distance margin and >= 5 samples of arrival-order margin against the
/// default noise, so the bundled ground-truth annotation is noise-proof.
enum class ScenarioKind {
  kLeadFollow,            // same-lane leader or follower
  kLeftTurnOncoming,      // left turn (or waiting creep) across oncoming traffic
  kStraightWithOncoming,  // parallel oncoming agent that must be filtered
  kCrossing,              // perpendicular conflict, weakly interacting
  kLaneChange,            // merge ahead of or behind an agent in the next lane
  kNonInteractive,        // all context agents far away
};

inline constexpr int kNumScenarioKinds = 6;

[[nodiscard]] inline const char* to_string(ScenarioKind k) noexcept {
  switch (k) {
    case ScenarioKind::kLeadFollow: return "lead_follow";
    case ScenarioKind::kLeftTurnOncoming: return "left_turn_oncoming";
    case ScenarioKind::kStraightWithOncoming: return "straight_with_oncoming";
    case ScenarioKind::kCrossing: return "crossing";
    case ScenarioKind::kLaneChange: return "lane_change";
    case ScenarioKind::kNonInteractive: return "non_interactive";
  }
  return "non_interactive";
}

[[nodiscard]] inline ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "lead_follow") return ScenarioKind::kLeadFollow;
  if (s == "left_turn_oncoming") return ScenarioKind::kLeftTurnOncoming;
  if (s == "straight_with_oncoming") return ScenarioKind::kStraightWithOncoming;
  if (s == "crossing") return ScenarioKind::kCrossing;
  if (s == "lane_change") return ScenarioKind::kLaneChange;
  if (s == "non_interactive") return ScenarioKind::kNonInteractive;
  throw Error(Errc::kInvalidSpec, "unknown scenario kind '" + s + "'");
}

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kNonInteractive;
  std::uint64_t seed = 0;
  double noise_sigma = 0.05;
  int n_bystanders = 0;
  std::string scene_id;  // empty: derived from the seed

  void validate() const {
    if (noise_sigma < 0.0 || !std::isfinite(noise_sigma)) {
      throw Error(Errc::kInvalidSpec, "noise_sigma must be finite and >= 0");
    }
    if (n_bystanders < 0 || n_bystanders > 8) {
      throw Error(Errc::kInvalidSpec, "n_bystanders must be in [0, 8]");
    }
  }
};

/// Ground-truth labels the generator guarantees for its scene.
struct OracleAnnotation {
  std::string scene_id;
  ScenarioKind kind = ScenarioKind::kNonInteractive;
  IntentClass intent = IntentClass::kStraight;
  std::vector<std::string> retained;            // sorted other ids
  std::vector<std::string> filtered_oncoming;   // sorted other ids
  std::map<std::string, InteractionType> itype; // per retained other
};

struct GeneratedScene {
  Scene scene;
  OracleAnnotation oracle;
};

namespace detail {

using PathFn = std::function<Vec2(double)>;  // seconds -> position

[[nodiscard]] inline PathFn straight_path(Vec2 origin, double angle, double speed) {
  const Vec2 u{std::cos(angle), std::sin(angle)};
  return [=](double t) { return origin + (speed * t) * u; };
}

/// +x approach, quarter turn of the given radius starting at x = entry_x,
/// then straight along the exit direction. Position (0,0) at t = 0.
/// left=false mirrors the turn to the right.
[[nodiscard]] inline PathFn turn_path(double entry_x, double radius, double speed,
                                      bool left) {
  const double quarter = radius * kPi / 2.0;
  return [=](double t) -> Vec2 {
    const double s = speed * t;
    double x = 0.0;
    double y = 0.0;
    if (s <= entry_x) {
      x = s;
    } else if (s <= entry_x + quarter) {
      const double phi = (s - entry_x) / radius;
      x = entry_x + radius * std::sin(phi);
      y = radius * (1.0 - std::cos(phi));
    } else {
      x = entry_x + radius;
      y = radius + (s - entry_x - quarter);
    }
    return left ? Vec2{x, y} : Vec2{x, -y};
  };
}

/// Immediate constant-curvature left arc through (0,0) heading +x at t = 0.
[[nodiscard]] inline PathFn creep_arc_path(double radius, double speed) {
  return [=](double t) -> Vec2 {
    const double phi = speed * t / radius;
    return {radius * std::sin(phi), radius * (1.0 - std::cos(phi))};
  };
}

/// +x travel with a smoothstep lateral shift of dy between t_start and t_end.
[[nodiscard]] inline PathFn lane_change_path(double speed, double dy,
                                             double t_start, double t_end) {
  return [=](double t) -> Vec2 {
    double u = (t - t_start) / (t_end - t_start);
    u = std::clamp(u, 0.0, 1.0);
    const double blend = u * u * (3.0 - 2.0 * u);
    return {speed * t, dy * blend};
  };
}

/// Samples a path at 10 Hz into past (t_index -19..0) and future (1..30),
/// adding iid coordinate noise from the given stream.
inline AgentTrack sample_track(const std::string& agent_id, const PathFn& path,
                               double sigma, Xoshiro256pp& noise) {
  AgentTrack track;
  track.past.agent_id = agent_id;
  track.past.kind = TrajKind::kPast;
  track.future.agent_id = agent_id;
  track.future.kind = TrajKind::kFuture;
  for (int t = -(kPastLen - 1); t <= kFutureLen; ++t) {
    Vec2 q = path(static_cast<double>(t) * kSampleDt);
    q.x += sigma * noise.approx_normal();
    q.y += sigma * noise.approx_normal();
    TrajPoint p{q.x, q.y, t};
    if (t <= 0) {
      track.past.points.push_back(p);
    } else {
      track.future.points.push_back(p);
    }
  }
  return track;
}

inline Lane make_lane(std::string id, std::vector<Vec2> centerline) {
  Lane lane;
  lane.id = std::move(id);
  lane.centerline = std::move(centerline);
  return lane;
}

/// Noiseless future sample index (1-based t_index) where the path comes
/// closest to the given point; used to place conflicts while constructing.
[[nodiscard]] inline int closest_future_sample(const PathFn& path, Vec2 point) {
  int best_t = 1;
  double best = squared_distance(path(kSampleDt), point);
  for (int t = 2; t <= kFutureLen; ++t) {
    const double d = squared_distance(path(t * kSampleDt), point);
    if (d < best) {
      best = d;
      best_t = t;
    }
  }
  return best_t;
}

struct SceneBuilder {
  Scene scene;
  OracleAnnotation oracle;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  int next_noise_stream = 100;

  void add_agent(const std::string& id, const PathFn& path) {
    Xoshiro256pp noise(derive_stream(seed, static_cast<std::uint64_t>(
                                               next_noise_stream++)));
    scene.agents[id] = sample_track(id, path, sigma, noise);
  }

  /// Far parallel traffic south of the scene. The south side is safe for
  /// every archetype: no target path dips below y ~ -3.5.
  void add_bystanders(int count, Xoshiro256pp& rng) {
    for (int b = 0; b < count; ++b) {
      const double y = -rng.uniform(14.0, 20.0);
      const double speed = rng.uniform(5.0, 12.0);
      const double x0 = rng.uniform(-20.0, 20.0);
      add_agent("bst_" + std::to_string(b + 1),
                straight_path({x0, y}, 0.0, speed));
    }
  }
};

}  // namespace detail

/// Deterministically builds one scene plus the annotation its construction
/// guarantees. Same spec, same bytes, on any platform.
[[nodiscard]] inline GeneratedScene generate(const ScenarioSpec& spec) {
  spec.validate();
  Xoshiro256pp rng(derive_stream(spec.seed, 0));

  detail::SceneBuilder b;
  b.sigma = spec.noise_sigma;
  b.seed = spec.seed;
  b.scene.scene_id = spec.scene_id.empty()
                         ? "scene_" + std::to_string(spec.seed)
                         : spec.scene_id;
  b.scene.target_id = "target";
  b.oracle.scene_id = b.scene.scene_id;
  b.oracle.kind = spec.kind;

  switch (spec.kind) {
    case ScenarioKind::kLeadFollow: {
      const double v = rng.uniform(8.0, 12.0);
      const double gap = rng.uniform(6.0, 9.0);
      const bool lead = rng.coin();
      b.add_agent("target", detail::straight_path({0.0, 0.0}, 0.0, v));
      b.add_agent("veh_1", detail::straight_path({lead ? gap : -gap, 0.0}, 0.0, v));
      b.scene.lanes.lanes["lane_main"] =
          detail::make_lane("lane_main", {{-60.0, 0.0}, {60.0, 0.0}});
      b.oracle.intent = IntentClass::kStraight;
      b.oracle.retained = {"veh_1"};
      b.oracle.itype["veh_1"] =
          lead ? InteractionType::kCloseLead : InteractionType::kCloseFollow;
      break;
    }

    case ScenarioKind::kLeftTurnOncoming: {
      const bool waiting = rng.coin();
      const bool lead = waiting ? true : rng.coin();
      const double lane_y = 3.5;
      detail::PathFn target_path;
      double entry_x = 2.0;
      int t1c = 0;  // target future sample nearest the conflict point
      double conflict_x = 0.0;

      if (!waiting) {
        const double v = rng.uniform(5.0, 8.0);
        const double r = rng.uniform(5.0, 7.0);
        entry_x = rng.uniform(2.0, 4.0);
        target_path = detail::turn_path(entry_x, r, v, /*left=*/true);
        // Conflict: where the turn crosses the oncoming lane's y.
        const double phi_c = std::acos(1.0 - lane_y / r);
        conflict_x = entry_x + r * std::sin(phi_c);
        t1c = detail::closest_future_sample(target_path, {conflict_x, lane_y});
      } else {
        const double v = rng.uniform(0.32, 0.37);
        const double r = rng.uniform(0.72, 0.86);
        target_path = detail::creep_arc_path(r, v);
        conflict_x = 0.6;
        t1c = 0;  // unused: the creep never reaches the lane
      }

      int t2c = 0;
      if (!waiting) {
        const int delta = 6 + static_cast<int>(rng.uniform_int(4));  // 6..9
        t2c = lead ? t1c - delta : std::min(t1c + delta, 29);
      } else {
        t2c = 4 + static_cast<int>(rng.uniform_int(13));  // 4..16
      }
      const double v_on = rng.uniform(6.0, 9.0);
      const double x_at_t0 = conflict_x + v_on * (static_cast<double>(t2c) * kSampleDt);
      b.add_agent("target", target_path);
      b.add_agent("veh_1", detail::straight_path({x_at_t0, lane_y}, kPi, v_on));

      b.scene.lanes.lanes["lane_approach"] =
          detail::make_lane("lane_approach", {{-60.0, 0.0}, {entry_x, 0.0}});
      b.scene.lanes.lanes["lane_approach"].left_neighbor = "lane_oncoming";
      b.scene.lanes.lanes["lane_oncoming"] =
          detail::make_lane("lane_oncoming", {{60.0, lane_y}, {-60.0, lane_y}});
      b.scene.lanes.lanes["lane_oncoming"].left_neighbor = "lane_approach";

      b.oracle.intent =
          waiting ? IntentClass::kLeftTurnWaiting : IntentClass::kLeftTurn;
      b.oracle.retained = {"veh_1"};
      b.oracle.itype["veh_1"] = lead ? InteractionType::kLeftTurnLead
                                     : InteractionType::kLeftTurnFollow;
      break;
    }

    case ScenarioKind::kStraightWithOncoming: {
      const double v = rng.uniform(8.0, 12.0);
      const double v_on = rng.uniform(6.0, 9.0);
      const double x0 = rng.uniform(8.0, 14.0);
      b.add_agent("target", detail::straight_path({0.0, 0.0}, 0.0, v));
      b.add_agent("veh_1", detail::straight_path({x0, 3.5}, kPi, v_on));
      b.scene.lanes.lanes["lane_main"] =
          detail::make_lane("lane_main", {{-60.0, 0.0}, {60.0, 0.0}});
      b.scene.lanes.lanes["lane_main"].left_neighbor = "lane_oncoming";
      b.scene.lanes.lanes["lane_oncoming"] =
          detail::make_lane("lane_oncoming", {{60.0, 3.5}, {-60.0, 3.5}});
      b.scene.lanes.lanes["lane_oncoming"].left_neighbor = "lane_main";
      b.oracle.intent = IntentClass::kStraight;
      b.oracle.filtered_oncoming = {"veh_1"};
      break;
    }

    case ScenarioKind::kCrossing: {
      const double v = rng.uniform(8.0, 12.0);
      const int delta = 6 + static_cast<int>(rng.uniform_int(4));  // 6..9
      const bool lead = rng.coin();
      // Keep the crosser's present position >= 3 m outside the target lane
      // and the conflict inside both futures.
      const int t1c = lead ? delta + 5 + static_cast<int>(rng.uniform_int(
                                             static_cast<std::uint64_t>(
                                                 20 - (delta + 5) + 1)))
                           : 8 + static_cast<int>(rng.uniform_int(13));
      const int t2c = lead ? t1c - delta : t1c + delta;
      const double x_c = v * kSampleDt * static_cast<double>(t1c);
      const double v_c = rng.uniform(6.0, 9.0);
      const double dir = rng.coin() ? 1.0 : -1.0;
      b.add_agent("target", detail::straight_path({0.0, 0.0}, 0.0, v));
      b.add_agent(
          "veh_1",
          [=](double t) -> Vec2 {
            return {x_c, dir * v_c * (t - static_cast<double>(t2c) * kSampleDt)};
          });
      b.scene.lanes.lanes["lane_main"] =
          detail::make_lane("lane_main", {{-60.0, 0.0}, {60.0, 0.0}});
      b.scene.lanes.lanes["lane_cross"] = detail::make_lane(
          "lane_cross", {{x_c, -60.0 * dir}, {x_c, 60.0 * dir}});
      b.oracle.intent = IntentClass::kStraight;
      b.oracle.retained = {"veh_1"};
      b.oracle.itype["veh_1"] = InteractionType::kWeak;
      break;
    }

    case ScenarioKind::kLaneChange: {
      const double v = rng.uniform(8.0, 11.0);
      const bool to_left = rng.coin();
      const bool lead = rng.coin();
      const double dy = to_left ? 3.5 : -3.5;
      const double gap = rng.uniform(0.6, 0.9) * v;
      b.add_agent("target", detail::lane_change_path(v, dy, 0.3, 1.5));
      b.add_agent("veh_1",
                  detail::straight_path({lead ? gap : -gap, dy}, 0.0, v));
      b.scene.lanes.lanes["lane_src"] =
          detail::make_lane("lane_src", {{-60.0, 0.0}, {60.0, 0.0}});
      b.scene.lanes.lanes["lane_dst"] =
          detail::make_lane("lane_dst", {{-60.0, dy}, {60.0, dy}});
      if (to_left) {
        b.scene.lanes.lanes["lane_src"].left_neighbor = "lane_dst";
        b.scene.lanes.lanes["lane_dst"].right_neighbor = "lane_src";
      } else {
        b.scene.lanes.lanes["lane_src"].right_neighbor = "lane_dst";
        b.scene.lanes.lanes["lane_dst"].left_neighbor = "lane_src";
      }
      b.oracle.intent = IntentClass::kLaneChange;
      b.oracle.retained = {"veh_1"};
      b.oracle.itype["veh_1"] =
          lead ? InteractionType::kCloseLead : InteractionType::kCloseFollow;
      break;
    }

    case ScenarioKind::kNonInteractive: {
      const double v = rng.uniform(8.0, 12.0);
      b.add_agent("target", detail::straight_path({0.0, 0.0}, 0.0, v));
      const int n_far = 1 + static_cast<int>(rng.uniform_int(2));
      for (int i = 0; i < n_far; ++i) {
        const double y = -rng.uniform(14.0, 20.0);
        const double speed = rng.uniform(5.0, 12.0);
        const double x0 = rng.uniform(-20.0, 20.0);
        b.add_agent("veh_" + std::to_string(i + 1),
                    detail::straight_path({x0, y}, 0.0, speed));
      }
      b.scene.lanes.lanes["lane_main"] =
          detail::make_lane("lane_main", {{-60.0, 0.0}, {60.0, 0.0}});
      b.oracle.intent = IntentClass::kStraight;
      break;
    }
  }

  b.add_bystanders(spec.n_bystanders, rng);
  return {std::move(b.scene), std::move(b.oracle)};
}

/// Spec of suite entry i: archetype i%6, an independent substream seed, and
/// a zero-padded suite index as the scene id.
[[nodiscard]] inline ScenarioSpec suite_spec(int i, std::uint64_t master_seed,
                                             double noise_sigma = 0.05) {
  static constexpr ScenarioKind kinds[kNumScenarioKinds] = {
      ScenarioKind::kLeadFollow,           ScenarioKind::kLeftTurnOncoming,
      ScenarioKind::kStraightWithOncoming, ScenarioKind::kCrossing,
      ScenarioKind::kLaneChange,           ScenarioKind::kNonInteractive,
  };
  ScenarioSpec spec;
  spec.kind = kinds[i % kNumScenarioKinds];
  spec.seed = derive_stream(master_seed, static_cast<std::uint64_t>(i));
  spec.noise_sigma = noise_sigma;
  spec.n_bystanders = static_cast<int>(derive_stream(spec.seed, 7) % 3);  // 0..2
  char id[16];
  std::snprintf(id, sizeof(id), "s%06d", i);
  spec.scene_id = id;
  return spec;
}

/// n scenes stratified over the six archetypes.
[[nodiscard]] inline std::vector<GeneratedScene> generate_suite(
    int n, std::uint64_t master_seed, double noise_sigma = 0.05) {
  if (n < 0) throw Error(Errc::kInvalidSpec, "suite size must be >= 0");
  std::vector<GeneratedScene> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back(generate(suite_spec(i, master_seed, noise_sigma)));
  }
  return out;
}

}  // namespace trajlab
