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

#include <map>
#include <optional>
#include <string>

#include "trajlab/errors.hpp"
#include "trajlab/geometry.hpp"
#include "trajlab/lane_graph.hpp"
#include "trajlab/trajectory.hpp"

namespace trajlab {

/// Rigid transform from source coordinates into the target-centric frame:
/// apply(q) = R(-rotation) * (q - origin). Stored with each normalized scene
/// so predictions and labels can be mapped back to source coordinates.
struct NormalizationFrame {
  Vec2 origin;
  double rotation = 0.0;        // target heading in the source frame
  bool degenerate = false;      // heading step under kMinHeadingStep; rotation 0

  [[nodiscard]] Vec2 apply(Vec2 q) const { return rotate(q - origin, -rotation); }
  [[nodiscard]] Vec2 invert(Vec2 q) const { return rotate(q, rotation) + origin; }

  [[nodiscard]] bool is_identity(double eps = 1e-12) const {
    return std::abs(origin.x) <= eps && std::abs(origin.y) <= eps &&
           std::abs(wrap_angle(rotation)) <= eps;
  }
};

/// Observed and ground-truth-future segments of one agent.
struct AgentTrack {
  Trajectory past;
  Trajectory future;
};

/// One prediction instance: a designated target agent, its context agents,
/// and the local lane centerlines. Agents are keyed by id in sorted order.
struct Scene {
  std::string scene_id;
  std::string target_id;
  std::map<std::string, AgentTrack> agents;
  LaneGraph lanes;
  std::optional<NormalizationFrame> frame;  // set once normalized

  [[nodiscard]] const AgentTrack& target() const {
    const auto it = agents.find(target_id);
    if (it == agents.end()) {
      throw Error(Errc::kNoTargetAgent,
                  "target '" + target_id + "' missing from scene '" + scene_id + "'");
    }
    return it->second;
  }
};

namespace detail {

inline void transform_trajectory(Trajectory& traj, const NormalizationFrame& f) {
  for (TrajPoint& p : traj.points) {
    const Vec2 q = f.apply(p.pos());
    p.x = q.x;
    p.y = q.y;
  }
}

}  // namespace detail

/// Rewrites the scene into the target-centric frame: origin at the target's
/// present position (t_index 0), x-axis along its present heading (step from
/// t_index -1 to 0). A degenerate heading step keeps rotation 0 and sets the
/// frame's degenerate flag instead of failing. The returned scene stores the
/// frame applied by this call, so a second normalization records ~identity.
[[nodiscard]] inline Scene normalize_scene(const Scene& scene) {
  const AgentTrack& target = scene.target();
  if (target.past.size() < 2) {
    throw Error(Errc::kTrajectoryTooShort,
                "target past has " + std::to_string(target.past.size()) +
                    " samples; normalization needs 2");
  }
  const Vec2 p0 = target.past.points.back().pos();
  const Vec2 p_prev = target.past.points[target.past.size() - 2].pos();
  const Vec2 step = p0 - p_prev;

  NormalizationFrame f;
  f.origin = p0;
  if (norm(step) >= kMinHeadingStep) {
    f.rotation = std::atan2(step.y, step.x);
  } else {
    f.degenerate = true;
  }

  Scene out = scene;
  for (auto& [id, track] : out.agents) {
    detail::transform_trajectory(track.past, f);
    detail::transform_trajectory(track.future, f);
  }
  for (auto& [id, lane] : out.lanes.lanes) {
    for (Vec2& v : lane.centerline) v = f.apply(v);
  }
  out.frame = f;
  return out;
}

}  // namespace trajlab
