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

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "trajlab/errors.hpp"
#include "trajlab/geometry.hpp"

namespace trajlab {

/// Sampling convention: 10 Hz, 20 past samples (t_index -19..0, 0 = present),
/// 30 future samples (t_index 1..30).
inline constexpr int kSampleRateHz = 10;
inline constexpr double kSampleDt = 0.1;
inline constexpr int kPastLen = 20;
inline constexpr int kFutureLen = 30;

/// Steps shorter than this are treated as stationary for heading purposes.
inline constexpr double kMinHeadingStep = 1e-6;

enum class TrajKind { kPast, kFuture };

struct TrajPoint {
  double x = 0.0;
  double y = 0.0;
  int t_index = 0;

  [[nodiscard]] constexpr Vec2 pos() const { return {x, y}; }
  friend constexpr bool operator==(const TrajPoint&, const TrajPoint&) = default;
};

/// A single agent's sampled track segment. Points are contiguous in t_index.
struct Trajectory {
  std::string agent_id;
  TrajKind kind = TrajKind::kPast;
  std::vector<TrajPoint> points;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] bool empty() const noexcept { return points.empty(); }

  /// Point at the given time index, or nullptr when absent.
  [[nodiscard]] const TrajPoint* at_time(int t_index) const noexcept {
    if (points.empty()) return nullptr;
    const long offset = static_cast<long>(t_index) - points.front().t_index;
    if (offset < 0 || offset >= static_cast<long>(points.size())) return nullptr;
    return &points[static_cast<std::size_t>(offset)];
  }
};

/// Checks the trajectory invariants: finite coordinates and t_index
/// contiguous (strictly increasing by exactly 1).
inline void validate_trajectory(const Trajectory& traj) {
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    const TrajPoint& p = traj.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(Errc::kMalformedRecord,
                  "non-finite coordinate in trajectory '" + traj.agent_id + "'");
    }
    if (i > 0 && p.t_index != traj.points[i - 1].t_index + 1) {
      throw Error(Errc::kMalformedRecord,
                  "non-contiguous t_index in trajectory '" + traj.agent_id + "'");
    }
  }
}

/// Consecutive position deltas; size() - 1 entries.
struct DisplacementSeq {
  std::vector<Vec2> deltas;
};

[[nodiscard]] inline DisplacementSeq to_displacements(const Trajectory& traj) {
  if (traj.empty()) {
    throw Error(Errc::kEmptyTrajectory, "to_displacements on empty trajectory");
  }
  DisplacementSeq seq;
  seq.deltas.reserve(traj.size() - 1);
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    seq.deltas.push_back(traj.points[i + 1].pos() - traj.points[i].pos());
  }
  return seq;
}

/// Heading (radians, atan2 convention) at the given time index, taken from
/// the most recent step of length >= kMinHeadingStep ending at or before it.
/// Throws AllStationary when every preceding step is degenerate.
[[nodiscard]] inline double heading_at(const Trajectory& traj, int t_index) {
  if (traj.empty()) {
    throw Error(Errc::kEmptyTrajectory, "heading_at on empty trajectory");
  }
  const TrajPoint* at = traj.at_time(t_index);
  if (at == nullptr) {
    throw Error(Errc::kInvalidArgument,
                "t_index " + std::to_string(t_index) + " not in trajectory '" +
                    traj.agent_id + "'");
  }
  const std::size_t pos =
      static_cast<std::size_t>(t_index - traj.points.front().t_index);
  if (pos == 0) {
    throw Error(Errc::kTrajectoryTooShort,
                "no step precedes t_index " + std::to_string(t_index));
  }
  for (std::size_t j = pos; j >= 1; --j) {
    const Vec2 step = traj.points[j].pos() - traj.points[j - 1].pos();
    if (norm(step) >= kMinHeadingStep) return std::atan2(step.y, step.x);
  }
  throw Error(Errc::kAllStationary,
              "no non-degenerate step before t_index " + std::to_string(t_index));
}

}  // namespace trajlab
