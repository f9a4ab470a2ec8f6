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
#include <vector>

#include "trajlab/errors.hpp"
#include "trajlab/geometry.hpp"

namespace trajlab {

/// An agent sits "in" a lane when its position is within this lateral
/// distance of the lane centerline.
inline constexpr double kLaneMembershipLateral = 2.0;

struct Lane {
  std::string id;
  std::vector<Vec2> centerline;  // >= 2 vertices, ordered along travel direction
  std::optional<std::string> left_neighbor;
  std::optional<std::string> right_neighbor;
};

/// Centerline map keyed by lane id. std::map keeps iteration (and therefore
/// every derived tie-break and output order) deterministic.
struct LaneGraph {
  std::map<std::string, Lane> lanes;

  [[nodiscard]] bool empty() const noexcept { return lanes.empty(); }

  void validate() const {
    for (const auto& [id, lane] : lanes) {
      if (lane.id != id) {
        throw Error(Errc::kMalformedRecord, "lane key mismatch for '" + id + "'");
      }
      if (lane.centerline.size() < 2) {
        throw Error(Errc::kMalformedRecord,
                    "lane '" + id + "' centerline has fewer than 2 vertices");
      }
      for (const auto& nbr : {lane.left_neighbor, lane.right_neighbor}) {
        if (nbr && lanes.find(*nbr) == lanes.end()) {
          throw Error(Errc::kMalformedRecord,
                      "lane '" + id + "' references unknown neighbor '" + *nbr + "'");
        }
      }
    }
  }

  [[nodiscard]] double distance_to(const std::string& lane_id, Vec2 p) const {
    const auto it = lanes.find(lane_id);
    if (it == lanes.end()) {
      throw Error(Errc::kInvalidArgument, "unknown lane '" + lane_id + "'");
    }
    return point_polyline_distance(p, it->second.centerline);
  }

  /// Nearest lane whose centerline lies within max_lateral of p. Distance
  /// ties resolve to the lexicographically smallest lane id.
  [[nodiscard]] std::optional<std::string> nearest_lane_within(
      Vec2 p, double max_lateral) const {
    std::optional<std::string> best;
    double best_d = max_lateral;
    for (const auto& [id, lane] : lanes) {
      const double d = point_polyline_distance(p, lane.centerline);
      if (d < best_d || (!best && d <= best_d)) {
        best = id;
        best_d = d;
      }
    }
    return best;
  }

  [[nodiscard]] bool in_lane(Vec2 p, const std::string& lane_id,
                             double max_lateral = kLaneMembershipLateral) const {
    return distance_to(lane_id, p) <= max_lateral;
  }
};

}  // namespace trajlab
