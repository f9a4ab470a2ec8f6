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
#include <cstdio>
#include <string>

#include "trajlab/scene.hpp"

namespace trajlab {

/// Renders a scene to a standalone SVG: lanes gray, context agents blue
/// (solid past, dashed future), target red. Output is byte-deterministic.
[[nodiscard]] inline std::string render_scene_svg(const Scene& scene) {
  double min_x = 0.0, min_y = 0.0, max_x = 1.0, max_y = 1.0;
  bool first = true;
  const auto grow = [&](Vec2 q) {
    if (first) {
      min_x = max_x = q.x;
      min_y = max_y = q.y;
      first = false;
      return;
    }
    min_x = std::min(min_x, q.x);
    max_x = std::max(max_x, q.x);
    min_y = std::min(min_y, q.y);
    max_y = std::max(max_y, q.y);
  };
  for (const auto& [id, track] : scene.agents) {
    for (const TrajPoint& p : track.past.points) grow(p.pos());
    for (const TrajPoint& p : track.future.points) grow(p.pos());
  }
  for (const auto& [id, lane] : scene.lanes.lanes) {
    for (const Vec2& v : lane.centerline) grow(v);
  }

  const double pad = 3.0;
  min_x -= pad;
  min_y -= pad;
  max_x += pad;
  max_y += pad;

  std::string out;
  char buf[160];
  const auto emit = [&out, &buf](auto... args) {
    std::snprintf(buf, sizeof(buf), args...);
    out += buf;
  };
  // y flipped so +y points up in the image.
  emit("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.2f %.2f %.2f %.2f\" "
       "width=\"720\">\n",
       min_x, -max_y, max_x - min_x, max_y - min_y);
  emit("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
       "fill=\"white\"/>\n",
       min_x, -max_y, max_x - min_x, max_y - min_y);

  const auto polyline = [&](const auto& pts, const char* style) {
    if (pts.empty()) return;
    out += "<polyline fill=\"none\" ";
    out += style;
    out += " points=\"";
    for (const auto& p : pts) {
      Vec2 q{0.0, 0.0};
      if constexpr (requires { p.pos(); }) {
        q = p.pos();
      } else {
        q = p;
      }
      emit("%.2f,%.2f ", q.x, -q.y);
    }
    out += "\"/>\n";
  };

  for (const auto& [id, lane] : scene.lanes.lanes) {
    polyline(lane.centerline, "stroke=\"#bbbbbb\" stroke-width=\"0.3\"");
  }
  for (const auto& [id, track] : scene.agents) {
    const bool is_target = id == scene.target_id;
    polyline(track.past.points,
             is_target ? "stroke=\"#cc2222\" stroke-width=\"0.25\""
                       : "stroke=\"#2255cc\" stroke-width=\"0.25\"");
    polyline(track.future.points,
             is_target
                 ? "stroke=\"#cc2222\" stroke-width=\"0.25\" stroke-dasharray=\"0.6,0.4\""
                 : "stroke=\"#2255cc\" stroke-width=\"0.25\" stroke-dasharray=\"0.6,0.4\"");
  }
  out += "</svg>\n";
  return out;
}

}  // namespace trajlab
