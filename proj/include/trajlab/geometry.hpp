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
#include <span>

#include "trajlab/errors.hpp"

namespace trajlab {

inline constexpr double kPi = 3.14159265358979323846;

/// Plain 2-D vector. Doubles throughout; no implicit conversions.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

[[nodiscard]] constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 3-D cross product; positive when b is left of a.
[[nodiscard]] constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

[[nodiscard]] constexpr double squared_norm(Vec2 v) { return dot(v, v); }

[[nodiscard]] inline double norm(Vec2 v) { return std::sqrt(squared_norm(v)); }

[[nodiscard]] inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

[[nodiscard]] inline double squared_distance(Vec2 a, Vec2 b) {
  return squared_norm(a - b);
}

/// Wraps an angle to (-pi, pi].
[[nodiscard]] inline double wrap_angle(double a) {
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w <= 0.0) w += 2.0 * kPi;
  return w - kPi;
}

/// Magnitude of the wrapped difference between two angles, in [0, pi].
[[nodiscard]] inline double abs_angle_diff(double a, double b) {
  return std::abs(wrap_angle(a - b));
}

/// Rotates v by angle (counterclockwise).
[[nodiscard]] inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Distance from p to the segment [a, b]. Degenerate segments collapse to a.
[[nodiscard]] inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = squared_norm(ab);
  if (len2 <= 0.0) return distance(p, a);
  double t = dot(p - a, ab) / len2;
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  return distance(p, a + t * ab);
}

/// Distance from p to a polyline with >= 1 vertex.
[[nodiscard]] inline double point_polyline_distance(Vec2 p,
                                                    std::span<const Vec2> poly) {
  if (poly.empty()) {
    throw Error(Errc::kInvalidArgument, "polyline has no vertices");
  }
  if (poly.size() == 1) return distance(p, poly[0]);
  double best = distance(p, poly[0]);
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const double d = point_segment_distance(p, poly[i], poly[i + 1]);
    if (d < best) best = d;
  }
  return best;
}

}  // namespace trajlab
