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

#include <cmath>
#include <functional>
#include <limits>

#include <gtest/gtest.h>

#include "trajlab/lane_graph.hpp"
#include "trajlab/scene.hpp"
#include "trajlab/trajectory.hpp"

namespace {

using namespace trajlab;

Trajectory make_track(const char* id, int t0,
                      std::initializer_list<Vec2> pts,
                      TrajKind kind = TrajKind::kPast) {
  Trajectory t;
  t.agent_id = id;
  t.kind = kind;
  int ti = t0;
  for (const Vec2& p : pts) t.points.push_back({p.x, p.y, ti++});
  return t;
}

Errc thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a typed error";
  return Errc::kInvalidArgument;
}

TEST(Trajectory, AtTime) {
  const Trajectory t = make_track("a", -2, {{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  ASSERT_NE(t.at_time(-2), nullptr);
  EXPECT_DOUBLE_EQ(t.at_time(-2)->x, 0.0);
  ASSERT_NE(t.at_time(1), nullptr);
  EXPECT_DOUBLE_EQ(t.at_time(1)->x, 3.0);
  EXPECT_EQ(t.at_time(-3), nullptr);
  EXPECT_EQ(t.at_time(2), nullptr);
  EXPECT_EQ(Trajectory{}.at_time(0), nullptr);
}

TEST(Trajectory, ValidateAcceptsContiguous) {
  const Trajectory t = make_track("a", 5, {{0, 0}, {1, 1}, {2, 2}});
  EXPECT_NO_THROW(validate_trajectory(t));
  EXPECT_NO_THROW(validate_trajectory(Trajectory{}));
}

TEST(Trajectory, ValidateRejectsGapAndNonFinite) {
  Trajectory gap = make_track("a", 0, {{0, 0}, {1, 1}});
  gap.points[1].t_index = 2;
  EXPECT_EQ(thrown_code([&] { validate_trajectory(gap); }),
            Errc::kMalformedRecord);

  Trajectory nan = make_track("a", 0, {{0, 0}, {1, 1}});
  nan.points[1].y = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(thrown_code([&] { validate_trajectory(nan); }),
            Errc::kMalformedRecord);

  Trajectory inf = make_track("a", 0, {{0, 0}, {1, 1}});
  inf.points[0].x = std::numeric_limits<double>::infinity();
  EXPECT_EQ(thrown_code([&] { validate_trajectory(inf); }),
            Errc::kMalformedRecord);
}

TEST(Trajectory, Displacements) {
  const Trajectory t = make_track("a", 0, {{0, 0}, {1, 2}, {3, 3}});
  const DisplacementSeq seq = to_displacements(t);
  ASSERT_EQ(seq.deltas.size(), 2u);
  EXPECT_EQ(seq.deltas[0], (Vec2{1.0, 2.0}));
  EXPECT_EQ(seq.deltas[1], (Vec2{2.0, 1.0}));
  EXPECT_EQ(thrown_code([] { (void)to_displacements(Trajectory{}); }),
            Errc::kEmptyTrajectory);
  EXPECT_TRUE(to_displacements(make_track("a", 0, {{5, 5}})).deltas.empty());
}

TEST(HeadingAt, StraightAndDiagonal) {
  const Trajectory x = make_track("a", -1, {{0, 0}, {1, 0}});
  EXPECT_DOUBLE_EQ(heading_at(x, 0), 0.0);
  const Trajectory diag = make_track("a", -1, {{0, 0}, {1, 1}});
  EXPECT_DOUBLE_EQ(heading_at(diag, 0), kPi / 4.0);
  const Trajectory back = make_track("a", -1, {{1, 0}, {0, 0}});
  EXPECT_DOUBLE_EQ(heading_at(back, 0), kPi);
}

TEST(HeadingAt, SkipsDegenerateSteps) {
  // Movement, then a stationary tail: heading at the end must come from the
  // most recent step with real displacement.
  Trajectory t = make_track("a", -3, {{0, 0}, {0, 1}, {0, 1}, {0, 1}});
  EXPECT_DOUBLE_EQ(heading_at(t, 0), kPi / 2.0);
  // A sub-threshold jitter step is still degenerate.
  t.points[2].x = 1e-9;
  EXPECT_DOUBLE_EQ(heading_at(t, 0), kPi / 2.0);
}

TEST(HeadingAt, ErrorTaxonomy) {
  EXPECT_EQ(thrown_code([] { (void)heading_at(Trajectory{}, 0); }),
            Errc::kEmptyTrajectory);
  const Trajectory t = make_track("a", -1, {{0, 0}, {1, 0}});
  EXPECT_EQ(thrown_code([&] { (void)heading_at(t, 7); }),
            Errc::kInvalidArgument);
  EXPECT_EQ(thrown_code([&] { (void)heading_at(t, -1); }),
            Errc::kTrajectoryTooShort);  // nothing precedes the first sample
  const Trajectory still = make_track("a", -2, {{2, 2}, {2, 2}, {2, 2}});
  EXPECT_EQ(thrown_code([&] { (void)heading_at(still, 0); }),
            Errc::kAllStationary);
}

// ---------------------------------------------------------------------------
// Lane graph
// ---------------------------------------------------------------------------

LaneGraph two_lane_road() {
  LaneGraph g;
  Lane right;
  right.id = "lane_r";
  right.centerline = {{-50.0, 0.0}, {50.0, 0.0}};
  right.left_neighbor = "lane_l";
  Lane left;
  left.id = "lane_l";
  left.centerline = {{-50.0, 3.5}, {50.0, 3.5}};
  left.right_neighbor = "lane_r";
  g.lanes["lane_r"] = right;
  g.lanes["lane_l"] = left;
  return g;
}

TEST(LaneGraph, ValidateAcceptsAndRejects) {
  LaneGraph g = two_lane_road();
  EXPECT_NO_THROW(g.validate());

  LaneGraph mismatch = two_lane_road();
  Lane moved = mismatch.lanes["lane_r"];
  mismatch.lanes.erase("lane_r");
  mismatch.lanes["other_key"] = moved;  // id still says lane_r
  EXPECT_EQ(thrown_code([&] { mismatch.validate(); }), Errc::kMalformedRecord);

  LaneGraph short_line = two_lane_road();
  short_line.lanes["lane_r"].centerline = {{0.0, 0.0}};
  EXPECT_EQ(thrown_code([&] { short_line.validate(); }), Errc::kMalformedRecord);

  LaneGraph dangling = two_lane_road();
  dangling.lanes["lane_r"].left_neighbor = "no_such_lane";
  EXPECT_EQ(thrown_code([&] { dangling.validate(); }), Errc::kMalformedRecord);
}

TEST(LaneGraph, DistanceAndMembership) {
  const LaneGraph g = two_lane_road();
  EXPECT_DOUBLE_EQ(g.distance_to("lane_r", {0.0, 1.0}), 1.0);
  EXPECT_TRUE(g.in_lane({0.0, 2.0}, "lane_r"));   // boundary inclusive
  EXPECT_FALSE(g.in_lane({0.0, 2.0 + 1e-9}, "lane_r"));
  EXPECT_EQ(thrown_code([&] { (void)g.distance_to("nope", {0.0, 0.0}); }),
            Errc::kInvalidArgument);
}

TEST(LaneGraph, NearestLaneSelection) {
  const LaneGraph g = two_lane_road();
  EXPECT_EQ(g.nearest_lane_within({0.0, 0.4}, 2.0).value(), "lane_r");
  EXPECT_EQ(g.nearest_lane_within({0.0, 3.2}, 2.0).value(), "lane_l");
  EXPECT_FALSE(g.nearest_lane_within({0.0, 10.0}, 2.0).has_value());
  // Equidistant between the two centerlines: smallest id wins.
  EXPECT_EQ(g.nearest_lane_within({0.0, 1.75}, 2.0).value(), "lane_l");
  // Exactly at the tolerance is still inside.
  EXPECT_EQ(g.nearest_lane_within({0.0, -2.0}, 2.0).value(), "lane_r");
}

// ---------------------------------------------------------------------------
// Scene normalization
// ---------------------------------------------------------------------------

Scene diagonal_scene() {
  Scene s;
  s.scene_id = "diag";
  s.target_id = "t";
  AgentTrack target;
  target.past = make_track("t", -1, {{1.0, 1.0}, {2.0, 2.0}});
  target.future =
      make_track("t", 1, {{3.0, 3.0}, {4.0, 4.0}}, TrajKind::kFuture);
  s.agents["t"] = target;
  AgentTrack other;
  other.past = make_track("o", -1, {{2.0, 1.0}, {3.0, 2.0}});
  other.future = make_track("o", 1, {{4.0, 3.0}}, TrajKind::kFuture);
  s.agents["o"] = other;
  Lane lane;
  lane.id = "l";
  lane.centerline = {{0.0, 0.0}, {10.0, 10.0}};
  s.lanes.lanes["l"] = lane;
  return s;
}

TEST(NormalizeScene, TargetCentricFrame) {
  const Scene n = normalize_scene(diagonal_scene());
  ASSERT_TRUE(n.frame.has_value());
  EXPECT_FALSE(n.frame->degenerate);
  EXPECT_DOUBLE_EQ(n.frame->origin.x, 2.0);
  EXPECT_DOUBLE_EQ(n.frame->origin.y, 2.0);
  EXPECT_DOUBLE_EQ(n.frame->rotation, kPi / 4.0);

  // Target present position moves to the origin, heading to +x.
  const AgentTrack& target = n.target();
  EXPECT_NEAR(target.past.points.back().x, 0.0, 1e-12);
  EXPECT_NEAR(target.past.points.back().y, 0.0, 1e-12);
  // One diagonal step ahead lands sqrt(2) down the +x axis.
  EXPECT_NEAR(target.future.points[0].x, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(target.future.points[0].y, 0.0, 1e-12);
  // The other agent sits one unit to the target's side in source
  // coordinates: half a diagonal ahead, half a diagonal to the right.
  const AgentTrack& other = n.agents.at("o");
  EXPECT_NEAR(other.past.points.back().x, std::sqrt(2.0) / 2.0, 1e-12);
  EXPECT_NEAR(other.past.points.back().y, -std::sqrt(2.0) / 2.0, 1e-12);
  // Lane centerline moved with the scene.
  const Lane& lane = n.lanes.lanes.at("l");
  EXPECT_NEAR(lane.centerline[0].x, -2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(lane.centerline[0].y, 0.0, 1e-12);
}

TEST(NormalizeScene, FrameInvertsExactly) {
  const Scene raw = diagonal_scene();
  const Scene n = normalize_scene(raw);
  for (const auto& [id, track] : raw.agents) {
    const AgentTrack& norm_track = n.agents.at(id);
    for (std::size_t i = 0; i < track.future.size(); ++i) {
      const Vec2 back = n.frame->invert(norm_track.future.points[i].pos());
      EXPECT_NEAR(back.x, track.future.points[i].x, 1e-12);
      EXPECT_NEAR(back.y, track.future.points[i].y, 1e-12);
    }
  }
}

TEST(NormalizeScene, SecondPassIsIdentity) {
  const Scene once = normalize_scene(diagonal_scene());
  const Scene twice = normalize_scene(once);
  ASSERT_TRUE(twice.frame.has_value());
  EXPECT_TRUE(twice.frame->is_identity(1e-9));
}

TEST(NormalizeScene, DegenerateHeading) {
  Scene s = diagonal_scene();
  // Stationary over the last step: no heading available.
  s.agents["t"].past = make_track("t", -1, {{2.0, 2.0}, {2.0, 2.0}});
  const Scene n = normalize_scene(s);
  ASSERT_TRUE(n.frame.has_value());
  EXPECT_TRUE(n.frame->degenerate);
  EXPECT_DOUBLE_EQ(n.frame->rotation, 0.0);
  // Translation still applies.
  EXPECT_NEAR(n.target().past.points.back().x, 0.0, 1e-12);
}

TEST(NormalizeScene, Errors) {
  Scene s = diagonal_scene();
  s.agents["t"].past.points.resize(1);
  EXPECT_EQ(thrown_code([&] { (void)normalize_scene(s); }),
            Errc::kTrajectoryTooShort);

  Scene missing = diagonal_scene();
  missing.target_id = "ghost";
  EXPECT_EQ(thrown_code([&] { (void)normalize_scene(missing); }),
            Errc::kNoTargetAgent);
}

}  // namespace
