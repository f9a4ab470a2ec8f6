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
#include <vector>

#include <gtest/gtest.h>

#include "trajlab/interaction.hpp"
#include "trajlab/rng.hpp"
#include "trajlab/scenario.hpp"

namespace {

using namespace trajlab;

Errc thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a typed error";
  return Errc::kInvalidArgument;
}

/// Track from a per-sample heading profile: unit-free step length, heading
/// heading_fn(k) for the step into sample k+1. t_index runs t0, t0+1, ...
Trajectory track_from_headings(const char* id, int t0, int n, double step_len,
                               const std::function<double(int)>& heading_fn) {
  Trajectory t;
  t.agent_id = id;
  Vec2 p{0.0, 0.0};
  for (int k = 0; k < n; ++k) {
    t.points.push_back({p.x, p.y, t0 + k});
    const double h = heading_fn(k);
    p = p + step_len * Vec2{std::cos(h), std::sin(h)};
  }
  return t;
}

Trajectory straight_x(const char* id, int t0, int n, double x0, double y,
                      double step) {
  Trajectory t;
  t.agent_id = id;
  for (int k = 0; k < n; ++k) {
    t.points.push_back({x0 + step * k, y, t0 + k});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Cross-time minimum distance
// ---------------------------------------------------------------------------

TEST(MinPairwiseDistance, HandValues) {
  const Trajectory a = straight_x("a", 1, 30, 1.0, 0.0, 1.0);
  const Trajectory b = straight_x("b", 1, 30, 31.0, 3.0, 1.0);
  // Nearest grid cell: a's last sample (30, 0) vs b's first (31, 3).
  EXPECT_DOUBLE_EQ(min_pairwise_distance(a, b), std::sqrt(10.0));
}

TEST(MinPairwiseDistance, CrossTimeNotAligned) {
  // Both agents pass the origin, nine samples apart. Aligned distances never
  // drop below ~9, the cross-time minimum is 0.
  const Trajectory a = straight_x("a", 1, 20, 0.0, 0.0, 1.0);
  const Trajectory b = straight_x("b", 1, 20, -9.0, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(min_pairwise_distance(a, b), 0.0);
  double aligned_min = distance(a.points[0].pos(), b.points[0].pos());
  for (std::size_t k = 1; k < 20; ++k) {
    aligned_min = std::min(
        aligned_min, distance(a.points[k].pos(), b.points[k].pos()));
  }
  EXPECT_DOUBLE_EQ(aligned_min, 9.0);
}

TEST(MinPairwiseDistance, BruteForceOracleBitwise) {
  Xoshiro256pp rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int na = 1 + static_cast<int>(rng.uniform_int(50));
    const int nb = 1 + static_cast<int>(rng.uniform_int(50));
    Trajectory a, b;
    for (int i = 0; i < na; ++i) {
      a.points.push_back(
          {rng.uniform(-40.0, 40.0), rng.uniform(-40.0, 40.0), i});
    }
    for (int i = 0; i < nb; ++i) {
      b.points.push_back(
          {rng.uniform(-40.0, 40.0), rng.uniform(-40.0, 40.0), i});
    }
    double best2 = std::numeric_limits<double>::infinity();
    for (const TrajPoint& pa : a.points) {
      for (const TrajPoint& pb : b.points) {
        const double dx = pa.x - pb.x;
        const double dy = pa.y - pb.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best2) best2 = d2;
      }
    }
    const double got = min_pairwise_distance(a, b);
    EXPECT_EQ(got, std::sqrt(best2));                     // bitwise
    EXPECT_EQ(got, min_pairwise_distance(b, a));          // symmetric
  }
}

TEST(MinPairwiseDistance, EmptyThrows) {
  const Trajectory a = straight_x("a", 1, 5, 0.0, 0.0, 1.0);
  EXPECT_EQ(thrown_code([&] { (void)min_pairwise_distance(a, Trajectory{}); }),
            Errc::kEmptyTrajectory);
  EXPECT_EQ(thrown_code([&] { (void)min_pairwise_distance(Trajectory{}, a); }),
            Errc::kEmptyTrajectory);
}

// ---------------------------------------------------------------------------
// Intent classification
// ---------------------------------------------------------------------------

struct IntentFixture {
  Trajectory past;
  Trajectory future;
  LaneGraph lanes;  // empty unless set
};

IntentFixture straight_fixture(double speed = 10.0) {
  IntentFixture f;
  const double step = speed * kSampleDt;
  f.past = straight_x("t", -19, 20, -19.0 * step, 0.0, step);
  f.future = straight_x("t", 1, 30, step, 0.0, step);
  return f;
}

TEST(ClassifyIntent, Straight) {
  const IntentFixture f = straight_fixture();
  EXPECT_EQ(classify_intent(f.past, f.future, f.lanes, {}),
            IntentClass::kStraight);
}

TEST(ClassifyIntent, LeftAndRightTurn) {
  // Straight for 20 samples, then a quarter turn spread over the rest.
  const auto turn = [](int sign) {
    return track_from_headings("t", -19, 50, 1.0, [sign](int k) {
      if (k < 20) return 0.0;
      return sign * (kPi / 2.0) * static_cast<double>(k - 19) / 30.0;
    });
  };
  Trajectory left = turn(+1);
  Trajectory right = turn(-1);
  Trajectory past_l, past_r, fut_l, fut_r;
  past_l.points.assign(left.points.begin(), left.points.begin() + 20);
  fut_l.points.assign(left.points.begin() + 20, left.points.end());
  past_r.points.assign(right.points.begin(), right.points.begin() + 20);
  fut_r.points.assign(right.points.begin() + 20, right.points.end());
  const LaneGraph no_lanes;
  EXPECT_EQ(classify_intent(past_l, fut_l, no_lanes, {}),
            IntentClass::kLeftTurn);
  EXPECT_EQ(classify_intent(past_r, fut_r, no_lanes, {}),
            IntentClass::kRightTurn);
}

TEST(ClassifyIntent, WaitingTurnByCreepSpeed) {
  // Tight slow arc: 0.35 m/s on radius 0.8 turns ~125 degrees in 5 s while
  // staying under the 0.5 m/s waiting threshold.
  const double radius = 0.8;
  const double speed = 0.35;
  const double dtheta_per_step = speed * kSampleDt / radius;
  const Trajectory arc =
      track_from_headings("t", -19, 50, speed * kSampleDt,
                          [&](int k) { return dtheta_per_step * k; });
  Trajectory past, future;
  past.points.assign(arc.points.begin(), arc.points.begin() + 20);
  future.points.assign(arc.points.begin() + 20, arc.points.end());
  EXPECT_EQ(classify_intent(past, future, LaneGraph{}, {}),
            IntentClass::kLeftTurnWaiting);
}

TEST(ClassifyIntent, LaneChangeByLateralOffset) {
  // Constant heading overall, but the track shifts 3.5 m sideways.
  Trajectory full = straight_x("t", -19, 50, 0.0, 0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double u = std::clamp((k - 10.0) / 15.0, 0.0, 1.0);
    full.points[static_cast<std::size_t>(k)].y = 3.5 * (3.0 * u * u - 2.0 * u * u * u);
  }
  Trajectory past, future;
  past.points.assign(full.points.begin(), full.points.begin() + 20);
  future.points.assign(full.points.begin() + 20, full.points.end());
  EXPECT_EQ(classify_intent(past, future, LaneGraph{}, {}),
            IntentClass::kLaneChange);

  // With the source lane present the offset is measured against it too; the
  // verdict must hold.
  LaneGraph lanes;
  Lane src;
  src.id = "src";
  src.centerline = {{-25.0, 0.0}, {40.0, 0.0}};
  lanes.lanes["src"] = src;
  EXPECT_EQ(classify_intent(past, future, lanes, {}),
            IntentClass::kLaneChange);
}

TEST(ClassifyIntent, CurvedRoadWithLaneIsNotLaneChange) {
  // A gentle arc drifts >1.5 m from the initial-heading line, but the lane
  // follows the arc, so the lane-relative offset stays small. Radius chosen
  // so the net heading change stays under the turn threshold.
  const double step = 1.0;
  const double mild_radius = 120.0;
  const Trajectory mild = track_from_headings(
      "t", -19, 50, step, [&](int k) { return step * k / mild_radius; });
  Trajectory past, future;
  past.points.assign(mild.points.begin(), mild.points.begin() + 20);
  future.points.assign(mild.points.begin() + 20, mild.points.end());
  // Offset from the straight line at ~49^2/(2*120) = 10 m: lane-change-like.
  ASSERT_GT(detail::max_line_offset(mild.points, mild.points.front().pos(),
                                    0.0),
            1.5);

  LaneGraph lanes;
  Lane curved;
  curved.id = "curved";
  curved.centerline.clear();
  for (const TrajPoint& p : mild.points) curved.centerline.push_back(p.pos());
  lanes.lanes["curved"] = curved;
  EXPECT_EQ(classify_intent(past, future, lanes, {}), IntentClass::kStraight);
}

TEST(ClassifyIntent, ErrorsAndFallbacks) {
  const IntentFixture f = straight_fixture();
  Trajectory short_past;
  short_past.points.assign(f.past.points.begin(), f.past.points.begin() + 4);
  Trajectory short_future;
  short_future.points.assign(f.future.points.begin(), f.future.points.begin() + 5);
  EXPECT_EQ(thrown_code([&] {
              (void)classify_intent(short_past, short_future, f.lanes, {});
            }),
            Errc::kTrajectoryTooShort);

  // Stationary track: no reliable direction anywhere.
  Trajectory still_past = straight_x("t", -19, 20, 3.0, 3.0, 0.0);
  Trajectory still_future = straight_x("t", 1, 30, 3.0, 3.0, 0.0);
  EXPECT_EQ(classify_intent(still_past, still_future, f.lanes, {}),
            IntentClass::kOther);
}

TEST(ChordMeanSpeed, ExactOnUniformLine) {
  const Trajectory line = straight_x("t", 0, 50, 0.0, 0.0, 1.0);
  // 49 m of track over 4.9 s.
  EXPECT_DOUBLE_EQ(detail::chord_mean_speed(line.points), 10.0);
}

TEST(SmoothTrack, InteriorOfLineUnchanged) {
  const Trajectory line = straight_x("t", 0, 20, 0.0, 0.0, 1.0);
  const std::vector<TrajPoint> sm = detail::smooth_track(line.points);
  ASSERT_EQ(sm.size(), 20u);
  for (std::size_t i = 2; i + 2 < sm.size(); ++i) {
    EXPECT_NEAR(sm[i].x, line.points[i].x, 1e-12);
    EXPECT_NEAR(sm[i].y, line.points[i].y, 1e-12);
  }
  EXPECT_EQ(sm[0].t_index, line.points[0].t_index);
}

// ---------------------------------------------------------------------------
// Oncoming test
// ---------------------------------------------------------------------------

TEST(IsOncoming, StrictCone) {
  const Trajectory east = straight_x("a", -1, 2, 0.0, 0.0, 1.0);
  const Trajectory west = straight_x("b", -1, 2, 10.0, 0.0, -1.0);
  Trajectory north;
  north.points = {{0.0, 0.0, -1}, {0.0, 1.0, 0}};
  EXPECT_TRUE(is_oncoming(east, west, {}));
  EXPECT_FALSE(is_oncoming(east, north, {}));  // 90 deg < 120 deg

  // Exactly at the threshold angle: strict comparison keeps it not-oncoming.
  const double ang = 2.0 * kPi / 3.0;
  Trajectory at_edge;
  at_edge.points = {{0.0, 0.0, -1}, {std::cos(ang), std::sin(ang), 0}};
  EXPECT_FALSE(is_oncoming(east, at_edge, {}));
  Trajectory past_edge;
  const double ang2 = ang + 1e-6;
  past_edge.points = {{0.0, 0.0, -1}, {std::cos(ang2), std::sin(ang2), 0}};
  EXPECT_TRUE(is_oncoming(east, past_edge, {}));
}

// ---------------------------------------------------------------------------
// Pair selection
// ---------------------------------------------------------------------------

Scene pair_scene() {
  Scene s;
  s.scene_id = "pairs";
  s.target_id = "target";
  AgentTrack target;
  target.past = straight_x("target", -19, 20, -19.0, 0.0, 1.0);
  target.future = straight_x("target", 1, 30, 1.0, 0.0, 1.0);
  s.agents["target"] = target;
  return s;
}

void add_agent(Scene* s, const char* id, Trajectory past, Trajectory future) {
  AgentTrack track;
  track.past = std::move(past);
  track.future = std::move(future);
  (*s).agents[id] = std::move(track);
}

TEST(LabelInteractions, DistanceGateAndOncomingFilter) {
  Scene s = pair_scene();
  // Parallel neighbor 2 m away: candidate, kept.
  add_agent(&s, "near", straight_x("near", -19, 20, -19.0, 2.0, 1.0),
            straight_x("near", 1, 30, 1.0, 2.0, 1.0));
  // Parallel 40 m away: never a candidate.
  add_agent(&s, "far", straight_x("far", -19, 20, -19.0, 40.0, 1.0),
            straight_x("far", 1, 30, 1.0, 40.0, 1.0));
  // Head-on traffic 2 m to the side: candidate but filtered (target straight).
  add_agent(&s, "oncoming", straight_x("oncoming", -19, 20, 40.0, 2.0, -1.0),
            straight_x("oncoming", 1, 30, 20.0, 2.0, -1.0));
  // Close but with too few future samples to participate.
  add_agent(&s, "shortfut", straight_x("shortfut", -19, 20, -19.0, -2.0, 1.0),
            straight_x("shortfut", 1, 9, 1.0, -2.0, 1.0));

  const std::vector<InteractionPair> pairs = label_interactions(s, {});
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].other_id, "near");  // map order: near < oncoming
  EXPECT_TRUE(pairs[0].retained);
  EXPECT_EQ(pairs[0].reason, PairReason::kDistancePass);
  EXPECT_FALSE(pairs[0].oncoming);
  EXPECT_DOUBLE_EQ(pairs[0].d_min, 2.0);

  EXPECT_EQ(pairs[1].other_id, "oncoming");
  EXPECT_TRUE(pairs[1].oncoming);
  EXPECT_FALSE(pairs[1].retained);
  EXPECT_EQ(pairs[1].reason, PairReason::kFilteredOncoming);
}

TEST(LabelInteractions, LeftTurnKeepsOncoming) {
  Scene s;
  s.scene_id = "left";
  s.target_id = "target";
  // Target: straight past, quarter-turn-left future.
  AgentTrack target;
  target.past = straight_x("target", -19, 20, -19.0, 0.0, 1.0);
  Trajectory arc = track_from_headings("target", 1, 30, 1.0, [](int k) {
    return (kPi / 2.0) * static_cast<double>(k) / 29.0;
  });
  for (TrajPoint& p : arc.points) p.x += 1.0;  // continue from (0,0)
  target.future = arc;
  s.agents["target"] = target;
  add_agent(&s, "oncoming", straight_x("oncoming", -19, 20, 40.0, 2.0, -1.0),
            straight_x("oncoming", 1, 30, 20.0, 2.0, -1.0));

  const std::vector<InteractionPair> pairs = label_interactions(s, {});
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_TRUE(pairs[0].oncoming);
  EXPECT_TRUE(pairs[0].retained);
  EXPECT_EQ(pairs[0].reason, PairReason::kRetainedOncomingLeftTurn);
}

TEST(LabelInteractions, StationaryNeighborIsNotOncoming) {
  Scene s = pair_scene();
  add_agent(&s, "parked", straight_x("parked", -19, 20, 10.0, 2.0, 0.0),
            straight_x("parked", 1, 30, 10.0, 2.0, 0.0));
  const std::vector<InteractionPair> pairs = label_interactions(s, {});
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_FALSE(pairs[0].oncoming);
  EXPECT_TRUE(pairs[0].retained);
}

TEST(LabelInteractions, UndersizedTargetYieldsNothing) {
  Scene s = pair_scene();
  s.agents["target"].past.points.resize(3);
  s.agents["target"].future.points.resize(3);
  add_agent(&s, "near", straight_x("near", -19, 20, -19.0, 2.0, 1.0),
            straight_x("near", 1, 30, 1.0, 2.0, 1.0));
  EXPECT_TRUE(label_interactions(s, {}).empty());
}

TEST(LabelInteractions, ThresholdIsStrict) {
  Scene s = pair_scene();
  // Exactly at d_th: excluded (d < d_th must be strict).
  add_agent(&s, "at_edge", straight_x("at_edge", -19, 20, -19.0, 5.0, 1.0),
            straight_x("at_edge", 1, 30, 1.0, 5.0, 1.0));
  add_agent(&s, "inside", straight_x("inside", -19, 20, -19.0, 4.999, 1.0),
            straight_x("inside", 1, 30, 1.0, 4.999, 1.0));
  const std::vector<InteractionPair> pairs = label_interactions(s, {});
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].other_id, "inside");
}

}  // namespace
