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
#include <vector>

#include <gtest/gtest.h>

#include "trajlab/losses.hpp"
#include "trajlab/rng.hpp"

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

// ---------------------------------------------------------------------------
// Smooth L1
// ---------------------------------------------------------------------------

TEST(SmoothL1, KnownValues) {
  EXPECT_DOUBLE_EQ(smooth_l1(3.0, 3.0).value, 0.0);
  EXPECT_DOUBLE_EQ(smooth_l1(3.0, 3.0).grad[0], 0.0);

  const LossResult inside = smooth_l1(0.5, 0.0);
  EXPECT_DOUBLE_EQ(inside.value, 0.125);
  EXPECT_DOUBLE_EQ(inside.grad[0], 0.5);

  const LossResult outside = smooth_l1(-2.0, 0.0);
  EXPECT_DOUBLE_EQ(outside.value, 1.5);
  EXPECT_DOUBLE_EQ(outside.grad[0], -1.0);

  // Both branches meet at |x| = 1 with the same value and slope.
  EXPECT_DOUBLE_EQ(smooth_l1(1.0, 0.0).value, 0.5);
  EXPECT_DOUBLE_EQ(smooth_l1(1.0, 0.0).grad[0], 1.0);
  EXPECT_DOUBLE_EQ(smooth_l1(-1.0, 0.0).value, 0.5);
  EXPECT_DOUBLE_EQ(smooth_l1(-1.0, 0.0).grad[0], -1.0);
}

TEST(SmoothL1, CentralDifferenceGradient) {
  const double h = 1e-5;
  Xoshiro256pp rng(31);
  int checked = 0;
  while (checked < 1000) {
    const double target = rng.uniform(-5.0, 5.0);
    double x = rng.uniform(-4.0, 4.0);
    // Near-transition points included; only steps that straddle the branch
    // switch are excluded, since the finite difference itself is invalid
    // there.
    if (std::abs(std::abs(x) - 1.0) < 2.0 * h) continue;
    const double pred = target + x;
    const double fd = (smooth_l1(pred + h, target).value -
                       smooth_l1(pred - h, target).value) /
                      (2.0 * h);
    const double an = smooth_l1(pred, target).grad[0];
    EXPECT_NEAR(an, fd, std::max(1e-8, 1e-6 * std::abs(an)));
    ++checked;
  }
  // Explicit near-kink probes on both sides.
  for (const double x : {1.0 + 1e-3, 1.0 - 1e-3, -1.0 + 1e-4, -1.0 - 1e-4}) {
    const double fd =
        (smooth_l1(x + h, 0.0).value - smooth_l1(x - h, 0.0).value) / (2.0 * h);
    EXPECT_NEAR(smooth_l1(x, 0.0).grad[0], fd,
                std::max(1e-8, 1e-6 * std::abs(fd)));
  }
}

// ---------------------------------------------------------------------------
// Cross entropy
// ---------------------------------------------------------------------------

TEST(CrossEntropy, MatchesNaiveFormulaOnModerateLogits) {
  Xoshiro256pp rng(32);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(6));
    std::vector<double> logits(static_cast<std::size_t>(n));
    for (double& z : logits) z = rng.uniform(-6.0, 6.0);
    const int label = static_cast<int>(rng.uniform_int(
        static_cast<std::uint64_t>(n)));

    // Independent long-double reference without max subtraction.
    long double denom = 0.0L;
    for (const double z : logits) denom += std::exp(static_cast<long double>(z));
    const long double ref =
        std::log(denom) -
        static_cast<long double>(logits[static_cast<std::size_t>(label)]);

    const LossResult r = cross_entropy(logits, label);
    EXPECT_NEAR(r.value, static_cast<double>(ref), 1e-12);
    EXPECT_GE(r.value, 0.0);

    // Gradient rows sum to zero and match softmax - onehot.
    double grad_sum = 0.0;
    for (const double g : r.grad) grad_sum += g;
    EXPECT_NEAR(grad_sum, 0.0, 1e-12);
    for (std::size_t i = 0; i < logits.size(); ++i) {
      const long double p =
          std::exp(static_cast<long double>(logits[i])) / denom;
      const double expect =
          static_cast<double>(p) -
          (static_cast<int>(i) == label ? 1.0 : 0.0);
      EXPECT_NEAR(r.grad[i], expect, 1e-12);
    }
  }
}

TEST(CrossEntropy, StableUnderHugeLogits) {
  const std::vector<double> logits{10000.0, 9999.0, -10000.0};
  const LossResult r = cross_entropy(logits, 0);
  ASSERT_TRUE(std::isfinite(r.value));
  // log(1 + e^-1 + e^-20000) - 0 = log(1 + e^-1).
  EXPECT_NEAR(r.value, std::log(1.0 + std::exp(-1.0)), 1e-12);
  EXPECT_TRUE(std::isfinite(r.grad[0]));
  EXPECT_NEAR(r.grad[2], 0.0, 1e-12);
}

TEST(CrossEntropy, CentralDifferenceGradient) {
  const double h = 1e-5;
  Xoshiro256pp rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(5));
    std::vector<double> logits(static_cast<std::size_t>(n));
    for (double& z : logits) z = rng.uniform(-4.0, 4.0);
    const int label =
        static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    const LossResult r = cross_entropy(logits, label);
    for (std::size_t i = 0; i < logits.size(); ++i) {
      std::vector<double> up = logits;
      std::vector<double> down = logits;
      up[i] += h;
      down[i] -= h;
      const double fd =
          (cross_entropy(up, label).value - cross_entropy(down, label).value) /
          (2.0 * h);
      EXPECT_NEAR(r.grad[i], fd, std::max(1e-8, 1e-6 * std::abs(r.grad[i])));
    }
  }
}

TEST(CrossEntropy, ErrorTaxonomy) {
  const std::vector<double> one{1.0};
  EXPECT_EQ(thrown_code([&] { (void)cross_entropy(one, 0); }),
            Errc::kInvalidArgument);
  const std::vector<double> two{1.0, 2.0};
  EXPECT_EQ(thrown_code([&] { (void)cross_entropy(two, 2); }),
            Errc::kLabelOutOfRange);
  EXPECT_EQ(thrown_code([&] { (void)cross_entropy(two, -1); }),
            Errc::kLabelOutOfRange);

  PredVector pv;
  pv.values = {0.5, 0.25, 0.25};
  EXPECT_NO_THROW((void)cross_entropy(pv, 2));
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

TEST(PretextLoss, SumOverKTarget) {
  const std::vector<double> per_pair{1.0, 2.0, 4.0};
  EXPECT_DOUBLE_EQ(pretext_loss(per_pair, 3), 7.0 / 3.0);
  EXPECT_DOUBLE_EQ(pretext_loss(per_pair, 7), 1.0);
  EXPECT_EQ(thrown_code([] {
              (void)pretext_loss(std::vector<double>{}, 1);
            }),
            Errc::kEmptyPairSet);
  EXPECT_EQ(thrown_code([&] { (void)pretext_loss(per_pair, 0); }),
            Errc::kInvalidArgument);
}

TEST(TotalLoss, LambdaZeroShortCircuitsBitwise) {
  const double main_loss = 0.1;
  LossWeights w;
  w.lambda = 0.0;
  // Even a poisonous pretext term cannot leak through at lambda zero.
  EXPECT_EQ(total_loss(main_loss, std::numeric_limits<double>::infinity(), w),
            main_loss);
  EXPECT_EQ(total_loss(main_loss, std::numeric_limits<double>::quiet_NaN(), w),
            main_loss);
  w.lambda = 1.0;
  EXPECT_DOUBLE_EQ(total_loss(2.0, 3.0, w), 5.0);
  w.lambda = 0.5;
  EXPECT_DOUBLE_EQ(total_loss(2.0, 3.0, w), 3.5);
}

TEST(SelectMode, ArgminWithLowestIndexTies) {
  EXPECT_EQ(select_mode(std::vector<double>{3.0, 1.0, 2.0}), 1u);
  EXPECT_EQ(select_mode(std::vector<double>{2.0, 1.0, 1.0, 5.0}), 1u);
  EXPECT_EQ(select_mode(std::vector<double>{7.0}), 0u);
  EXPECT_EQ(thrown_code([] { (void)select_mode(std::vector<double>{}); }),
            Errc::kInvalidArgument);
}

TEST(MainTrajectoryLoss, HandOracle) {
  Trajectory gt;
  gt.agent_id = "t";
  gt.points = {{0.0, 0.0, 1}, {1.0, 0.0, 2}};
  PredictionSet preds;
  preds.agent_id = "t";
  Trajectory exact = gt;
  Trajectory off;
  off.points = {{0.5, 0.0, 1}, {1.0, 3.0, 2}};
  preds.modes = {exact, off};
  preds.confidences = {0.6, 0.4};

  const std::vector<double> per_mode = main_trajectory_loss(preds, gt);
  ASSERT_EQ(per_mode.size(), 2u);
  EXPECT_DOUBLE_EQ(per_mode[0], 0.0);
  // Mode 1: sample 1 -> sl1(0.5) = 0.125 on x; sample 2 -> sl1(3) = 2.5 on y.
  EXPECT_DOUBLE_EQ(per_mode[1], (0.125 + 2.5) / 2.0);
  EXPECT_EQ(select_mode(per_mode), 0u);
}

TEST(MainTrajectoryLoss, HorizonMismatchThrows) {
  Trajectory gt;
  gt.points = {{0.0, 0.0, 1}, {1.0, 0.0, 2}};
  PredictionSet preds;
  preds.agent_id = "t";
  Trajectory shorter;
  shorter.points = {{0.0, 0.0, 1}};
  preds.modes = {shorter};
  preds.confidences = {1.0};
  EXPECT_EQ(thrown_code([&] { (void)main_trajectory_loss(preds, gt); }),
            Errc::kLengthMismatch);

  Trajectory shifted;
  shifted.points = {{0.0, 0.0, 2}, {1.0, 0.0, 3}};
  preds.modes = {shifted};
  EXPECT_EQ(thrown_code([&] { (void)main_trajectory_loss(preds, gt); }),
            Errc::kLengthMismatch);

  preds.modes.clear();
  EXPECT_EQ(thrown_code([&] { (void)main_trajectory_loss(preds, gt); }),
            Errc::kInvalidArgument);
  preds.modes = {gt};
  EXPECT_EQ(thrown_code([&] {
              (void)main_trajectory_loss(preds, Trajectory{});
            }),
            Errc::kEmptyTrajectory);
}

}  // namespace
