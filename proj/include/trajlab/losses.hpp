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
#include <vector>

#include "trajlab/errors.hpp"
#include "trajlab/metrics.hpp"
#include "trajlab/trajectory.hpp"

namespace trajlab {

/// Scalar loss value with its analytic gradient w.r.t. the prediction(s).
struct LossResult {
  double value = 0.0;
  std::vector<double> grad;
};

/// One predicted vector (regression value(s) or classification logits) tied
/// to hypothesis k_index.
struct PredVector {
  std::vector<double> values;
  int k_index = 0;
};

struct LossWeights {
  double lambda = 1.0;  // pretext term weight in the total loss
};

/// Smooth-L1 (Huber, beta = 1) between a scalar prediction and target:
/// 0.5 x^2 for |x| < 1, |x| - 0.5 otherwise, x = pred - target.
/// grad[0] is d/dpred: x inside the quadratic zone, sign(x) outside.
[[nodiscard]] inline LossResult smooth_l1(double pred, double target) {
  const double x = pred - target;
  LossResult r;
  if (std::abs(x) < 1.0) {
    r.value = 0.5 * x * x;
    r.grad = {x};
  } else {
    r.value = std::abs(x) - 0.5;
    r.grad = {x > 0.0 ? 1.0 : -1.0};
  }
  return r;
}

/// Cross-entropy of logits against an integer label, computed via the
/// max-subtraction form so large logits cannot overflow. The gradient is
/// softmax(logits) - onehot(label).
[[nodiscard]] inline LossResult cross_entropy(std::span<const double> logits,
                                              int label) {
  if (logits.size() < 2) {
    throw Error(Errc::kInvalidArgument, "cross_entropy needs >= 2 classes");
  }
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw Error(Errc::kLabelOutOfRange,
                "label " + std::to_string(label) + " outside " +
                    std::to_string(logits.size()) + " classes");
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (const double z : logits) sum += std::exp(z - m);

  LossResult r;
  r.value = std::log(sum) - (logits[static_cast<std::size_t>(label)] - m);
  r.grad.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    r.grad[i] = std::exp(logits[i] - m) / sum;
  }
  r.grad[static_cast<std::size_t>(label)] -= 1.0;
  return r;
}

[[nodiscard]] inline LossResult cross_entropy(const PredVector& pred, int label) {
  return cross_entropy(std::span<const double>(pred.values), label);
}

/// Mean pretext loss: the per-pair losses summed and divided by k_target
/// (the interacting-agent count; normally per_pair.size()).
[[nodiscard]] inline double pretext_loss(std::span<const double> per_pair,
                                         int k_target) {
  if (per_pair.empty()) {
    throw Error(Errc::kEmptyPairSet, "pretext_loss over an empty pair set");
  }
  if (k_target < 1) {
    throw Error(Errc::kInvalidArgument, "k_target must be >= 1");
  }
  double sum = 0.0;
  for (const double v : per_pair) sum += v;
  return sum / static_cast<double>(k_target);
}

/// main + lambda * pretext. lambda == 0 returns main unchanged (bitwise), so
/// disabling the pretext term cannot perturb the main loss.
[[nodiscard]] inline double total_loss(double main_loss, double pretext,
                                       const LossWeights& weights = {}) {
  if (weights.lambda == 0.0) return main_loss;
  return main_loss + weights.lambda * pretext;
}

/// Index of the smallest per-mode loss; ties take the lowest index.
[[nodiscard]] inline std::size_t select_mode(std::span<const double> per_mode) {
  if (per_mode.empty()) {
    throw Error(Errc::kInvalidArgument, "select_mode over zero modes");
  }
  return static_cast<std::size_t>(
      std::min_element(per_mode.begin(), per_mode.end()) - per_mode.begin());
}

/// Per-mode trajectory regression loss: mean over ground-truth samples of
/// smooth_l1 on x plus smooth_l1 on y. Modes must cover the same t_index
/// range as the ground truth.
[[nodiscard]] inline std::vector<double> main_trajectory_loss(
    const PredictionSet& preds, const Trajectory& gt_future) {
  if (preds.modes.empty()) {
    throw Error(Errc::kInvalidArgument, "main_trajectory_loss needs modes");
  }
  if (gt_future.empty()) {
    throw Error(Errc::kEmptyTrajectory, "main_trajectory_loss needs ground truth");
  }
  std::vector<double> out;
  out.reserve(preds.modes.size());
  for (const Trajectory& mode : preds.modes) {
    if (mode.size() != gt_future.size() ||
        mode.points.front().t_index != gt_future.points.front().t_index) {
      throw Error(Errc::kLengthMismatch,
                  "prediction mode does not cover the ground-truth horizon for '" +
                      preds.agent_id + "'");
    }
    double total = 0.0;
    for (std::size_t t = 0; t < gt_future.size(); ++t) {
      total += smooth_l1(mode.points[t].x, gt_future.points[t].x).value;
      total += smooth_l1(mode.points[t].y, gt_future.points[t].y).value;
    }
    out.push_back(total / static_cast<double>(gt_future.size()));
  }
  return out;
}

}  // namespace trajlab
