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

#include <stdexcept>
#include <string>

namespace trajlab {

/// Machine-checkable failure codes. Every throwing operation in the library
/// throws Error with one of these, so callers can branch without parsing text.
enum class Errc {
  kTrajectoryTooShort,
  kEmptyTrajectory,
  kAllStationary,
  kHorizonTooShort,
  kEmptyOverlap,
  kLabelOutOfRange,
  kEmptyPairSet,
  kLengthMismatch,
  kEmptyCorpus,
  kMissingPrediction,
  kInvalidSpec,
  kMissingColumn,
  kNoTargetAgent,
  kNonMonotonicTimestamps,
  kSchemaVersionMismatch,
  kMalformedRecord,
  kInvalidArgument,
  kIoError,
};

/// Stable snake_case name, used verbatim in logs and JSONL error fields.
[[nodiscard]] inline const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kTrajectoryTooShort: return "trajectory_too_short";
    case Errc::kEmptyTrajectory: return "empty_trajectory";
    case Errc::kAllStationary: return "all_stationary";
    case Errc::kHorizonTooShort: return "horizon_too_short";
    case Errc::kEmptyOverlap: return "empty_overlap";
    case Errc::kLabelOutOfRange: return "label_out_of_range";
    case Errc::kEmptyPairSet: return "empty_pair_set";
    case Errc::kLengthMismatch: return "length_mismatch";
    case Errc::kEmptyCorpus: return "empty_corpus";
    case Errc::kMissingPrediction: return "missing_prediction";
    case Errc::kInvalidSpec: return "invalid_spec";
    case Errc::kMissingColumn: return "missing_column";
    case Errc::kNoTargetAgent: return "no_target_agent";
    case Errc::kNonMonotonicTimestamps: return "non_monotonic_timestamps";
    case Errc::kSchemaVersionMismatch: return "schema_version_mismatch";
    case Errc::kMalformedRecord: return "malformed_record";
    case Errc::kInvalidArgument: return "invalid_argument";
    case Errc::kIoError: return "io_error";
  }
  return "unknown";
}

/// Library exception type: a code plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace trajlab
