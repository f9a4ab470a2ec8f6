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
#include <cstddef>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trajlab/errors.hpp"
#include "trajlab/lane_graph.hpp"
#include "trajlab/scene.hpp"
#include "trajlab/trajectory.hpp"

namespace trajlab {

/// Hard input bounds; exceeding them is a scene-level error, never an
/// allocation blowup. A 5 s scene needs ~50 rows per agent.
inline constexpr std::size_t kCsvMaxLineLength = 1u << 20;
inline constexpr std::size_t kCsvMaxRows = 1u << 21;
inline constexpr std::size_t kCsvMaxTracks = 16384;

struct CsvRowReject {
  std::size_t line_no = 0;
  std::string error;
};

/// Outcome of parsing one scene file. Row-level problems reject rows and
/// keep going; scene-level problems leave scene empty and set error.
struct CsvParseResult {
  std::optional<Scene> scene;
  std::optional<Errc> error;
  std::string message;
  std::vector<CsvRowReject> row_rejects;

  [[nodiscard]] bool ok() const noexcept { return scene.has_value(); }
};

namespace detail {

inline void split_csv_line(const std::string& line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  const std::string_view sv(line);
  while (true) {
    const std::size_t comma = sv.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(sv.substr(start));
      return;
    }
    out.push_back(sv.substr(start, comma - start));
    start = comma + 1;
  }
}

[[nodiscard]] inline std::optional<double> parse_finite_double(std::string_view s) {
  if (s.empty() || s.size() > 64) return std::nullopt;
  char buf[65];
  s.copy(buf, s.size());
  buf[s.size()] = '\0';
  char* end = nullptr;
  const double v = std::strtod(buf, &end);
  if (end != buf + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parses a trajectory CSV (columns TIMESTAMP, TRACK_ID, OBJECT_TYPE, X, Y,
/// CITY_NAME; one row per agent per sample; OBJECT_TYPE == AGENT marks the
/// prediction target). Timestamps are mapped to 10 Hz sample ranks by sorted
/// order: ranks 0..19 become the past (t_index -19..0), ranks 20..49 the
/// future (1..30), later ranks are rejected as beyond the horizon. The
/// returned scene is unnormalized; lanes are attached when provided.
[[nodiscard]] inline CsvParseResult parse_trajectory_csv(
    std::istream& in, const std::string& scene_id,
    const LaneGraph* lanes = nullptr) {
  CsvParseResult result;
  const auto fail = [&result](Errc code, std::string msg) -> CsvParseResult& {
    result.error = code;
    result.message = std::move(msg);
    result.scene.reset();
    return result;
  };

  std::string line;
  if (!std::getline(in, line)) {
    fail(Errc::kMalformedRecord, "empty file");
    return result;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string_view> fields;
  detail::split_csv_line(line, fields);
  const char* const required[] = {"TIMESTAMP", "TRACK_ID", "OBJECT_TYPE", "X", "Y"};
  std::size_t col[5] = {};
  for (std::size_t r = 0; r < 5; ++r) {
    const auto it = std::find(fields.begin(), fields.end(),
                              std::string_view(required[r]));
    if (it == fields.end()) {
      fail(Errc::kMissingColumn,
           "header lacks required column " + std::string(required[r]));
      return result;
    }
    col[r] = static_cast<std::size_t>(it - fields.begin());
  }
  const std::size_t min_fields =
      1 + *std::max_element(std::begin(col), std::end(col));

  struct Row {
    double timestamp;
    double x;
    double y;
    bool is_target;
  };
  std::map<std::string, std::vector<Row>> tracks;
  std::vector<double> timestamps;
  std::size_t line_no = 1;
  std::size_t n_rows = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.size() > kCsvMaxLineLength) {
      fail(Errc::kMalformedRecord,
           "line " + std::to_string(line_no) + " exceeds the length bound");
      return result;
    }
    if (++n_rows > kCsvMaxRows) {
      fail(Errc::kMalformedRecord, "row count exceeds the input bound");
      return result;
    }
    detail::split_csv_line(line, fields);
    if (fields.size() < min_fields) {
      result.row_rejects.push_back({line_no, "missing_fields"});
      continue;
    }
    const auto ts = detail::parse_finite_double(fields[col[0]]);
    const auto x = detail::parse_finite_double(fields[col[3]]);
    const auto y = detail::parse_finite_double(fields[col[4]]);
    if (!ts || !x || !y) {
      result.row_rejects.push_back({line_no, "non_numeric_value"});
      continue;
    }
    const std::string track_id(fields[col[1]]);
    if (track_id.empty()) {
      result.row_rejects.push_back({line_no, "empty_track_id"});
      continue;
    }
    if (tracks.size() >= kCsvMaxTracks &&
        tracks.find(track_id) == tracks.end()) {
      fail(Errc::kMalformedRecord, "track count exceeds the input bound");
      return result;
    }
    tracks[track_id].push_back(
        {*ts, *x, *y, fields[col[2]] == std::string_view("AGENT")});
    timestamps.push_back(*ts);
  }

  if (tracks.empty()) {
    fail(Errc::kMalformedRecord, "no valid rows");
    return result;
  }

  std::sort(timestamps.begin(), timestamps.end());
  timestamps.erase(std::unique(timestamps.begin(), timestamps.end()),
                   timestamps.end());
  const auto rank_of = [&timestamps](double ts) -> std::size_t {
    return static_cast<std::size_t>(
        std::lower_bound(timestamps.begin(), timestamps.end(), ts) -
        timestamps.begin());
  };

  std::string target_id;
  for (const auto& [id, rows] : tracks) {
    if (std::any_of(rows.begin(), rows.end(),
                    [](const Row& r) { return r.is_target; })) {
      if (!target_id.empty()) {
        fail(Errc::kNoTargetAgent, "multiple AGENT tracks");
        return result;
      }
      target_id = id;
    }
  }
  if (target_id.empty()) {
    fail(Errc::kNoTargetAgent, "no AGENT track");
    return result;
  }

  Scene scene;
  scene.scene_id = scene_id;
  scene.target_id = target_id;
  if (lanes != nullptr) scene.lanes = *lanes;

  for (auto& [id, rows] : tracks) {
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.timestamp < b.timestamp; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].timestamp == rows[i - 1].timestamp) {
        fail(Errc::kNonMonotonicTimestamps,
             "track '" + id + "' repeats a timestamp");
        return result;
      }
    }
    // t_index by global sample rank; the track may cover only part of it.
    std::map<int, Vec2> by_t;
    for (const Row& r : rows) {
      const std::size_t rank = rank_of(r.timestamp);
      if (rank >= static_cast<std::size_t>(kPastLen + kFutureLen)) {
        result.row_rejects.push_back({0, "beyond_horizon"});
        continue;
      }
      by_t[static_cast<int>(rank) - (kPastLen - 1)] = {r.x, r.y};
    }

    AgentTrack track;
    track.past.agent_id = id;
    track.past.kind = TrajKind::kPast;
    track.future.agent_id = id;
    track.future.kind = TrajKind::kFuture;
    // Past: the contiguous run ending at t_index 0.
    for (int t = 0; t >= -(kPastLen - 1); --t) {
      if (by_t.find(t) == by_t.end()) break;
      const Vec2 q = by_t[t];
      track.past.points.insert(track.past.points.begin(), {q.x, q.y, t});
    }
    // Future: the contiguous run starting at t_index 1.
    for (int t = 1; t <= kFutureLen; ++t) {
      const auto it = by_t.find(t);
      if (it == by_t.end()) break;
      track.future.points.push_back({it->second.x, it->second.y, t});
    }
    const std::size_t used = track.past.size() + track.future.size();
    if (used < by_t.size()) {
      result.row_rejects.push_back({0, "non_contiguous_samples"});
    }
    if (used == 0) continue;  // nothing usable from this track
    scene.agents[id] = std::move(track);
  }

  const auto target_it = scene.agents.find(target_id);
  if (target_it == scene.agents.end() || target_it->second.past.size() < 2 ||
      target_it->second.past.points.back().t_index != 0 ||
      target_it->second.future.empty()) {
    fail(Errc::kNoTargetAgent,
         "target track unusable: needs >= 2 past samples ending at the "
         "present and at least one future sample");
    return result;
  }

  result.scene = std::move(scene);
  return result;
}

[[nodiscard]] inline CsvParseResult parse_trajectory_csv_file(
    const std::filesystem::path& path, const LaneGraph* lanes = nullptr) {
  std::ifstream in(path);
  if (!in) {
    CsvParseResult result;
    result.error = Errc::kIoError;
    result.message = "cannot open '" + path.string() + "'";
    return result;
  }
  return parse_trajectory_csv(in, path.stem().string(), lanes);
}

}  // namespace trajlab
