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

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trajlab/errors.hpp"
#include "trajlab/interaction.hpp"
#include "trajlab/lane_graph.hpp"
#include "trajlab/metrics.hpp"
#include "trajlab/pretext.hpp"
#include "trajlab/scenario.hpp"
#include "trajlab/scene.hpp"
#include "trajlab/trajectory.hpp"

namespace trajlab {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// One line of pairs.jsonl: the filter outcome for one scene.
struct PairsRecord {
  std::string scene_id;
  IntentClass intent = IntentClass::kOther;
  bool degenerate_heading = false;
  std::vector<InteractionPair> pairs;
};

/// A pair the pretext stage could not label, with the reason.
struct SkippedLabel {
  std::string other_id;
  std::string error;
};

/// One line of labels.jsonl: pseudo-labels for one scene's retained pairs.
struct LabelsRecord {
  std::string scene_id;
  std::vector<PretextLabelSet> labels;
  std::vector<SkippedLabel> skipped;
};

/// Per-mode pretext prediction vectors for one (target, other) pair.
struct PairPretextPrediction {
  std::vector<double> range_gap;                 // one scalar per mode
  std::vector<std::vector<double>> closest;      // per mode: 4 logits
  std::vector<std::vector<double>> direction;    // per mode: 3 logits
  std::vector<std::vector<double>> itype;        // per mode: 5 logits
};

struct AgentPrediction {
  PredictionSet set;
  std::map<std::string, PairPretextPrediction> pretext;  // keyed by other id
};

/// One line of preds.jsonl: hypotheses for one scene's agents.
struct PredictionRecord {
  std::string scene_id;
  std::map<std::string, AgentPrediction> agents;
};

/// One line of rejects.jsonl.
struct RejectRecord {
  std::string source;   // scene id, file name, or file:line
  std::string error;    // errc_name of the failure
  std::string message;
};

namespace jsonio {

inline void check_record(const json& j, const char* type) {
  try {
    const int v = j.at("schema_version").get<int>();
    if (v != kSchemaVersion) {
      throw Error(Errc::kSchemaVersionMismatch,
                  "schema_version " + std::to_string(v) + ", tool expects " +
                      std::to_string(kSchemaVersion));
    }
    const std::string t = j.at("type").get<std::string>();
    if (t != type) {
      throw Error(Errc::kMalformedRecord,
                  "record type '" + t + "', expected '" + std::string(type) + "'");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedRecord, e.what());
  }
}

[[nodiscard]] inline json encode_points(const std::vector<TrajPoint>& pts) {
  json arr = json::array();
  for (const TrajPoint& p : pts) arr.push_back({p.t_index, p.x, p.y});
  return arr;
}

[[nodiscard]] inline std::vector<TrajPoint> decode_points(const json& arr) {
  std::vector<TrajPoint> pts;
  pts.reserve(arr.size());
  for (const json& e : arr) {
    pts.push_back({e.at(1).get<double>(), e.at(2).get<double>(),
                   e.at(0).get<int>()});
  }
  return pts;
}

}  // namespace jsonio

// ---------------------------------------------------------------------------
// Scene records
// ---------------------------------------------------------------------------

[[nodiscard]] inline json encode_scene(const Scene& scene) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["type"] = "scene";
  j["scene_id"] = scene.scene_id;
  j["target_id"] = scene.target_id;
  if (scene.frame) {
    j["frame"] = {{"ox", scene.frame->origin.x},
                  {"oy", scene.frame->origin.y},
                  {"rot", scene.frame->rotation},
                  {"degenerate", scene.frame->degenerate}};
  } else {
    j["frame"] = nullptr;
  }
  json agents = json::array();
  for (const auto& [id, track] : scene.agents) {
    agents.push_back({{"id", id},
                      {"past", jsonio::encode_points(track.past.points)},
                      {"future", jsonio::encode_points(track.future.points)}});
  }
  j["agents"] = std::move(agents);
  json lanes = json::array();
  for (const auto& [id, lane] : scene.lanes.lanes) {
    json pts = json::array();
    for (const Vec2& v : lane.centerline) pts.push_back({v.x, v.y});
    json l = {{"id", id}, {"centerline", std::move(pts)}};
    l["left"] = lane.left_neighbor ? json(*lane.left_neighbor) : json(nullptr);
    l["right"] = lane.right_neighbor ? json(*lane.right_neighbor) : json(nullptr);
    lanes.push_back(std::move(l));
  }
  j["lanes"] = std::move(lanes);
  return j;
}

[[nodiscard]] inline Scene decode_scene(const json& j) {
  jsonio::check_record(j, "scene");
  try {
    Scene scene;
    scene.scene_id = j.at("scene_id").get<std::string>();
    scene.target_id = j.at("target_id").get<std::string>();
    if (!j.at("frame").is_null()) {
      const json& f = j.at("frame");
      NormalizationFrame frame;
      frame.origin = {f.at("ox").get<double>(), f.at("oy").get<double>()};
      frame.rotation = f.at("rot").get<double>();
      frame.degenerate = f.at("degenerate").get<bool>();
      scene.frame = frame;
    }
    for (const json& a : j.at("agents")) {
      const std::string id = a.at("id").get<std::string>();
      AgentTrack track;
      track.past.agent_id = id;
      track.past.kind = TrajKind::kPast;
      track.past.points = jsonio::decode_points(a.at("past"));
      track.future.agent_id = id;
      track.future.kind = TrajKind::kFuture;
      track.future.points = jsonio::decode_points(a.at("future"));
      validate_trajectory(track.past);
      validate_trajectory(track.future);
      scene.agents[id] = std::move(track);
    }
    for (const json& l : j.at("lanes")) {
      Lane lane;
      lane.id = l.at("id").get<std::string>();
      for (const json& p : l.at("centerline")) {
        lane.centerline.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
      if (!l.at("left").is_null()) lane.left_neighbor = l.at("left").get<std::string>();
      if (!l.at("right").is_null()) {
        lane.right_neighbor = l.at("right").get<std::string>();
      }
      scene.lanes.lanes[lane.id] = std::move(lane);
    }
    scene.lanes.validate();
    if (scene.agents.find(scene.target_id) == scene.agents.end()) {
      throw Error(Errc::kNoTargetAgent,
                  "scene '" + scene.scene_id + "' lacks its target '" +
                      scene.target_id + "'");
    }
    return scene;
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedRecord, e.what());
  }
}

// ---------------------------------------------------------------------------
// Oracle records
// ---------------------------------------------------------------------------

[[nodiscard]] inline json encode_oracle(const OracleAnnotation& oracle) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["type"] = "oracle";
  j["scene_id"] = oracle.scene_id;
  j["kind"] = to_string(oracle.kind);
  j["intent"] = to_string(oracle.intent);
  j["retained"] = oracle.retained;
  j["filtered_oncoming"] = oracle.filtered_oncoming;
  json itype = json::object();
  for (const auto& [id, t] : oracle.itype) itype[id] = to_string(t);
  j["itype"] = std::move(itype);
  return j;
}

[[nodiscard]] inline OracleAnnotation decode_oracle(const json& j) {
  jsonio::check_record(j, "oracle");
  try {
    OracleAnnotation o;
    o.scene_id = j.at("scene_id").get<std::string>();
    o.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
    o.intent = intent_from_string(j.at("intent").get<std::string>());
    o.retained = j.at("retained").get<std::vector<std::string>>();
    o.filtered_oncoming =
        j.at("filtered_oncoming").get<std::vector<std::string>>();
    for (const auto& [id, t] : j.at("itype").items()) {
      o.itype[id] = interaction_type_from_string(t.get<std::string>());
    }
    return o;
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedRecord, e.what());
  }
}

// ---------------------------------------------------------------------------
// Pair records
// ---------------------------------------------------------------------------

[[nodiscard]] inline json encode_pairs(const PairsRecord& rec) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["type"] = "pairs";
  j["scene_id"] = rec.scene_id;
  j["intent"] = to_string(rec.intent);
  j["degenerate_heading"] = rec.degenerate_heading;
  json pairs = json::array();
  for (const InteractionPair& p : rec.pairs) {
    pairs.push_back({{"other", p.other_id},
                     {"d_min", p.d_min},
                     {"oncoming", p.oncoming},
                     {"retained", p.retained},
                     {"reason", to_string(p.reason)}});
  }
  j["pairs"] = std::move(pairs);
  return j;
}

[[nodiscard]] inline PairsRecord decode_pairs(const json& j) {
  jsonio::check_record(j, "pairs");
  try {
    PairsRecord rec;
    rec.scene_id = j.at("scene_id").get<std::string>();
    rec.intent = intent_from_string(j.at("intent").get<std::string>());
    rec.degenerate_heading = j.at("degenerate_heading").get<bool>();
    for (const json& p : j.at("pairs")) {
      InteractionPair pair;
      pair.target_id = "";  // implicit: the scene's target
      pair.other_id = p.at("other").get<std::string>();
      pair.d_min = p.at("d_min").get<double>();
      pair.oncoming = p.at("oncoming").get<bool>();
      pair.retained = p.at("retained").get<bool>();
      pair.reason = pair_reason_from_string(p.at("reason").get<std::string>());
      rec.pairs.push_back(std::move(pair));
    }
    return rec;
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedRecord, e.what());
  }
}

// ---------------------------------------------------------------------------
// Label records
// ---------------------------------------------------------------------------

[[nodiscard]] inline json encode_labels(const LabelsRecord& rec) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["type"] = "labels";
  j["scene_id"] = rec.scene_id;
  json labels = json::array();
  for (const PretextLabelSet& l : rec.labels) {
    labels.push_back({{"other", l.other_id},
                      {"range_gap", l.range_gap.gap},
                      {"cd_class", l.closest.class_id},
                      {"cd_dist", l.closest.d_gt},
                      {"cd_aligned", l.closest.n_aligned},
                      {"dm_class", l.direction.class_id},
                      {"dm_dir", l.direction.dir_gt},
                      {"ti_class", to_string(l.itype.class_id)},
                      {"ti_t1", l.itype.t1},
                      {"ti_t2", l.itype.t2},
                      {"ti_dist", l.itype.d_i},
                      {"ti_lane_fallback", l.itype.lane_fallback}});
  }
  j["labels"] = std::move(labels);
  json skipped = json::array();
  for (const SkippedLabel& s : rec.skipped) {
    skipped.push_back({{"other", s.other_id}, {"error", s.error}});
  }
  j["skipped"] = std::move(skipped);
  return j;
}

[[nodiscard]] inline LabelsRecord decode_labels(const json& j) {
  jsonio::check_record(j, "labels");
  try {
    LabelsRecord rec;
    rec.scene_id = j.at("scene_id").get<std::string>();
    for (const json& l : j.at("labels")) {
      PretextLabelSet set;
      set.other_id = l.at("other").get<std::string>();
      set.range_gap.gap = l.at("range_gap").get<double>();
      set.closest.class_id = l.at("cd_class").get<int>();
      set.closest.d_gt = l.at("cd_dist").get<double>();
      set.closest.n_aligned = l.at("cd_aligned").get<int>();
      set.direction.class_id = l.at("dm_class").get<int>();
      set.direction.dir_gt = l.at("dm_dir").get<double>();
      set.itype.class_id =
          interaction_type_from_string(l.at("ti_class").get<std::string>());
      set.itype.t1 = l.at("ti_t1").get<int>();
      set.itype.t2 = l.at("ti_t2").get<int>();
      set.itype.d_i = l.at("ti_dist").get<double>();
      set.itype.lane_fallback = l.at("ti_lane_fallback").get<bool>();
      rec.labels.push_back(std::move(set));
    }
    for (const json& s : j.at("skipped")) {
      rec.skipped.push_back(
          {s.at("other").get<std::string>(), s.at("error").get<std::string>()});
    }
    return rec;
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedRecord, e.what());
  }
}

// ---------------------------------------------------------------------------
// Prediction records
// ---------------------------------------------------------------------------

[[nodiscard]] inline json encode_predictions(const PredictionRecord& rec) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["type"] = "predictions";
  j["scene_id"] = rec.scene_id;
  json agents = json::array();
  for (const auto& [id, ap] : rec.agents) {
    json a;
    a["id"] = id;
    a["confidences"] = ap.set.confidences;
    json modes = json::array();
    for (const Trajectory& m : ap.set.modes) {
      modes.push_back(jsonio::encode_points(m.points));
    }
    a["modes"] = std::move(modes);
    if (!ap.pretext.empty()) {
      json px = json::object();
      for (const auto& [other, p] : ap.pretext) {
        px[other] = {{"rg", p.range_gap},
                     {"cd", p.closest},
                     {"dm", p.direction},
                     {"ti", p.itype}};
      }
      a["pretext"] = std::move(px);
    }
    agents.push_back(std::move(a));
  }
  j["agents"] = std::move(agents);
  return j;
}

[[nodiscard]] inline PredictionRecord decode_predictions(const json& j) {
  jsonio::check_record(j, "predictions");
  try {
    PredictionRecord rec;
    rec.scene_id = j.at("scene_id").get<std::string>();
    for (const json& a : j.at("agents")) {
      const std::string id = a.at("id").get<std::string>();
      AgentPrediction ap;
      ap.set.agent_id = id;
      ap.set.confidences = a.at("confidences").get<std::vector<double>>();
      for (const json& m : a.at("modes")) {
        Trajectory mode;
        mode.agent_id = id;
        mode.kind = TrajKind::kFuture;
        mode.points = jsonio::decode_points(m);
        ap.set.modes.push_back(std::move(mode));
      }
      ap.set.validate();
      if (a.contains("pretext")) {
        for (const auto& [other, p] : a.at("pretext").items()) {
          PairPretextPrediction px;
          px.range_gap = p.at("rg").get<std::vector<double>>();
          px.closest = p.at("cd").get<std::vector<std::vector<double>>>();
          px.direction = p.at("dm").get<std::vector<std::vector<double>>>();
          px.itype = p.at("ti").get<std::vector<std::vector<double>>>();
          ap.pretext[other] = std::move(px);
        }
      }
      rec.agents[id] = std::move(ap);
    }
    return rec;
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedRecord, e.what());
  }
}

// ---------------------------------------------------------------------------
// Reject records
// ---------------------------------------------------------------------------

[[nodiscard]] inline json encode_reject(const RejectRecord& rec) {
  return json{{"schema_version", kSchemaVersion},
              {"type", "reject"},
              {"source", rec.source},
              {"error", rec.error},
              {"message", rec.message}};
}

[[nodiscard]] inline RejectRecord decode_reject(const json& j) {
  jsonio::check_record(j, "reject");
  try {
    return {j.at("source").get<std::string>(), j.at("error").get<std::string>(),
            j.at("message").get<std::string>()};
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedRecord, e.what());
  }
}

// ---------------------------------------------------------------------------
// Standalone lane files
// ---------------------------------------------------------------------------

[[nodiscard]] inline LaneGraph decode_lane_graph(const json& j) {
  jsonio::check_record(j, "lanes");
  try {
    LaneGraph lanes;
    for (const json& l : j.at("lanes")) {
      Lane lane;
      lane.id = l.at("id").get<std::string>();
      for (const json& p : l.at("centerline")) {
        lane.centerline.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
      if (!l.at("left").is_null()) lane.left_neighbor = l.at("left").get<std::string>();
      if (!l.at("right").is_null()) {
        lane.right_neighbor = l.at("right").get<std::string>();
      }
      lanes.lanes[lane.id] = std::move(lane);
    }
    lanes.validate();
    return lanes;
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedRecord, e.what());
  }
}

// ---------------------------------------------------------------------------
// JSONL files
// ---------------------------------------------------------------------------

[[nodiscard]] inline std::vector<json> read_jsonl(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::kIoError, "cannot open '" + path.string() + "'");
  }
  std::vector<json> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(Errc::kMalformedRecord,
                  path.filename().string() + ":" + std::to_string(line_no) +
                      ": invalid JSON");
    }
    out.push_back(std::move(j));
  }
  return out;
}

inline void write_jsonl(const std::filesystem::path& path,
                        const std::vector<json>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(Errc::kIoError, "cannot write '" + path.string() + "'");
  }
  for (const json& j : records) {
    out << j.dump() << '\n';
  }
  if (!out) {
    throw Error(Errc::kIoError, "short write to '" + path.string() + "'");
  }
}

[[nodiscard]] inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::kIoError, "cannot open '" + path.string() + "'");
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw Error(Errc::kMalformedRecord,
                path.filename().string() + ": invalid JSON");
  }
  return j;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(Errc::kIoError, "cannot write '" + path.string() + "'");
  }
  out << j.dump(2) << '\n';
  if (!out) {
    throw Error(Errc::kIoError, "short write to '" + path.string() + "'");
  }
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

/// FNV-1a 64-bit over a byte string.
[[nodiscard]] inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Hash of the semantic configuration: nlohmann serializes objects with
/// sorted keys and shortest-round-trip doubles, so the digest is canonical.
[[nodiscard]] inline std::string config_hash(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

/// Stage manifest. Deliberately excludes paths, thread counts, and
/// timestamps: reruns of the same inputs and config produce identical bytes.
[[nodiscard]] inline json build_manifest(const std::string& stage,
                                         const json& config,
                                         const json& counts) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["type"] = "manifest";
  j["tool"] = "trajlab";
  j["tool_version"] = kToolVersion;
  j["stage"] = stage;
  j["config"] = config;
  j["config_hash"] = config_hash(config);
  j["counts"] = counts;
  return j;
}

}  // namespace trajlab
