// Copyright 2026 The evasim Authors
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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "evasim/metrics.hpp"
#include "evasim/scene.hpp"
#include "evasim/selection.hpp"

namespace evasim {

using Json = nlohmann::json;

/// 2-space indented dump with a trailing newline; keys are sorted.
std::string dump_json(const Json& j);
std::string read_text_file(const std::string& path);
/// Creates parent directories as needed.
void write_text_file(const std::string& path, const std::string& text);

Json scene_to_json(const Scene& scene);
/// Throws InvalidInput on missing fields, wrong types or broken invariants.
Scene scene_from_json(const Json& j);
Scene load_scene(const std::string& path);

struct SceneLoadError {
  std::string path;
  std::string message;
};

struct SceneSet {
  std::vector<Scene> scenes;  // sorted by file name
  std::vector<SceneLoadError> errors;
};

/// A single scene file, or every *.json file of a directory. Malformed files
/// are reported in `errors` and skipped.
SceneSet load_scenes(const std::string& path);

Json annotation_to_json(const AnnotationRecord& rec);
AnnotationRecord annotation_from_json(const Json& j);

/// Per-frame box export handed to downstream renderers and video models.
struct ScenarioBox {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double length = 0.0;
  double width = 0.0;
  double height = 1.8;
  double speed = 0.0;
  friend bool operator==(const ScenarioBox&, const ScenarioBox&) = default;
};

struct ScenarioFrame {
  double time = 0.0;
  PoseState ego_pose;
  std::vector<ScenarioBox> boxes;
  friend bool operator==(const ScenarioFrame&, const ScenarioFrame&) = default;
};

struct ScenarioFile {
  std::string scene_id;
  double frame_rate = 10.0;
  std::string stage_tag;  // "collision", "evasion" or "origin"
  int ego_id = 0;
  int adv_id = 0;
  std::vector<ScenarioFrame> frames;
  /// Extension point: the drivable polygons the scenario was simulated on.
  std::optional<MapModel> map;
};

inline constexpr double kExportHeight = 1.8;

ScenarioFile make_scenario_file(const Scene& scene, const TrajectoryBatch& batch,
                                const std::string& stage_tag, int adv_id);
TrajectoryBatch scenario_to_batch(const ScenarioFile& file);

Json scenario_to_json(const ScenarioFile& file);
ScenarioFile scenario_from_json(const Json& j);
std::string serialize_scenario(const ScenarioFile& file);
ScenarioFile parse_scenario(const std::string& text);

Json realism_stats_to_json(const RealismStats& stats);
RealismStats realism_stats_from_json(const Json& j);

/// Keys "CSR", "ESR", "collision_rate", "off_road_rate", "realism",
/// "closest_distance" plus a "per_scene" breakdown.
Json metrics_report_to_json(const MetricsReport& rep);

/// Top-down SVG: road polygons, then one box per vehicle every `stride`
/// frames (always including the first). Output is a pure function of input.
std::string render_svg(const ScenarioFile& file, int stride = 10);

}  // namespace evasim
