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

#include "evasim/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "evasim/errors.hpp"

namespace evasim {

namespace fs = std::filesystem;

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw InvalidInput("cannot read '" + path + "'");
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    fs::create_directories(p.parent_path());
  }
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error("cannot write '" + path + "'");
  }
  f << text;
  if (!f) {
    throw Error("write failed for '" + path + "'");
  }
}

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidInput(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput(std::string("field '") + key + "' has the wrong type");
  }
}

double number(const Json& j, const char* key) {
  const Json& v = j.contains(key) ? j.at(key) : Json();
  if (!v.is_number()) {
    throw InvalidInput(std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

Json map_to_json(const MapModel& map) {
  Json polys = Json::array();
  for (const Polygon& p : map.drivable_polygons()) {
    Json verts = Json::array();
    for (const Vec2& v : p.vertices()) verts.push_back({v.x, v.y});
    polys.push_back(verts);
  }
  return {{"drivable_polygons", polys}};
}

MapModel map_from_json(const Json& j) {
  const Json polys = field<Json>(j, "drivable_polygons");
  if (!polys.is_array()) throw InvalidInput("drivable_polygons must be an array");
  std::vector<Polygon> out;
  for (const Json& poly : polys) {
    if (!poly.is_array()) throw InvalidInput("polygon must be an array of points");
    std::vector<Vec2> verts;
    for (const Json& pt : poly) {
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
        throw InvalidInput("polygon vertex must be [x, y]");
      }
      verts.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    out.emplace_back(std::move(verts));
  }
  return MapModel(std::move(out));
}

}  // namespace

Json scene_to_json(const Scene& scene) {
  Json vehicles = Json::array();
  for (const VehicleState& v : scene.vehicles) {
    vehicles.push_back({{"id", v.id},
                        {"x", v.position.x},
                        {"y", v.position.y},
                        {"heading", v.heading},
                        {"speed", v.speed},
                        {"length", v.length},
                        {"width", v.width},
                        {"is_ego", v.is_ego}});
  }
  Json j = {{"scene_id", scene.scene_id}, {"map", map_to_json(scene.map)}, {"vehicles", vehicles}};
  if (scene.timestamp != 0.0) {
    j["timestamp"] = scene.timestamp;
  }
  return j;
}

Scene scene_from_json(const Json& j) {
  Scene s;
  s.scene_id = field<std::string>(j, "scene_id");
  s.map = map_from_json(field<Json>(j, "map"));
  if (j.contains("timestamp")) s.timestamp = number(j, "timestamp");
  const Json vehicles = field<Json>(j, "vehicles");
  if (!vehicles.is_array()) throw InvalidInput("vehicles must be an array");
  for (const Json& jv : vehicles) {
    VehicleState v;
    v.id = field<int>(jv, "id");
    v.position = {number(jv, "x"), number(jv, "y")};
    v.heading = number(jv, "heading");
    v.speed = number(jv, "speed");
    v.length = number(jv, "length");
    v.width = number(jv, "width");
    v.is_ego = field<bool>(jv, "is_ego");
    s.vehicles.push_back(v);
  }
  s.validate();
  return s;
}

Scene load_scene(const std::string& path) {
  const std::string text = read_text_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
  return scene_from_json(j);
}

SceneSet load_scenes(const std::string& path) {
  SceneSet out;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(path)) {
    files.emplace_back(path);
  } else {
    throw InvalidInput("scene path '" + path + "' does not exist");
  }
  std::set<std::string> ids;
  for (const fs::path& f : files) {
    try {
      Scene s = load_scene(f.string());
      if (!ids.insert(s.scene_id).second) {
        throw InvalidInput("duplicate scene_id '" + s.scene_id + "'");
      }
      out.scenes.push_back(std::move(s));
    } catch (const Error& e) {
      out.errors.push_back({f.string(), e.what()});
    }
  }
  return out;
}

Json annotation_to_json(const AnnotationRecord& rec) {
  Json per = Json::object();
  for (const auto& [id, c] : rec.per_candidate) {
    per[std::to_string(id)] = {
        {"valid", c.valid},
        {"failure_reason", c.failure_reason ? Json(to_string(*c.failure_reason)) : Json()},
        {"collision_step", c.collision_step ? Json(*c.collision_step) : Json()},
        {"seed", c.seed}};
  }
  Json j = {{"scene_id", rec.scene_id},
            {"candidates", rec.candidates},
            {"s_coll", rec.s_coll},
            {"per_candidate", per}};
  if (!rec.errors.empty()) {
    Json errs = Json::object();
    for (const auto& [id, msg] : rec.errors) errs[std::to_string(id)] = msg;
    j["errors"] = errs;
  }
  return j;
}

AnnotationRecord annotation_from_json(const Json& j) {
  AnnotationRecord rec;
  rec.scene_id = field<std::string>(j, "scene_id");
  rec.candidates = field<std::set<int>>(j, "candidates");
  rec.s_coll = field<std::set<int>>(j, "s_coll");
  const Json per = field<Json>(j, "per_candidate");
  for (const auto& [key, v] : per.items()) {
    CandidateSummary c;
    c.valid = field<bool>(v, "valid");
    if (v.contains("failure_reason") && !v.at("failure_reason").is_null()) {
      c.failure_reason = failure_reason_from_string(field<std::string>(v, "failure_reason"));
    }
    if (v.contains("collision_step") && !v.at("collision_step").is_null()) {
      c.collision_step = field<int>(v, "collision_step");
    }
    if (v.contains("seed")) c.seed = field<std::uint64_t>(v, "seed");
    rec.per_candidate[std::stoi(key)] = c;
  }
  if (j.contains("errors")) {
    const Json errs = j.at("errors");
    for (const auto& [key, v] : errs.items()) rec.errors[std::stoi(key)] = v.get<std::string>();
  }
  for (int id : rec.s_coll) {
    if (!rec.candidates.count(id)) throw InvalidInput("s_coll is not a subset of candidates");
  }
  return rec;
}

ScenarioFile make_scenario_file(const Scene& scene, const TrajectoryBatch& batch,
                                const std::string& stage_tag, int adv_id) {
  batch.validate();
  ScenarioFile f;
  f.scene_id = scene.scene_id;
  f.frame_rate = 1.0 / batch.dt;
  f.stage_tag = stage_tag;
  f.ego_id = scene.ego().id;
  f.adv_id = adv_id;
  f.map = scene.map;
  const Trajectory& ego = batch.at(f.ego_id);
  for (std::size_t k = 0; k < batch.steps(); ++k) {
    ScenarioFrame fr;
    fr.time = static_cast<double>(k) * batch.dt;
    fr.ego_pose = ego.states[k];
    for (const Trajectory& t : batch.trajectories) {
      const PoseState& s = t.states[k];
      fr.boxes.push_back({t.vehicle_id, s.position.x, s.position.y, s.heading, t.length, t.width,
                          kExportHeight, s.speed});
    }
    f.frames.push_back(std::move(fr));
  }
  return f;
}

TrajectoryBatch scenario_to_batch(const ScenarioFile& file) {
  TrajectoryBatch b;
  b.dt = 1.0 / file.frame_rate;
  if (file.frames.empty()) {
    return b;
  }
  for (const ScenarioBox& box : file.frames.front().boxes) {
    Trajectory t;
    t.vehicle_id = box.id;
    t.dt = b.dt;
    t.length = box.length;
    t.width = box.width;
    b.trajectories.push_back(std::move(t));
  }
  for (const ScenarioFrame& fr : file.frames) {
    if (fr.boxes.size() != b.trajectories.size()) {
      throw InvalidInput("scenario frames disagree on the vehicle set");
    }
    for (std::size_t i = 0; i < fr.boxes.size(); ++i) {
      const ScenarioBox& box = fr.boxes[i];
      if (box.id != b.trajectories[i].vehicle_id) {
        throw InvalidInput("scenario frames disagree on the vehicle order");
      }
      b.trajectories[i].states.push_back({{box.x, box.y}, box.heading, box.speed});
    }
  }
  return b;
}

Json scenario_to_json(const ScenarioFile& f) {
  Json frames = Json::array();
  for (const ScenarioFrame& fr : f.frames) {
    Json boxes = Json::array();
    for (const ScenarioBox& b : fr.boxes) {
      boxes.push_back({{"id", b.id},
                       {"x", b.x},
                       {"y", b.y},
                       {"heading", b.heading},
                       {"length", b.length},
                       {"width", b.width},
                       {"height", b.height},
                       {"speed", b.speed}});
    }
    frames.push_back({{"time", fr.time},
                      {"ego_pose",
                       {{"x", fr.ego_pose.position.x},
                        {"y", fr.ego_pose.position.y},
                        {"heading", fr.ego_pose.heading},
                        {"speed", fr.ego_pose.speed}}},
                      {"boxes", boxes}});
  }
  Json j = {{"scene_id", f.scene_id}, {"frame_rate", f.frame_rate}, {"stage_tag", f.stage_tag},
            {"ego_id", f.ego_id},     {"adv_id", f.adv_id},         {"frames", frames}};
  if (f.map) {
    j["map"] = map_to_json(*f.map);
  }
  return j;
}

ScenarioFile scenario_from_json(const Json& j) {
  ScenarioFile f;
  f.scene_id = field<std::string>(j, "scene_id");
  f.frame_rate = number(j, "frame_rate");
  if (!(f.frame_rate > 0.0)) throw InvalidInput("frame_rate must be positive");
  f.stage_tag = field<std::string>(j, "stage_tag");
  if (f.stage_tag != "collision" && f.stage_tag != "evasion" && f.stage_tag != "origin") {
    throw InvalidInput("unknown stage_tag '" + f.stage_tag + "'");
  }
  f.ego_id = field<int>(j, "ego_id");
  f.adv_id = field<int>(j, "adv_id");
  double last_time = -std::numeric_limits<double>::infinity();
  const Json frames = field<Json>(j, "frames");
  for (const Json& jf : frames) {
    ScenarioFrame fr;
    fr.time = number(jf, "time");
    if (!(fr.time > last_time)) throw InvalidInput("frame timestamps must increase");
    last_time = fr.time;
    const Json pose = field<Json>(jf, "ego_pose");
    fr.ego_pose = {{number(pose, "x"), number(pose, "y")}, number(pose, "heading"),
                   number(pose, "speed")};
    const Json boxes = field<Json>(jf, "boxes");
    for (const Json& jb : boxes) {
      ScenarioBox b;
      b.id = field<int>(jb, "id");
      b.x = number(jb, "x");
      b.y = number(jb, "y");
      b.heading = number(jb, "heading");
      b.length = number(jb, "length");
      b.width = number(jb, "width");
      b.height = number(jb, "height");
      b.speed = number(jb, "speed");
      fr.boxes.push_back(b);
    }
    f.frames.push_back(std::move(fr));
  }
  if (j.contains("map")) {
    f.map = map_from_json(j.at("map"));
  }
  return f;
}

std::string serialize_scenario(const ScenarioFile& file) {
  return dump_json(scenario_to_json(file));
}

ScenarioFile parse_scenario(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("scenario is not valid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

Json realism_stats_to_json(const RealismStats& stats) {
  static const char* kNames[] = {"long_accel", "lat_accel", "jerk"};
  Json j = Json::object();
  for (std::size_t f = 0; f < stats.features.size(); ++f) {
    const Histogram& h = stats.features[f];
    j[kNames[f]] = {{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}};
  }
  return j;
}

RealismStats realism_stats_from_json(const Json& j) {
  static const char* kNames[] = {"long_accel", "lat_accel", "jerk"};
  RealismStats s = empty_realism_stats();
  for (std::size_t f = 0; f < s.features.size(); ++f) {
    const Json h = field<Json>(j, kNames[f]);
    const auto counts = field<std::vector<double>>(h, "counts");
    if (number(h, "lo") != s.features[f].lo || number(h, "hi") != s.features[f].hi ||
        counts.size() != s.features[f].counts.size()) {
      throw InvalidInput(std::string("realism reference grid mismatch for ") + kNames[f]);
    }
    s.features[f].counts = counts;
  }
  return s;
}

Json metrics_report_to_json(const MetricsReport& rep) {
  Json per = Json::object();
  for (const auto& [id, b] : rep.per_scene) {
    per[id] = {{"candidates", b.candidates},
               {"valid_collisions", b.valid_collisions},
               {"evasions", b.evasions}};
  }
  return {{"CSR", rep.csr},
          {"ESR", rep.esr},
          {"collision_rate", rep.collision_rate},
          {"off_road_rate", rep.off_road_rate},
          {"realism", rep.realism},
          {"closest_distance", rep.closest_distance_mean},
          {"per_scene", per}};
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const ScenarioFile& file, int stride) {
  if (stride < 1) {
    throw InvalidInput("render stride must be >= 1");
  }
  constexpr double kScale = 4.0;  // px per meter
  constexpr double kMargin = 5.0;
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  const auto grow = [&](double x, double y) {
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  };
  if (file.map) {
    for (const Polygon& p : file.map->drivable_polygons())
      for (const Vec2& v : p.vertices()) grow(v.x, v.y);
  }
  for (const ScenarioFrame& fr : file.frames)
    for (const ScenarioBox& b : fr.boxes) grow(b.x, b.y);
  if (!(x1 >= x0)) {
    x0 = y0 = 0.0;
    x1 = y1 = 1.0;
  }
  x0 -= kMargin;
  y0 -= kMargin;
  x1 += kMargin;
  y1 += kMargin;
  const auto px = [&](Vec2 p) { return fmt((p.x - x0) * kScale) + "," + fmt((y1 - p.y) * kScale); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt((x1 - x0) * kScale)
    << "\" height=\"" << fmt((y1 - y0) * kScale) << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"#3a3a3a\"/>\n";
  if (file.map) {
    for (const Polygon& p : file.map->drivable_polygons()) {
      o << "<polygon class=\"road\" fill=\"#d8d8d8\" points=\"";
      for (std::size_t i = 0; i < p.vertices().size(); ++i) {
        o << (i ? " " : "") << px(p.vertices()[i]);
      }
      o << "\"/>\n";
    }
  }
  for (std::size_t k = 0; k < file.frames.size(); k += static_cast<std::size_t>(stride)) {
    for (const ScenarioBox& b : file.frames[k].boxes) {
      const OrientedBox box({b.x, b.y}, b.heading, b.length, b.width);
      const bool ego = b.id == file.ego_id;
      const bool adv = !ego && b.id == file.adv_id;
      const char* cls = ego ? "vehicle ego" : adv ? "vehicle adv" : "vehicle";
      const char* fill = ego ? "#1f77b4" : adv ? "#d62728" : "#7f7f7f";
      o << "<polygon class=\"" << cls << "\" data-frame=\"" << k << "\" fill=\"" << fill
        << "\" fill-opacity=\"0.5\" stroke=\"black\" stroke-width=\"0.5\" points=\"";
      const auto corners = box.corners();
      for (std::size_t i = 0; i < corners.size(); ++i) o << (i ? " " : "") << px(corners[i]);
      o << "\"/>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace evasim
