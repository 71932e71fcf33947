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

#include "evasim/templates.hpp"

#include <algorithm>
#include <numbers>

#include "evasim/errors.hpp"

namespace evasim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfLane = 0.5 * kLaneWidth;

VehicleState car(int id, double x, double y, double heading, double speed, bool ego = false) {
  VehicleState v;
  v.id = id;
  v.position = {x, y};
  v.heading = heading;
  v.speed = speed;
  v.length = 4.5;
  v.width = 2.0;
  v.is_ego = ego;
  return v;
}

void add_background(Scene& s, const std::vector<VehicleState>& pool, int count) {
  for (int i = 0; i < count && i < static_cast<int>(pool.size()); ++i) {
    VehicleState v = pool[static_cast<std::size_t>(i)];
    v.id = 2 + i;
    s.vehicles.push_back(v);
  }
}

Scene head_on(const TemplateParams& p) {
  Scene s;
  s.map = MapModel({rect_polygon(-80.0, -kLaneWidth, 160.0, kLaneWidth)});
  s.vehicles.push_back(car(0, 0.0, -kHalfLane, 0.0, p.ego_speed, true));
  s.vehicles.push_back(car(1, p.gap, -kHalfLane + p.lateral_offset, kPi, p.adv_speed));
  add_background(s,
                 {car(0, -10.0, -kHalfLane, 0.0, p.ego_speed),
                  car(0, p.gap + 12.0, kHalfLane, kPi, p.adv_speed),
                  car(0, -22.0, -kHalfLane, 0.0, p.ego_speed)},
                 p.background);
  return s;
}

Scene cut_in(const TemplateParams& p) {
  Scene s;
  s.map = MapModel({rect_polygon(-80.0, -kLaneWidth, 200.0, kLaneWidth)});
  s.vehicles.push_back(car(0, 0.0, -kHalfLane, 0.0, p.ego_speed, true));
  s.vehicles.push_back(car(1, p.gap, kHalfLane + p.lateral_offset, 0.0, p.adv_speed));
  add_background(s,
                 {car(0, p.gap + 11.0, kHalfLane, 0.0, p.adv_speed),
                  car(0, -12.0, -kHalfLane, 0.0, p.ego_speed),
                  car(0, p.gap - 11.0, kHalfLane, 0.0, p.adv_speed)},
                 p.background);
  return s;
}

Scene rear_approach(const TemplateParams& p) {
  Scene s;
  s.map = MapModel({rect_polygon(-100.0, -kLaneWidth, 200.0, kLaneWidth)});
  s.vehicles.push_back(car(0, 0.0, -kHalfLane, 0.0, p.ego_speed, true));
  s.vehicles.push_back(car(1, -p.gap, -kHalfLane + p.lateral_offset, 0.0, p.adv_speed));
  add_background(s,
                 {car(0, -p.gap + 3.0, kHalfLane, 0.0, p.ego_speed),
                  car(0, 22.0, -kHalfLane, 0.0, p.ego_speed),
                  car(0, -p.gap - 10.0, kHalfLane, 0.0, p.ego_speed)},
                 p.background);
  return s;
}

Scene wall(const TemplateParams& p) {
  Scene s;
  const double far_lo = kLaneWidth + p.strip_width;
  s.map = MapModel({rect_polygon(-80.0, -kLaneWidth, 200.0, kLaneWidth),
                    rect_polygon(-80.0, far_lo, 200.0, far_lo + 2.0 * kLaneWidth)});
  s.vehicles.push_back(car(0, 0.0, -kHalfLane, 0.0, p.ego_speed, true));
  s.vehicles.push_back(car(1, p.gap, far_lo + kHalfLane + p.lateral_offset, 0.0, p.adv_speed));
  add_background(s,
                 {car(0, -12.0, -kHalfLane, 0.0, p.ego_speed),
                  car(0, p.gap - 12.0, far_lo + 3.0 * kHalfLane, 0.0, p.adv_speed)},
                 p.background);
  return s;
}

Scene boxed_in(const TemplateParams& p) {
  Scene s;
  const double half = 1.5 * kLaneWidth;
  const double gap = std::min(p.gap, kBoxedInMaxGap);
  s.map = MapModel({rect_polygon(-80.0, -half, 200.0, half)});
  s.vehicles.push_back(car(0, 0.0, 0.0, 0.0, p.ego_speed, true));
  s.vehicles.push_back(car(1, p.lateral_offset, kLaneWidth, 0.0, p.adv_speed));
  s.vehicles.push_back(car(2, gap, 0.0, 0.0, p.ego_speed));
  s.vehicles.push_back(car(3, -gap, 0.0, 0.0, p.ego_speed));
  s.vehicles.push_back(car(4, 0.0, -kLaneWidth, 0.0, p.ego_speed));
  for (int i = 0; i < p.background; ++i) {
    s.vehicles.push_back(car(5 + i, -gap - 10.0 * (i + 1), (i % 2 ? -1.0 : 1.0) * kLaneWidth,
                             0.0, p.ego_speed));
  }
  return s;
}

Scene intersection(const TemplateParams& p) {
  Scene s;
  s.map = MapModel({rect_polygon(-100.0, -kLaneWidth, 100.0, kLaneWidth),
                    rect_polygon(-kLaneWidth, -100.0, kLaneWidth, 100.0)});
  // Arrival at the conflict point (kHalfLane, -kHalfLane) is simultaneous
  // when lateral_offset is zero; the offset shifts the ego start along x.
  const double tau = (p.gap - kHalfLane) / p.adv_speed;
  const double ego_x = kHalfLane - p.ego_speed * tau + p.lateral_offset;
  s.vehicles.push_back(car(0, ego_x, -kHalfLane, 0.0, p.ego_speed, true));
  s.vehicles.push_back(car(1, kHalfLane, -p.gap, 0.5 * kPi, p.adv_speed));
  add_background(s,
                 {car(0, -kHalfLane, 30.0, -0.5 * kPi, p.adv_speed),
                  car(0, ego_x - 12.0, -kHalfLane, 0.0, p.ego_speed),
                  car(0, kHalfLane, -p.gap - 12.0, 0.5 * kPi, p.adv_speed)},
                 p.background);
  return s;
}

}  // namespace

std::vector<std::string> template_names() {
  return {"head_on", "cut_in", "rear_approach", "wall", "boxed_in", "intersection"};
}

Scene make_template(const std::string& name, const TemplateParams& params) {
  Scene s;
  if (name == "head_on") {
    s = head_on(params);
  } else if (name == "cut_in") {
    s = cut_in(params);
  } else if (name == "rear_approach") {
    s = rear_approach(params);
  } else if (name == "wall") {
    s = wall(params);
  } else if (name == "boxed_in") {
    s = boxed_in(params);
  } else if (name == "intersection") {
    s = intersection(params);
  } else {
    throw InvalidInput("unknown template '" + name + "'");
  }
  s.scene_id = name;
  s.validate();
  return s;
}

std::vector<Scene> synthetic_suite() {
  struct Variant {
    const char* name;
    TemplateParams p;
  };
  // gap, ego_speed, adv_speed, lateral_offset, strip_width, background
  const std::vector<Variant> variants = {
      {"head_on", {24.0, 6.0, 6.0, 0.0, 6.0, 0}},
      {"head_on", {22.0, 6.0, 7.0, kLaneWidth, 6.0, 0}},
      {"head_on", {25.0, 7.0, 6.0, kLaneWidth, 6.0, 1}},
      {"head_on", {20.0, 5.0, 6.0, 0.8, 6.0, 2}},
      {"head_on", {23.0, 6.0, 8.0, kLaneWidth, 6.0, 3}},
      {"head_on", {18.0, 5.0, 5.0, kLaneWidth, 6.0, 1}},
      {"cut_in", {8.0, 10.0, 9.0, 0.0, 6.0, 0}},
      {"cut_in", {12.0, 9.0, 8.0, 0.0, 6.0, 1}},
      {"cut_in", {15.0, 10.0, 7.0, 0.0, 6.0, 0}},
      {"cut_in", {10.0, 8.0, 8.0, 0.0, 6.0, 2}},
      {"cut_in", {6.0, 9.0, 9.0, 0.0, 6.0, 3}},
      {"cut_in", {18.0, 11.0, 8.0, 0.0, 6.0, 1}},
      {"rear_approach", {15.0, 7.0, 11.0, 0.0, 6.0, 0}},
      {"rear_approach", {20.0, 6.0, 12.0, 0.0, 6.0, 1}},
      {"rear_approach", {12.0, 8.0, 11.0, kLaneWidth, 6.0, 0}},
      {"rear_approach", {18.0, 7.0, 12.0, 0.5, 6.0, 2}},
      {"rear_approach", {24.0, 6.0, 13.0, 0.0, 6.0, 3}},
      {"rear_approach", {10.0, 8.0, 10.0, kLaneWidth, 6.0, 1}},
      {"wall", {5.0, 8.0, 8.0, 0.0, 6.0, 0}},
      {"wall", {0.0, 8.0, 9.0, 0.0, 8.0, 1}},
      {"wall", {10.0, 7.0, 7.0, 0.0, 6.0, 0}},
      {"wall", {-5.0, 8.0, 10.0, 0.0, 10.0, 2}},
      {"wall", {15.0, 9.0, 7.0, kLaneWidth, 6.0, 1}},
      {"wall", {8.0, 8.0, 8.0, kLaneWidth, 7.0, 0}},
      {"boxed_in", {7.0, 8.0, 8.0, 0.0, 6.0, 0}},
      {"boxed_in", {8.0, 9.0, 9.0, 1.0, 6.0, 1}},
      {"boxed_in", {9.0, 7.0, 7.0, -1.0, 6.0, 0}},
      {"boxed_in", {7.5, 8.0, 9.0, 2.0, 6.0, 2}},
      {"boxed_in", {8.5, 10.0, 10.0, 0.0, 6.0, 0}},
      {"boxed_in", {9.5, 6.0, 6.0, -2.0, 6.0, 1}},
      {"intersection", {17.0, 7.0, 7.0, 0.0, 6.0, 0}},
      {"intersection", {16.0, 8.0, 7.0, -3.0, 6.0, 1}},
      {"intersection", {18.0, 6.0, 6.0, 3.0, 6.0, 0}},
      {"intersection", {15.0, 7.0, 8.0, -5.0, 6.0, 2}},
      {"intersection", {17.0, 8.0, 8.0, 4.0, 6.0, 3}},
      {"intersection", {14.0, 6.0, 7.0, -2.0, 6.0, 1}},
  };
  std::vector<Scene> out;
  out.reserve(variants.size());
  int index = 0;
  for (const Variant& v : variants) {
    Scene s = make_template(v.name, v.p);
    s.scene_id = std::string(v.name) + "_" + (index < 10 ? "0" : "") + std::to_string(index);
    out.push_back(std::move(s));
    ++index;
  }
  return out;
}

}  // namespace evasim
