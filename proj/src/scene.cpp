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

#include "evasim/scene.hpp"

#include <set>

#include "evasim/errors.hpp"

namespace evasim {

double center_distance(const VehicleState& a, const VehicleState& b) {
  return distance(a.position, b.position);
}

void Scene::validate() {
  if (scene_id.empty()) {
    throw InvalidInput("scene_id must be nonempty");
  }
  int egos = 0;
  std::set<int> ids;
  for (VehicleState& v : vehicles) {
    if (!ids.insert(v.id).second) {
      throw InvalidInput("duplicate vehicle id " + std::to_string(v.id));
    }
    if (!(v.length > 0.0) || !(v.width > 0.0)) {
      throw InvalidInput("vehicle " + std::to_string(v.id) + " has non-positive dimensions");
    }
    if (!(v.speed >= 0.0) || !std::isfinite(v.speed)) {
      throw InvalidInput("vehicle " + std::to_string(v.id) + " has invalid speed");
    }
    if (!std::isfinite(v.position.x) || !std::isfinite(v.position.y) ||
        !std::isfinite(v.heading) || !std::isfinite(v.length) || !std::isfinite(v.width)) {
      throw InvalidInput("vehicle " + std::to_string(v.id) + " has non-finite state");
    }
    v.heading = normalize_angle(v.heading);
    egos += v.is_ego ? 1 : 0;
  }
  if (egos != 1) {
    throw InvalidInput("scene must contain exactly one ego vehicle");
  }
}

const VehicleState& Scene::ego() const {
  for (const VehicleState& v : vehicles) {
    if (v.is_ego) {
      return v;
    }
  }
  throw InvalidInput("scene has no ego vehicle");
}

const VehicleState* Scene::find(int id) const {
  for (const VehicleState& v : vehicles) {
    if (v.id == id) {
      return &v;
    }
  }
  return nullptr;
}

const VehicleState& Scene::at(int id) const {
  if (const VehicleState* v = find(id)) {
    return *v;
  }
  throw MissingVehicle(id);
}

std::optional<std::size_t> TrajectoryBatch::index_of(int vehicle_id) const {
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    if (trajectories[i].vehicle_id == vehicle_id) {
      return i;
    }
  }
  return std::nullopt;
}

const Trajectory& TrajectoryBatch::at(int vehicle_id) const {
  if (auto idx = index_of(vehicle_id)) {
    return trajectories[*idx];
  }
  throw MissingVehicle(vehicle_id);
}

void TrajectoryBatch::validate() const {
  if (!(dt > 0.0)) {
    throw InvalidInput("batch dt must be positive");
  }
  for (const Trajectory& t : trajectories) {
    if (t.dt != dt) {
      throw InvalidInput("trajectory dt differs from batch dt");
    }
    if (t.states.empty() || t.size() != steps()) {
      throw InvalidInput("trajectories must be nonempty and share a step count");
    }
  }
}

VehicleState state_at(const Trajectory& traj, std::size_t step, bool is_ego) {
  const PoseState& s = traj.states.at(step);
  return VehicleState{traj.vehicle_id, s.position, s.heading, s.speed,
                      traj.length,     traj.width, is_ego};
}

}  // namespace evasim
