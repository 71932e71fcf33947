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

#include "evasim/geometry.hpp"
#include "evasim/map_model.hpp"

namespace evasim {

/// Kinematic state of one vehicle at a single frame. Speed is a scalar along
/// the heading; there is no lateral slip.
struct VehicleState {
  int id = 0;
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;
  double length = 4.5;
  double width = 2.0;
  bool is_ego = false;

  OrientedBox box() const { return OrientedBox(position, heading, length, width); }
};

double center_distance(const VehicleState& a, const VehicleState& b);

struct Scene {
  std::string scene_id;
  std::vector<VehicleState> vehicles;
  MapModel map;
  double timestamp = 0.0;

  /// Throws InvalidInput when an invariant (single ego, unique ids, positive
  /// dims, non-negative speed, nonempty id) is broken. Normalizes headings.
  void validate();

  const VehicleState& ego() const;
  const VehicleState* find(int id) const;
  const VehicleState& at(int id) const;
};

/// One timed pose sample.
struct PoseState {
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;

  friend bool operator==(const PoseState&, const PoseState&) = default;
};

struct Trajectory {
  int vehicle_id = 0;
  double dt = 0.1;
  double length = 4.5;
  double width = 2.0;
  std::vector<PoseState> states;

  std::size_t size() const { return states.size(); }
  OrientedBox box_at(std::size_t step) const {
    const PoseState& s = states[step];
    return OrientedBox(s.position, s.heading, length, width);
  }
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Trajectories of several vehicles on a shared time grid.
struct TrajectoryBatch {
  double dt = 0.1;
  std::vector<Trajectory> trajectories;

  std::size_t steps() const { return trajectories.empty() ? 0 : trajectories.front().size(); }
  std::optional<std::size_t> index_of(int vehicle_id) const;
  const Trajectory& at(int vehicle_id) const;
  /// Throws InvalidInput if members disagree on dt or step count.
  void validate() const;

  friend bool operator==(const TrajectoryBatch&, const TrajectoryBatch&) = default;
};

/// Snapshot of a trajectory sample as a VehicleState.
VehicleState state_at(const Trajectory& traj, std::size_t step, bool is_ego = false);

}  // namespace evasim
