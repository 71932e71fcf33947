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

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "evasim/guidance.hpp"
#include "evasim/motion_prior.hpp"
#include "evasim/scene.hpp"

namespace evasim {

struct SimConfig {
  int total_steps = 90;  // 9 s at 0.1 s
  int apply_steps = 5;   // committed steps per re-plan
  /// Consecutive steps with any footprint sample off-road that count as
  /// leaving the drivable area.
  int offroad_steps = 3;
  PriorConfig prior;
  GuidanceParams guidance;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class FailureReason { kNoCollision, kHitOtherFirst, kOffRoadFirst };

std::string to_string(FailureReason r);
FailureReason failure_reason_from_string(const std::string& s);

/// Committed simulation batches hold total_steps + 1 states per vehicle;
/// index 0 is the initial scene.
struct CollisionOutcome {
  bool valid = false;
  int ego_id = 0;
  int adv_id = 0;
  TrajectoryBatch trajectories;
  std::optional<int> collision_step;
  std::optional<FailureReason> failure_reason;
};

struct EvasionOutcome {
  bool success = false;
  int ego_id = 0;
  int adv_id = 0;
  TrajectoryBatch trajectories;
  double min_ego_adv_distance = 0.0;
};

struct CollisionEvent {
  int step = 0;
  int id_a = 0;  // id_a < id_b
  int id_b = 0;
  friend bool operator==(const CollisionEvent&, const CollisionEvent&) = default;
};

/// Closed-loop simulation: re-plan with guided_refine from the current state,
/// commit the first apply_steps steps of every controlled vehicle, advance
/// frozen vehicles along `frozen`, repeat until total_steps are committed.
/// The collided flag latches after the first adv/ego overlap.
TrajectoryBatch closed_loop_rollout(const Scene& scene, const std::set<int>& controlled_ids,
                                    const TrajectoryBatch* frozen, const GuidanceConfig& guidance,
                                    const SimConfig& cfg);

/// Earliest overlapping pair; ties broken by smallest (id_a, id_b). With a
/// pair filter only that unordered pair is considered.
std::optional<CollisionEvent> first_collision_event(
    const TrajectoryBatch& batch, std::optional<std::pair<int, int>> pair_filter = std::nullopt);

/// First step of the first run of `consecutive` steps in which any footprint
/// sample lies off-road.
std::optional<int> offroad_onset(const Trajectory& traj, const MapModel& map, FootprintGrid grid,
                                 int consecutive);

/// Validity filter for a collision-stage batch: valid iff adv overlaps ego
/// strictly before it overlaps anyone else and before it leaves the road.
CollisionOutcome classify_collision(const TrajectoryBatch& batch, const MapModel& map, int ego_id,
                                    int adv_id, const SimConfig& cfg);

CollisionOutcome run_collision_stage(const Scene& scene, int adv_id, const SimConfig& cfg);

EvasionOutcome run_evasion_stage(const Scene& scene, const CollisionOutcome& collision,
                                 const SimConfig& cfg);

/// Minimum center distance between two vehicles over all steps.
double min_center_distance(const TrajectoryBatch& batch, int id_a, int id_b);

}  // namespace evasim
