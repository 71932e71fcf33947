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

// Independent reference implementations used only by the tests. None of them
// call the library routine they are checking.

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "evasim/guidance.hpp"
#include "evasim/map_model.hpp"
#include "evasim/scene.hpp"
#include "evasim/simulation.hpp"

namespace oracle {

using evasim::Vec2;

/// Overlap decided by sampling both rectangles on a `step` grid (edges
/// included) and testing containment in the other rectangle.
bool sampled_overlap(const evasim::OrientedBox& a, const evasim::OrientedBox& b,
                     double step = 0.01);

/// Boundary-inclusive point-in-polygon by ray casting plus an explicit
/// on-segment check, over the union of polygons.
bool ray_cast_on_road(const std::vector<std::vector<Vec2>>& polygons, Vec2 p);

/// Loss values written straight from the formulas. `live` supplies the
/// quantities that carry gradient, `detached` the ones held constant, so a
/// finite difference on `live` reproduces the analytic gradient convention.
double adversarial_value(const evasim::TrajectoryBatch& live,
                         const evasim::TrajectoryBatch& detached,
                         const evasim::GuidanceConfig& cfg);
double no_collision_value(const evasim::TrajectoryBatch& live,
                          const evasim::TrajectoryBatch& detached,
                          const evasim::GuidanceConfig& cfg);
/// Off-road samples and the on/off partition come from `detached`; the
/// on-road anchor position comes from `live`.
double on_road_value(const evasim::TrajectoryBatch& live, const evasim::TrajectoryBatch& detached,
                     const evasim::MapModel& map, const evasim::GuidanceConfig& cfg);

/// Central differences of f over every (vehicle, step, x/y/heading) of the batch.
std::vector<std::vector<evasim::PoseGrad>> central_difference(
    const evasim::TrajectoryBatch& base,
    const std::function<double(const evasim::TrajectoryBatch&)>& f, double h = 1e-4);

/// Max over entries of |a - b| / max(|a|, |b|, floor).
double max_relative_error(const std::vector<std::vector<evasim::PoseGrad>>& a,
                          const std::vector<std::vector<evasim::PoseGrad>>& b,
                          double floor = 1e-6);

/// Smallest distance from any indicator threshold in the batch (center
/// distances vs penalty distances, speeds vs v_th).
double indicator_margin(const evasim::TrajectoryBatch& batch, const evasim::GuidanceConfig& cfg);
/// Smallest distance of any footprint sample from a polygon edge, and the
/// gap between the nearest and second-nearest on-road anchor.
double on_road_margin(const evasim::TrajectoryBatch& batch, const evasim::MapModel& map,
                      const evasim::GuidanceConfig& cfg);

/// Random batch of n vehicles over T steps inside a 20 m square.
evasim::TrajectoryBatch random_batch(std::mt19937_64& rng, int n, int T);

/// Random instance generator plus analytic-vs-central-difference comparison
/// for one loss. Instances closer than `margin` to an indicator or on-road
/// boundary are redrawn.
enum class LossKind { kAdversarial, kNoCollision, kOnRoad };

struct GradCheck {
  double max_rel_error = 0.0;
  int redrawn = 0;
  bool nonzero = false;  // analytic gradient had a nonzero entry
};

GradCheck check_gradient(LossKind kind, std::mt19937_64& rng, double margin = 1e-3);

/// Map used by the on-road gradient checks: a convex corridor, a rotated
/// convex strip and a non-convex L.
evasim::MapModel gradient_map();

/// Brute force over piecewise-constant adversary actions. Every other vehicle
/// drives at constant velocity from its initial state. Feasible iff some
/// sequence makes the adversary overlap the ego strictly before it overlaps
/// anyone else or starts an off-road run.
struct Reach {
  bool feasible = false;
  int step = -1;
};
Reach adversary_reachability(const evasim::Scene& scene, int adv_id,
                             const evasim::SimConfig& cfg, int segments = 3);

/// Brute force over piecewise-constant ego actions against frozen
/// trajectories: can the ego avoid every overlap and stay on-road?
bool ego_can_escape(const evasim::Scene& scene, const evasim::TrajectoryBatch& frozen,
                    const evasim::SimConfig& cfg, int segments = 3);

}  // namespace oracle
