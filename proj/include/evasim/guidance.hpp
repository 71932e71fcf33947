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

#include <vector>

#include "evasim/geometry.hpp"
#include "evasim/map_model.hpp"
#include "evasim/scene.hpp"

namespace evasim {

enum class Stage { kCollision, kEvasion };

enum class MaskPolicy {
  kExcludeEgoAdvPair,  // every pair except {ego, adv}
  kAllPairs,
};

/// Weights and thresholds for one evaluation of the guidance losses.
struct GuidanceConfig {
  double alpha = 1.0;
  double beta = 50.0;
  double gamma = 1.0;
  double lambda_decay = 0.9;
  double v_th = 0.1;
  Stage stage = Stage::kCollision;
  MaskPolicy mask_policy = MaskPolicy::kExcludeEgoAdvPair;
  int adv_id = -1;
  int ego_id = 0;
  bool collided = false;
  FootprintGrid grid{};

  /// Throws InvalidInput on negative weights, lambda outside [0,1],
  /// non-positive v_th or adv_id == ego_id.
  void validate() const;
};

struct StageWeights {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Run-level guidance settings shared by both simulation stages.
struct GuidanceParams {
  double lambda_decay = 0.9;
  double v_th = 0.1;
  FootprintGrid grid{};
  StageWeights collision{1.0, 50.0, 1.0};
  StageWeights evasion{0.0, 1.0, 1.0};  // alpha unused in the evasion stage

  GuidanceConfig for_stage(Stage stage, int ego_id, int adv_id) const;
};

/// Gradient of a scalar with respect to one pose sample.
struct PoseGrad {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

/// Scalar loss plus its gradient laid out as [vehicle index in batch][step].
struct LossResult {
  double value = 0.0;
  std::vector<std::vector<PoseGrad>> grad;

  static LossResult zeros(const TrajectoryBatch& batch);
  /// this += weight * other (value and gradient).
  void add_scaled(const LossResult& other, double weight);
};

/// w[t] = lambda^t / sum_{k<T} lambda^k for t = 0..T-1, with 0^0 = 1.
std::vector<double> decay_weights(int horizon, double lambda);

/// Pulls the adversary's center toward the ego's while the two are farther
/// apart than their penalty distance. Ego positions are treated as constants.
LossResult adversarial_loss(const TrajectoryBatch& batch, const GuidanceConfig& cfg);

/// Ordered-pair repulsion between vehicles closer than their penalty
/// distance. Only the first vehicle of each pair receives gradient, and only
/// while it is moving faster than v_th.
LossResult no_collision_loss(const TrajectoryBatch& batch, const GuidanceConfig& cfg);

/// Penalizes footprint samples outside the drivable area for moving vehicles.
///
/// Each off-road sample p contributes (1 - |p - q| / l_diag), where q is the
/// nearest on-road sample of the same footprint. The off-road sample is held
/// constant and the gradient flows through the on-road anchor q, so a descent
/// step translates the box from p toward q. When no sample of the footprint
/// is on-road, q falls back to the nearest drivable boundary point, the term
/// is clamped at zero and carries no gradient.
LossResult on_road_loss(const TrajectoryBatch& batch, const MapModel& map,
                        const GuidanceConfig& cfg);

/// alpha * adversarial + beta * no-collision + gamma * on-road, with the
/// ego/adversary pair masked out of the no-collision term.
LossResult collision_stage_loss(const TrajectoryBatch& batch, const MapModel& map,
                                const GuidanceConfig& cfg);

/// beta * no-collision + gamma * on-road over all pairs.
LossResult evasion_stage_loss(const TrajectoryBatch& batch, const MapModel& map,
                              const GuidanceConfig& cfg);

/// Dispatches on cfg.stage.
LossResult stage_loss(const TrajectoryBatch& batch, const MapModel& map, const GuidanceConfig& cfg);

}  // namespace evasim
