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
#include <functional>
#include <set>
#include <vector>

#include "evasim/guidance.hpp"
#include "evasim/random.hpp"
#include "evasim/scene.hpp"

namespace evasim {

struct Action {
  double accel = 0.0;     // m/s^2
  double yaw_rate = 0.0;  // rad/s
};

struct ActionLimits {
  double accel_max = 6.0;
  double yaw_rate_max = 1.0;
  double speed_max = 20.0;
};

struct ActionSequence {
  int vehicle_id = 0;
  double dt = 0.1;
  std::vector<Action> actions;

  bool within(const ActionLimits& limits) const;
};

struct PriorConfig {
  int horizon = 20;
  double dt = 0.1;
  int population = 32;
  int refine_iters = 10;
  double step_size = 0.05;
  /// Per-iteration noise multipliers; empty selects the default geometric
  /// schedule (see default_noise_schedule).
  std::vector<double> noise_schedule;
  ActionLimits limits;
  /// Standard deviations of the zero-mean prior perturbations.
  double accel_sigma = 0.5;
  double yaw_rate_sigma = 0.03;

  void validate() const;
  std::vector<double> resolved_noise_schedule() const;
};

/// start, start/2, start/4, ... ending in an exact 0 at the last iteration.
std::vector<double> default_noise_schedule(int iters, double start = 0.5);

/// Forward-Euler unicycle. Returns the states after each action (the input
/// state itself is not included). Speed is clamped to [0, speed_max].
Trajectory rollout_kinematics(const VehicleState& state, const ActionSequence& actions,
                              double speed_max = ActionLimits{}.speed_max);

/// Vector-Jacobian product of rollout_kinematics: maps per-state pose
/// gradients to per-action gradients. Clamped speed updates pass no gradient.
std::vector<Action> rollout_vjp(const VehicleState& state, const ActionSequence& actions,
                                const Trajectory& rolled, const std::vector<PoseGrad>& pose_grad,
                                double speed_max = ActionLimits{}.speed_max);

/// Zero-mean Gaussian perturbations around (0, 0), clamped to the limits.
ActionSequence sample_prior_actions(const VehicleState& state, const PriorConfig& cfg, Rng& rng);

using LossFn = std::function<LossResult(const TrajectoryBatch&)>;

struct RefineResult {
  /// Horizon-length batch, one trajectory per scene vehicle in scene order.
  TrajectoryBatch batch;
  std::vector<ActionSequence> actions;  // controlled vehicles, scene order
  double loss = 0.0;
  std::vector<double> member_losses;
};

/// Population-based guided refinement of the controlled vehicles' actions.
///
/// Every member starts from a prior sample and takes refine_iters gradient
/// steps on the stage loss. Steps are taken in action space scaled by the
/// limits; each vehicle's gradient block is normalized by its max-norm so
/// step_size bounds the per-iteration change of any action component (as a
/// fraction of its limit). Noise from the schedule is injected only into
/// blocks with nonzero gradient. Non-controlled vehicles follow `frozen`
/// (which must cover them for at least `horizon` steps) and get no update.
/// The member with the lowest final loss is returned.
RefineResult guided_refine(const Scene& scene, const std::set<int>& controlled_ids,
                           const TrajectoryBatch* frozen, const LossFn& loss,
                           const PriorConfig& cfg, Rng& rng);

}  // namespace evasim
