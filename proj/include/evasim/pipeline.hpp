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
#include <optional>
#include <string>
#include <vector>

#include "evasim/metrics.hpp"
#include "evasim/selection.hpp"
#include "evasim/simulation.hpp"

namespace evasim {

/// Runs fn(0..n-1) on up to `jobs` threads (jobs <= 0: hardware concurrency).
/// Every index runs exactly once; the first exception is rethrown after all
/// workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Collision stage plus, when valid, the evasion stage for one adversary.
struct CandidateRun {
  std::string scene_id;
  int adv_id = 0;
  std::uint64_t seed = 0;
  CollisionOutcome collision;
  std::optional<EvasionOutcome> evasion;
  std::string error;  // nonempty when the simulation raised

  bool ok() const { return error.empty(); }
  /// Evasion batch when the collision was valid, the collision batch otherwise.
  const TrajectoryBatch& final_batch() const;
};

/// Uses seed candidate_seed(cfg.seed, adv_id).
CandidateRun run_candidate(const Scene& scene, int adv_id, const SimConfig& cfg);

/// Every candidate within D of every scene, in scene then id order.
std::vector<CandidateRun> run_candidates(const std::vector<Scene>& scenes, const SimConfig& cfg,
                                         double D, int jobs);

/// Closed-loop rollout of all vehicles with every guidance weight at zero.
TrajectoryBatch origin_rollout(const Scene& scene, const SimConfig& cfg);

/// Aggregates candidate runs. `scenes` must contain every run's scene.
MetricsReport build_report(const std::vector<Scene>& scenes, const std::vector<CandidateRun>& runs,
                           const RealismStats& reference, const SimConfig& cfg);

}  // namespace evasim
