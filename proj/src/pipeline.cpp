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

#include "evasim/pipeline.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "evasim/errors.hpp"

namespace evasim {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

const TrajectoryBatch& CandidateRun::final_batch() const {
  return evasion ? evasion->trajectories : collision.trajectories;
}

CandidateRun run_candidate(const Scene& scene, int adv_id, const SimConfig& cfg) {
  CandidateRun run;
  run.scene_id = scene.scene_id;
  run.adv_id = adv_id;
  run.seed = candidate_seed(cfg.seed, adv_id);
  SimConfig c = cfg;
  c.seed = run.seed;
  try {
    run.collision = run_collision_stage(scene, adv_id, c);
    if (run.collision.valid) {
      run.evasion = run_evasion_stage(scene, run.collision, c);
    }
  } catch (const Error& e) {
    run.error = e.what();
  }
  return run;
}

std::vector<CandidateRun> run_candidates(const std::vector<Scene>& scenes, const SimConfig& cfg,
                                         double D, int jobs) {
  std::vector<std::pair<std::size_t, int>> work;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    for (int id : candidates_within(scenes[s], D)) {
      work.emplace_back(s, id);
    }
  }
  std::vector<CandidateRun> out(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    out[i] = run_candidate(scenes[work[i].first], work[i].second, cfg);
  });
  return out;
}

TrajectoryBatch origin_rollout(const Scene& scene, const SimConfig& cfg) {
  GuidanceConfig g;
  g.alpha = 0.0;
  g.beta = 0.0;
  g.gamma = 0.0;
  g.lambda_decay = cfg.guidance.lambda_decay;
  g.v_th = cfg.guidance.v_th;
  g.grid = cfg.guidance.grid;
  g.stage = Stage::kEvasion;
  g.mask_policy = MaskPolicy::kAllPairs;
  g.ego_id = scene.ego().id;
  g.adv_id = g.ego_id + 1;
  std::set<int> all;
  for (const VehicleState& v : scene.vehicles) all.insert(v.id);
  return closed_loop_rollout(scene, all, nullptr, g, cfg);
}

MetricsReport build_report(const std::vector<Scene>& scenes, const std::vector<CandidateRun>& runs,
                           const RealismStats& reference, const SimConfig& cfg) {
  std::map<std::string, const Scene*> by_id;
  for (const Scene& s : scenes) by_id[s.scene_id] = &s;

  MetricsReport rep;
  std::vector<CollisionOutcome> collisions;
  std::vector<EvasionOutcome> evasions;
  std::vector<AdversaryRun> adversaries;
  std::vector<TrajectoryBatch> finals;
  double closest_sum = 0.0;
  for (const CandidateRun& r : runs) {
    SceneBreakdown& b = rep.per_scene[r.scene_id];
    ++b.candidates;
    if (!r.ok()) {
      continue;
    }
    const auto it = by_id.find(r.scene_id);
    if (it == by_id.end()) {
      throw InvalidInput("run references unknown scene '" + r.scene_id + "'");
    }
    collisions.push_back(r.collision);
    if (r.evasion) {
      ++b.valid_collisions;
      b.evasions += r.evasion->success ? 1 : 0;
      evasions.push_back(*r.evasion);
    }
    adversaries.push_back({r.final_batch(), r.collision.ego_id, r.adv_id, it->second->map});
    finals.push_back(r.final_batch());
    closest_sum += closest_distance(r.collision.trajectories, r.collision.ego_id, r.adv_id);
  }
  rep.csr = collision_success_rate(collisions);
  rep.esr = evasion_success_rate(evasions);
  rep.collision_rate = trajectory_collision_rate(adversaries);
  rep.off_road_rate = off_road_rate(adversaries, cfg.guidance.grid, cfg.offroad_steps);
  rep.realism = finals.empty() ? 0.0 : realism_distance(finals, reference);
  rep.closest_distance_mean =
      collisions.empty() ? 0.0 : closest_sum / static_cast<double>(collisions.size());
  return rep;
}

}  // namespace evasim
