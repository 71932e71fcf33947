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

#include "evasim/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "evasim/errors.hpp"

namespace evasim {

void SimConfig::validate() const {
  prior.validate();
  if (apply_steps < 1 || apply_steps > prior.horizon) {
    throw InvalidInput("apply_steps must lie in [1, horizon]");
  }
  if (total_steps < apply_steps) {
    throw InvalidInput("total_steps must be >= apply_steps");
  }
  if (offroad_steps < 1) {
    throw InvalidInput("offroad_steps must be >= 1");
  }
}

std::string to_string(FailureReason r) {
  switch (r) {
    case FailureReason::kNoCollision:
      return "no_collision";
    case FailureReason::kHitOtherFirst:
      return "hit_other_first";
    case FailureReason::kOffRoadFirst:
      return "off_road_first";
  }
  return "unknown";
}

FailureReason failure_reason_from_string(const std::string& s) {
  if (s == "no_collision") return FailureReason::kNoCollision;
  if (s == "hit_other_first") return FailureReason::kHitOtherFirst;
  if (s == "off_road_first") return FailureReason::kOffRoadFirst;
  throw InvalidInput("unknown failure reason '" + s + "'");
}

namespace {

const PoseState& clamped_state(const Trajectory& t, std::size_t step) {
  return t.states[std::min(step, t.size() - 1)];
}

bool overlap_at(const Trajectory& a, const Trajectory& b, std::size_t step) {
  const PoseState& sa = a.states[step];
  const PoseState& sb = b.states[step];
  const double reach = 0.5 * (std::sqrt(a.length * a.length + a.width * a.width) +
                             std::sqrt(b.length * b.length + b.width * b.width));
  const Vec2 d = sa.position - sb.position;
  if (d.x * d.x + d.y * d.y > reach * reach) {
    return false;
  }
  return obb_overlap(a.box_at(step), b.box_at(step));
}

}  // namespace

TrajectoryBatch closed_loop_rollout(const Scene& scene, const std::set<int>& controlled_ids,
                                    const TrajectoryBatch* frozen, const GuidanceConfig& guidance,
                                    const SimConfig& cfg) {
  cfg.validate();
  const std::size_t total = static_cast<std::size_t>(cfg.total_steps);
  const std::size_t horizon = static_cast<std::size_t>(cfg.prior.horizon);

  TrajectoryBatch out;
  out.dt = cfg.prior.dt;
  std::vector<const Trajectory*> frozen_of(scene.vehicles.size(), nullptr);
  for (std::size_t i = 0; i < scene.vehicles.size(); ++i) {
    const VehicleState& v = scene.vehicles[i];
    if (!controlled_ids.count(v.id)) {
      const std::optional<std::size_t> fi = frozen ? frozen->index_of(v.id) : std::nullopt;
      if (!fi || frozen->trajectories[*fi].size() < total + 1) {
        throw FrozenMismatch("frozen batch must cover vehicle " + std::to_string(v.id) + " for " +
                             std::to_string(total) + " steps");
      }
      frozen_of[i] = &frozen->trajectories[*fi];
    }
    Trajectory t;
    t.vehicle_id = v.id;
    t.dt = cfg.prior.dt;
    t.length = v.length;
    t.width = v.width;
    t.states.reserve(total + 1);
    t.states.push_back({v.position, v.heading, v.speed});
    out.trajectories.push_back(std::move(t));
  }
  for (int id : controlled_ids) {
    if (!scene.find(id)) {
      throw MissingVehicle(id);
    }
  }

  GuidanceConfig g = guidance;
  const std::optional<std::size_t> adv_idx = out.index_of(g.adv_id);
  const std::optional<std::size_t> ego_idx = out.index_of(g.ego_id);
  const auto check_latch = [&](std::size_t step) {
    if (!g.collided && adv_idx && ego_idx &&
        overlap_at(out.trajectories[*adv_idx], out.trajectories[*ego_idx], step)) {
      g.collided = true;
    }
  };
  check_latch(0);

  Rng rng(cfg.seed);
  Scene current = scene;
  TrajectoryBatch window;
  window.dt = cfg.prior.dt;
  std::size_t committed = 0;
  while (committed < total) {
    const std::size_t take = std::min(static_cast<std::size_t>(cfg.apply_steps), total - committed);
    RefineResult refined;
    if (!controlled_ids.empty()) {
      window.trajectories.clear();
      for (std::size_t i = 0; i < scene.vehicles.size(); ++i) {
        if (!frozen_of[i]) {
          continue;
        }
        Trajectory w = *frozen_of[i];
        w.states.clear();
        for (std::size_t k = 1; k <= horizon; ++k) {
          w.states.push_back(clamped_state(*frozen_of[i], committed + k));
        }
        w.dt = cfg.prior.dt;
        window.trajectories.push_back(std::move(w));
      }
      const MapModel& map = scene.map;
      const GuidanceConfig gc = g;
      const LossFn loss = [&map, gc](const TrajectoryBatch& b) { return stage_loss(b, map, gc); };
      refined = guided_refine(current, controlled_ids, &window, loss, cfg.prior, rng);
    }
    for (std::size_t i = 0; i < scene.vehicles.size(); ++i) {
      Trajectory& t = out.trajectories[i];
      for (std::size_t k = 1; k <= take; ++k) {
        t.states.push_back(frozen_of[i] ? frozen_of[i]->states[committed + k]
                                        : refined.batch.trajectories[i].states[k - 1]);
      }
      const PoseState& last = t.states.back();
      current.vehicles[i].position = last.position;
      current.vehicles[i].heading = last.heading;
      current.vehicles[i].speed = last.speed;
    }
    for (std::size_t k = 1; k <= take; ++k) {
      check_latch(committed + k);
    }
    committed += take;
  }
  return out;
}

std::optional<CollisionEvent> first_collision_event(const TrajectoryBatch& batch,
                                                    std::optional<std::pair<int, int>> pair_filter) {
  const std::size_t n = batch.trajectories.size();
  for (std::size_t step = 0; step < batch.steps(); ++step) {
    std::optional<CollisionEvent> best;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Trajectory& a = batch.trajectories[i];
        const Trajectory& b = batch.trajectories[j];
        const int lo = std::min(a.vehicle_id, b.vehicle_id);
        const int hi = std::max(a.vehicle_id, b.vehicle_id);
        if (pair_filter) {
          const int flo = std::min(pair_filter->first, pair_filter->second);
          const int fhi = std::max(pair_filter->first, pair_filter->second);
          if (lo != flo || hi != fhi) {
            continue;
          }
        }
        if (!overlap_at(a, b, step)) {
          continue;
        }
        const CollisionEvent e{static_cast<int>(step), lo, hi};
        if (!best || std::pair(lo, hi) < std::pair(best->id_a, best->id_b)) {
          best = e;
        }
      }
    }
    if (best) {
      return best;
    }
  }
  return std::nullopt;
}

std::optional<int> offroad_onset(const Trajectory& traj, const MapModel& map, FootprintGrid grid,
                                 int consecutive) {
  const std::vector<Vec2> offsets = footprint_offsets(traj.length, traj.width, grid);
  int run = 0;
  for (std::size_t step = 0; step < traj.size(); ++step) {
    const OrientedBox box = traj.box_at(step);
    const std::array<Vec2, 4> corners = box.corners();
    const bool off = !map.convex_cover(corners) && std::any_of(offsets.begin(), offsets.end(), [&](Vec2 o) {
      return !point_on_road(map, box.to_map(o));
    });
    run = off ? run + 1 : 0;
    if (run >= consecutive) {
      return static_cast<int>(step) - consecutive + 1;
    }
  }
  return std::nullopt;
}

CollisionOutcome classify_collision(const TrajectoryBatch& batch, const MapModel& map, int ego_id,
                                    int adv_id, const SimConfig& cfg) {
  const std::size_t adv = batch.index_of(adv_id).value_or(batch.trajectories.size());
  const std::size_t ego = batch.index_of(ego_id).value_or(batch.trajectories.size());
  if (adv == batch.trajectories.size()) throw MissingVehicle(adv_id);
  if (ego == batch.trajectories.size()) throw MissingVehicle(ego_id);

  CollisionOutcome out;
  out.ego_id = ego_id;
  out.adv_id = adv_id;
  out.trajectories = batch;

  constexpr int kNever = std::numeric_limits<int>::max();
  int hit_ego = kNever;
  int hit_other = kNever;
  const Trajectory& ta = batch.trajectories[adv];
  for (std::size_t step = 0; step < batch.steps() && hit_ego == kNever; ++step) {
    if (overlap_at(ta, batch.trajectories[ego], step)) {
      hit_ego = static_cast<int>(step);
    }
  }
  for (std::size_t step = 0; step < batch.steps() && hit_other == kNever; ++step) {
    for (std::size_t j = 0; j < batch.trajectories.size(); ++j) {
      if (j != adv && j != ego && overlap_at(ta, batch.trajectories[j], step)) {
        hit_other = static_cast<int>(step);
        break;
      }
    }
  }
  const int off_road =
      offroad_onset(ta, map, cfg.guidance.grid, cfg.offroad_steps).value_or(kNever);

  if (hit_ego < hit_other && hit_ego < off_road) {
    out.valid = true;
    out.collision_step = hit_ego;
    return out;
  }
  if (hit_other == kNever && off_road == kNever) {
    out.failure_reason = FailureReason::kNoCollision;
  } else if (hit_other <= off_road) {
    out.failure_reason = FailureReason::kHitOtherFirst;
  } else {
    out.failure_reason = FailureReason::kOffRoadFirst;
  }
  if (hit_ego != kNever) {
    out.collision_step = hit_ego;
  }
  return out;
}

CollisionOutcome run_collision_stage(const Scene& scene, int adv_id, const SimConfig& cfg) {
  const int ego_id = scene.ego().id;
  if (!scene.find(adv_id)) {
    throw MissingVehicle(adv_id);
  }
  if (adv_id == ego_id) {
    throw InvalidInput("adversary must not be the ego vehicle");
  }
  const GuidanceConfig g = cfg.guidance.for_stage(Stage::kCollision, ego_id, adv_id);
  g.validate();
  std::set<int> controlled;
  for (const VehicleState& v : scene.vehicles) {
    controlled.insert(v.id);
  }
  const TrajectoryBatch batch = closed_loop_rollout(scene, controlled, nullptr, g, cfg);
  CollisionOutcome out = classify_collision(batch, scene.map, ego_id, adv_id, cfg);
  if (!out.valid) {
    // Only a valid outcome reports its ego/adv collision step.
    out.collision_step.reset();
  }
  return out;
}

EvasionOutcome run_evasion_stage(const Scene& scene, const CollisionOutcome& collision,
                                 const SimConfig& cfg) {
  if (!collision.valid) {
    throw InvalidInput("evasion stage requires a valid collision outcome");
  }
  const int ego_id = scene.ego().id;
  GuidanceConfig g = cfg.guidance.for_stage(Stage::kEvasion, ego_id, collision.adv_id);
  g.validate();
  SimConfig c = cfg;
  c.seed = mix_seed(cfg.seed, 0x65766173696f6eull);
  const TrajectoryBatch batch =
      closed_loop_rollout(scene, {ego_id}, &collision.trajectories, g, c);

  EvasionOutcome out;
  out.ego_id = ego_id;
  out.adv_id = collision.adv_id;
  out.trajectories = batch;
  out.min_ego_adv_distance = min_center_distance(batch, ego_id, collision.adv_id);

  const Trajectory& te = batch.at(ego_id);
  bool hit = false;
  for (std::size_t step = 0; step < batch.steps() && !hit; ++step) {
    for (const Trajectory& other : batch.trajectories) {
      if (other.vehicle_id != ego_id && overlap_at(te, other, step)) {
        hit = true;
        break;
      }
    }
  }
  const bool off = offroad_onset(te, scene.map, cfg.guidance.grid, cfg.offroad_steps).has_value();
  out.success = !hit && !off;
  return out;
}

double min_center_distance(const TrajectoryBatch& batch, int id_a, int id_b) {
  const Trajectory& a = batch.at(id_a);
  const Trajectory& b = batch.at(id_b);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t step = 0; step < std::min(a.size(), b.size()); ++step) {
    best = std::min(best, distance(a.states[step].position, b.states[step].position));
  }
  return best;
}

}  // namespace evasim
