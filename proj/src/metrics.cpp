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

#include "evasim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "evasim/errors.hpp"

namespace evasim {

double collision_success_rate(std::span<const CollisionOutcome> outcomes) {
  if (outcomes.empty()) return 0.0;
  const auto n = std::count_if(outcomes.begin(), outcomes.end(),
                               [](const CollisionOutcome& o) { return o.valid; });
  return static_cast<double>(n) / static_cast<double>(outcomes.size());
}

double evasion_success_rate(std::span<const EvasionOutcome> outcomes) {
  if (outcomes.empty()) return 0.0;
  const auto n = std::count_if(outcomes.begin(), outcomes.end(),
                               [](const EvasionOutcome& o) { return o.success; });
  return static_cast<double>(n) / static_cast<double>(outcomes.size());
}

double trajectory_collision_rate(std::span<const AdversaryRun> runs) {
  if (runs.empty()) return 0.0;
  int hits = 0;
  for (const AdversaryRun& r : runs) {
    const Trajectory& adv = r.batch.at(r.adv_id);
    bool hit = false;
    for (std::size_t step = 0; step < adv.size() && !hit; ++step) {
      const OrientedBox box = adv.box_at(step);
      for (const Trajectory& other : r.batch.trajectories) {
        if (other.vehicle_id != r.adv_id && step < other.size() &&
            obb_overlap(box, other.box_at(step))) {
          hit = true;
          break;
        }
      }
    }
    hits += hit ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(runs.size());
}

double off_road_rate(std::span<const AdversaryRun> runs, FootprintGrid grid, int consecutive) {
  if (runs.empty()) return 0.0;
  int off = 0;
  for (const AdversaryRun& r : runs) {
    off += offroad_onset(r.batch.at(r.adv_id), r.map, grid, consecutive) ? 1 : 0;
  }
  return static_cast<double>(off) / static_cast<double>(runs.size());
}

Histogram::Histogram(double lo_, double hi_, std::size_t bins) : lo(lo_), hi(hi_), counts(bins) {
  if (bins == 0 || !(hi > lo)) {
    throw InvalidInput("histogram needs bins > 0 and hi > lo");
  }
}

void Histogram::add(double value) {
  if (!std::isfinite(value)) {
    return;
  }
  const double pos = (value - lo) / bin_width();
  const auto last = static_cast<double>(counts.size() - 1);
  counts[static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, last))] += 1.0;
}

double Histogram::total() const {
  double t = 0.0;
  for (double c : counts) t += c;
  return t;
}

double wasserstein1(const Histogram& a, const Histogram& b) {
  if (a.lo != b.lo || a.hi != b.hi || a.counts.size() != b.counts.size()) {
    throw InvalidInput("histogram grids differ");
  }
  const double ta = a.total();
  const double tb = b.total();
  if (ta <= 0.0 || tb <= 0.0) {
    throw EmptyBatch("histogram has no mass");
  }
  double fa = 0.0;
  double fb = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    fa += a.counts[i] / ta;
    fb += b.counts[i] / tb;
    acc += std::abs(fa - fb);
  }
  return acc * a.bin_width();
}

RealismStats empty_realism_stats() {
  RealismStats s;
  s.features = {Histogram(-8.0, 8.0, RealismStats::kBins),
                Histogram(-10.0, 10.0, RealismStats::kBins),
                Histogram(-100.0, 100.0, RealismStats::kBins)};
  return s;
}

RealismStats realism_stats(std::span<const TrajectoryBatch> batches) {
  RealismStats s = empty_realism_stats();
  for (const TrajectoryBatch& b : batches) {
    for (const Trajectory& t : b.trajectories) {
      const std::vector<PoseState>& st = t.states;
      double prev_accel = 0.0;
      for (std::size_t k = 0; k + 1 < st.size(); ++k) {
        const double accel = (st[k + 1].speed - st[k].speed) / t.dt;
        const double yaw_rate = normalize_angle(st[k + 1].heading - st[k].heading) / t.dt;
        s.features[0].add(accel);
        s.features[1].add(st[k + 1].speed * yaw_rate);
        if (k > 0) {
          s.features[2].add((accel - prev_accel) / t.dt);
        }
        prev_accel = accel;
      }
    }
  }
  if (s.features[2].total() <= 0.0) {
    throw EmptyBatch("realism needs trajectories with at least three states");
  }
  return s;
}

double realism_distance(const RealismStats& a, const RealismStats& b) {
  double acc = 0.0;
  for (std::size_t f = 0; f < a.features.size(); ++f) {
    acc += wasserstein1(a.features[f], b.features[f]);
  }
  return acc / static_cast<double>(a.features.size());
}

double realism_distance(std::span<const TrajectoryBatch> batches, const RealismStats& reference) {
  return realism_distance(realism_stats(batches), reference);
}

double closest_distance(const TrajectoryBatch& batch, int ego_id, int adv_id) {
  return min_center_distance(batch, ego_id, adv_id);
}

CrValue planner_cr(const PlannerTrace& trace, double t) {
  const double ratio = t / 0.5;
  const double n_real = std::round(ratio);
  if (!(t > 0.0) || std::abs(ratio - n_real) > 1e-9) {
    throw InvalidInput("cr horizon must be a positive multiple of 0.5 s");
  }
  const auto n = static_cast<std::size_t>(n_real);
  if (trace.collision_indicators.size() < n + 1) {
    throw InsufficientHorizon("trace '" + trace.sample_id + "' covers fewer than " +
                              std::to_string(n + 1) + " waypoints");
  }
  CrValue v;
  v.valid = trace.collision_indicators[0] == 0;
  for (std::size_t i = 0; i <= n; ++i) {
    if (trace.collision_indicators[i] != 0) {
      v.cr = 1;
      break;
    }
  }
  return v;
}

CrAggregate aggregate_cr(std::span<const PlannerTrace> traces, CrGrouping grouping, double t) {
  CrAggregate agg;
  std::map<std::string, int> per_scene;
  int colliding = 0;
  for (const PlannerTrace& tr : traces) {
    const CrValue v = planner_cr(tr, t);
    if (!v.valid) {
      ++agg.invalid_samples;
      continue;
    }
    ++agg.valid_samples;
    colliding += v.cr;
    per_scene[tr.scene_id] += v.cr;
  }
  if (grouping == CrGrouping::kSample) {
    agg.groups = agg.valid_samples;
    agg.value = agg.valid_samples ? static_cast<double>(colliding) / agg.valid_samples : 0.0;
  } else {
    agg.groups = static_cast<int>(per_scene.size());
    agg.value = agg.groups ? static_cast<double>(colliding) / agg.groups : 0.0;
  }
  return agg;
}

std::string to_string(PlannerKind k) {
  return k == PlannerKind::kConstantVelocity ? "constant_velocity" : "reactive_brake";
}

PlannerKind planner_from_string(const std::string& s) {
  if (s == "constant_velocity") return PlannerKind::kConstantVelocity;
  if (s == "reactive_brake") return PlannerKind::kReactiveBrake;
  throw InvalidInput("unknown planner '" + s + "'");
}

namespace {

int steps_for(double seconds, double dt) {
  const double r = seconds / dt;
  const double n = std::round(r);
  if (!(n >= 1.0) || std::abs(r - n) > 1e-6) {
    throw InvalidInput("planner timing must be a multiple of the scenario dt");
  }
  return static_cast<int>(n);
}

bool threat_ahead(const PoseState& ego, const Trajectory& ego_traj, const PoseState& other,
                  const Trajectory& other_traj, double ttc_limit) {
  const Vec2 p = other.position - ego.position;
  const Vec2 v = other.speed * unit_from_heading(other.heading) -
                 ego.speed * unit_from_heading(ego.heading);
  const double vv = dot(v, v);
  const double t_star = vv > 0.0 ? -dot(p, v) / vv : 0.0;
  if (t_star < 0.0 || t_star > ttc_limit) {
    return false;
  }
  const double d_pen = 0.5 * (std::sqrt(ego_traj.length * ego_traj.length +
                                        ego_traj.width * ego_traj.width) +
                              std::sqrt(other_traj.length * other_traj.length +
                                        other_traj.width * other_traj.width));
  return norm(p + t_star * v) < d_pen;
}

}  // namespace

PlannerTrace run_planner(PlannerKind planner, const TrajectoryBatch& scenario, const Scene& scene,
                         const PlannerOptions& opts) {
  const int ego_id = scene.ego().id;
  const Trajectory& ego_traj = scenario.at(ego_id);
  const int n = steps_for(opts.horizon_s, scenario.dt);
  const int stride = steps_for(opts.waypoint_dt, scenario.dt);
  if (opts.start_step < 0 ||
      static_cast<std::size_t>(opts.start_step + n) >= scenario.steps()) {
    throw InsufficientHorizon("scenario too short for the planning horizon");
  }

  PlannerTrace trace;
  trace.scene_id = scene.scene_id;
  trace.sample_id = scene.scene_id + "@" + std::to_string(opts.start_step);
  PoseState ego = ego_traj.states[static_cast<std::size_t>(opts.start_step)];
  for (int s = 0; s <= n; ++s) {
    const auto idx = static_cast<std::size_t>(opts.start_step + s);
    if (s % stride == 0) {
      const OrientedBox box(ego.position, ego.heading, ego_traj.length, ego_traj.width);
      int hit = 0;
      for (const Trajectory& other : scenario.trajectories) {
        if (other.vehicle_id != ego_id && obb_overlap(box, other.box_at(idx))) {
          hit = 1;
          break;
        }
      }
      trace.waypoints.push_back(ego.position);
      trace.collision_indicators.push_back(hit);
    }
    if (s == n) {
      break;
    }
    if (planner == PlannerKind::kReactiveBrake) {
      const bool brake = std::any_of(
          scenario.trajectories.begin(), scenario.trajectories.end(), [&](const Trajectory& o) {
            return o.vehicle_id != ego_id &&
                   threat_ahead(ego, ego_traj, o.states[idx], o, opts.brake_ttc);
          });
      if (brake) {
        ego.speed = std::max(0.0, ego.speed - opts.brake_decel * scenario.dt);
      }
    }
    ego.position += ego.speed * scenario.dt * unit_from_heading(ego.heading);
  }
  return trace;
}

std::vector<PlannerTrace> planner_samples(PlannerKind planner, const TrajectoryBatch& scenario,
                                          const Scene& scene, const std::string& prefix,
                                          const PlannerOptions& opts) {
  const int n = steps_for(opts.horizon_s, scenario.dt);
  const int stride = steps_for(opts.waypoint_dt, scenario.dt);
  std::vector<PlannerTrace> out;
  for (int start = 0; static_cast<std::size_t>(start + n) < scenario.steps(); start += stride) {
    PlannerOptions o = opts;
    o.start_step = start;
    PlannerTrace tr = run_planner(planner, scenario, scene, o);
    tr.sample_id = prefix + "@" + std::to_string(start);
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace evasim
