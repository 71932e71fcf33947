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

#include "evasim/motion_prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evasim/errors.hpp"

namespace evasim {

bool ActionSequence::within(const ActionLimits& limits) const {
  return std::all_of(actions.begin(), actions.end(), [&](const Action& a) {
    return std::abs(a.accel) <= limits.accel_max && std::abs(a.yaw_rate) <= limits.yaw_rate_max;
  });
}

void PriorConfig::validate() const {
  if (horizon < 1) throw InvalidInput("prior horizon must be >= 1");
  if (!(dt > 0.0)) throw InvalidInput("prior dt must be positive");
  if (population < 1) throw InvalidInput("population must be >= 1");
  if (refine_iters < 0) throw InvalidInput("refine_iters must be >= 0");
  if (!(step_size >= 0.0)) throw InvalidInput("step_size must be non-negative");
  if (!(accel_sigma >= 0.0) || !(yaw_rate_sigma >= 0.0)) {
    throw InvalidInput("prior sigmas must be non-negative");
  }
  if (!(limits.accel_max > 0.0) || !(limits.yaw_rate_max > 0.0) || !(limits.speed_max > 0.0)) {
    throw InvalidInput("action limits must be positive");
  }
  if (!noise_schedule.empty()) {
    if (noise_schedule.size() != static_cast<std::size_t>(refine_iters)) {
      throw InvalidInput("noise_schedule length must equal refine_iters");
    }
    for (std::size_t i = 0; i < noise_schedule.size(); ++i) {
      if (!(noise_schedule[i] >= 0.0) || (i > 0 && noise_schedule[i] > noise_schedule[i - 1])) {
        throw InvalidInput("noise_schedule must be non-negative and non-increasing");
      }
    }
  }
}

std::vector<double> PriorConfig::resolved_noise_schedule() const {
  return noise_schedule.empty() ? default_noise_schedule(refine_iters) : noise_schedule;
}

std::vector<double> default_noise_schedule(int iters, double start) {
  std::vector<double> s(static_cast<std::size_t>(std::max(iters, 0)));
  for (int k = 0; k + 1 < iters; ++k) {
    s[static_cast<std::size_t>(k)] = start * std::ldexp(1.0, -k);
  }
  if (iters > 0) {
    s.back() = 0.0;
  }
  return s;
}

Trajectory rollout_kinematics(const VehicleState& state, const ActionSequence& actions,
                              double speed_max) {
  Trajectory out;
  out.vehicle_id = state.id;
  out.dt = actions.dt;
  out.length = state.length;
  out.width = state.width;
  out.states.reserve(actions.actions.size());
  const double dt = actions.dt;
  Vec2 p = state.position;
  double heading = state.heading;
  double v = state.speed;
  for (const Action& a : actions.actions) {
    v = std::clamp(v + a.accel * dt, 0.0, speed_max);
    heading += a.yaw_rate * dt;
    p += (v * dt) * unit_from_heading(heading);
    out.states.push_back({p, normalize_angle(heading), v});
  }
  return out;
}

std::vector<Action> rollout_vjp(const VehicleState& state, const ActionSequence& actions,
                                const Trajectory& rolled, const std::vector<PoseGrad>& pose_grad,
                                double speed_max) {
  const std::size_t n = actions.actions.size();
  const double dt = actions.dt;
  std::vector<Action> g(n);
  Vec2 g_pos;
  double g_heading = 0.0;
  double g_speed = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const PoseState& s = rolled.states[k];
    if (k < pose_grad.size()) {
      g_pos += Vec2{pose_grad[k].x, pose_grad[k].y};
      g_heading += pose_grad[k].heading;
    }
    // position[k] = position[k-1] + speed[k] * dt * (cos h[k], sin h[k])
    const double c = std::cos(s.heading);
    const double sn = std::sin(s.heading);
    g_heading += s.speed * dt * (-sn * g_pos.x + c * g_pos.y);
    g_speed += dt * (c * g_pos.x + sn * g_pos.y);
    // heading[k] = heading[k-1] + yaw_rate[k] * dt
    g[k].yaw_rate = g_heading * dt;
    // speed[k] = clamp(speed[k-1] + accel[k] * dt)
    const double prev_speed = k == 0 ? state.speed : rolled.states[k - 1].speed;
    const double raw = prev_speed + actions.actions[k].accel * dt;
    if (raw >= 0.0 && raw <= speed_max) {
      g[k].accel = g_speed * dt;
    } else {
      g[k].accel = 0.0;
      g_speed = 0.0;
    }
  }
  return g;
}

namespace {

double draw(Rng& rng, double sigma) {
  if (sigma <= 0.0) {
    return 0.0;
  }
  std::normal_distribution<double> nd(0.0, sigma);
  return nd(rng);
}

bool finite_grad(const LossResult& r) {
  if (!std::isfinite(r.value)) {
    return false;
  }
  for (const auto& row : r.grad) {
    for (const PoseGrad& g : row) {
      if (!std::isfinite(g.x) || !std::isfinite(g.y) || !std::isfinite(g.heading)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

ActionSequence sample_prior_actions(const VehicleState& state, const PriorConfig& cfg, Rng& rng) {
  ActionSequence seq;
  seq.vehicle_id = state.id;
  seq.dt = cfg.dt;
  seq.actions.resize(static_cast<std::size_t>(cfg.horizon));
  for (Action& a : seq.actions) {
    a.accel = std::clamp(draw(rng, cfg.accel_sigma), -cfg.limits.accel_max, cfg.limits.accel_max);
    a.yaw_rate = std::clamp(draw(rng, cfg.yaw_rate_sigma), -cfg.limits.yaw_rate_max,
                            cfg.limits.yaw_rate_max);
  }
  return seq;
}

RefineResult guided_refine(const Scene& scene, const std::set<int>& controlled_ids,
                           const TrajectoryBatch* frozen, const LossFn& loss,
                           const PriorConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t horizon = static_cast<std::size_t>(cfg.horizon);
  const std::size_t n = scene.vehicles.size();

  for (int id : controlled_ids) {
    if (!scene.find(id)) {
      throw MissingVehicle(id);
    }
  }
  // Template batch: frozen vehicles copied once, controlled slots filled per iterate.
  TrajectoryBatch base;
  base.dt = cfg.dt;
  base.trajectories.resize(n);
  std::vector<std::size_t> ctrl_slots;
  for (std::size_t i = 0; i < n; ++i) {
    const VehicleState& v = scene.vehicles[i];
    if (controlled_ids.count(v.id)) {
      ctrl_slots.push_back(i);
      continue;
    }
    const std::optional<std::size_t> fi = frozen ? frozen->index_of(v.id) : std::nullopt;
    if (!fi || frozen->trajectories[*fi].size() < horizon) {
      throw FrozenMismatch("frozen batch does not cover vehicle " + std::to_string(v.id) +
                           " over the horizon");
    }
    Trajectory t = frozen->trajectories[*fi];
    t.states.resize(horizon);
    t.dt = cfg.dt;
    base.trajectories[i] = std::move(t);
  }

  const std::vector<double> noise = cfg.resolved_noise_schedule();
  const double a_max = cfg.limits.accel_max;
  const double w_max = cfg.limits.yaw_rate_max;
  const std::uint64_t base_seed = rng();

  RefineResult best;
  best.loss = std::numeric_limits<double>::infinity();
  best.member_losses.reserve(static_cast<std::size_t>(cfg.population));

  for (int m = 0; m < cfg.population; ++m) {
    Rng member_rng(mix_seed(base_seed, static_cast<std::uint64_t>(m)));
    std::vector<ActionSequence> acts;
    acts.reserve(ctrl_slots.size());
    for (std::size_t slot : ctrl_slots) {
      acts.push_back(sample_prior_actions(scene.vehicles[slot], cfg, member_rng));
    }
    TrajectoryBatch batch = base;
    auto roll_all = [&] {
      for (std::size_t c = 0; c < ctrl_slots.size(); ++c) {
        batch.trajectories[ctrl_slots[c]] =
            rollout_kinematics(scene.vehicles[ctrl_slots[c]], acts[c], cfg.limits.speed_max);
      }
    };
    auto evaluate = [&] {
      LossResult r = loss(batch);
      if (!finite_grad(r)) {
        throw NonFiniteLoss("guidance loss or gradient is not finite");
      }
      return r;
    };

    roll_all();
    LossResult current = evaluate();
    for (int k = 0; k < cfg.refine_iters; ++k) {
      for (std::size_t c = 0; c < ctrl_slots.size(); ++c) {
        const std::size_t slot = ctrl_slots[c];
        if (slot >= current.grad.size()) {
          continue;
        }
        std::vector<Action> g = rollout_vjp(scene.vehicles[slot], acts[c], batch.trajectories[slot],
                                            current.grad[slot], cfg.limits.speed_max);
        double gmax = 0.0;
        for (Action& ga : g) {
          ga.accel *= a_max;
          ga.yaw_rate *= w_max;
          gmax = std::max({gmax, std::abs(ga.accel), std::abs(ga.yaw_rate)});
        }
        if (!(gmax > 0.0)) {
          continue;
        }
        const double scale = cfg.step_size / gmax;
        const double sigma = noise[static_cast<std::size_t>(k)];
        for (std::size_t s = 0; s < g.size(); ++s) {
          Action& a = acts[c].actions[s];
          const double ua = a.accel / a_max - scale * g[s].accel +
                            draw(member_rng, sigma * cfg.accel_sigma) / a_max;
          const double uw = a.yaw_rate / w_max - scale * g[s].yaw_rate +
                            draw(member_rng, sigma * cfg.yaw_rate_sigma) / w_max;
          a.accel = a_max * std::clamp(ua, -1.0, 1.0);
          a.yaw_rate = w_max * std::clamp(uw, -1.0, 1.0);
        }
      }
      roll_all();
      current = evaluate();
    }
    best.member_losses.push_back(current.value);
    if (current.value < best.loss) {
      best.loss = current.value;
      best.batch = std::move(batch);
      best.actions = std::move(acts);
    }
  }
  return best;
}

}  // namespace evasim
