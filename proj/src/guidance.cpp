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

#include "evasim/guidance.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "evasim/errors.hpp"

namespace evasim {

void GuidanceConfig::validate() const {
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) {
    throw InvalidInput("loss weights must be non-negative");
  }
  if (!(lambda_decay >= 0.0 && lambda_decay <= 1.0)) {
    throw InvalidInput("lambda_decay must lie in [0, 1]");
  }
  if (!(v_th > 0.0)) {
    throw InvalidInput("v_th must be positive");
  }
  if (adv_id == ego_id) {
    throw InvalidInput("adv_id must differ from ego_id");
  }
}

GuidanceConfig GuidanceParams::for_stage(Stage stage, int ego_id, int adv_id) const {
  GuidanceConfig c;
  const StageWeights& w = stage == Stage::kCollision ? collision : evasion;
  c.alpha = stage == Stage::kCollision ? w.alpha : 0.0;
  c.beta = w.beta;
  c.gamma = w.gamma;
  c.lambda_decay = lambda_decay;
  c.v_th = v_th;
  c.stage = stage;
  c.mask_policy =
      stage == Stage::kCollision ? MaskPolicy::kExcludeEgoAdvPair : MaskPolicy::kAllPairs;
  c.ego_id = ego_id;
  c.adv_id = adv_id;
  c.grid = grid;
  return c;
}

LossResult LossResult::zeros(const TrajectoryBatch& batch) {
  LossResult r;
  r.grad.resize(batch.trajectories.size());
  for (std::size_t i = 0; i < batch.trajectories.size(); ++i) {
    r.grad[i].assign(batch.trajectories[i].size(), PoseGrad{});
  }
  return r;
}

void LossResult::add_scaled(const LossResult& other, double weight) {
  value += weight * other.value;
  if (grad.size() < other.grad.size()) {
    grad.resize(other.grad.size());
  }
  for (std::size_t i = 0; i < other.grad.size(); ++i) {
    if (grad[i].size() < other.grad[i].size()) {
      grad[i].resize(other.grad[i].size());
    }
    for (std::size_t t = 0; t < other.grad[i].size(); ++t) {
      grad[i][t].x += weight * other.grad[i][t].x;
      grad[i][t].y += weight * other.grad[i][t].y;
      grad[i][t].heading += weight * other.grad[i][t].heading;
    }
  }
}

std::vector<double> decay_weights(int horizon, double lambda) {
  if (horizon < 1) {
    throw InvalidInput("decay_weights needs horizon >= 1");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidInput("decay factor must lie in [0, 1]");
  }
  std::vector<double> w(static_cast<std::size_t>(horizon));
  double total = 0.0;
  for (int t = 0; t < horizon; ++t) {
    w[static_cast<std::size_t>(t)] = std::pow(lambda, t);  // pow(0, 0) == 1
    total += w[static_cast<std::size_t>(t)];
  }
  for (double& x : w) {
    x /= total;
  }
  return w;
}

namespace {

std::size_t require_index(const TrajectoryBatch& batch, int id) {
  if (auto idx = batch.index_of(id)) {
    return *idx;
  }
  throw MissingVehicle(id);
}

double half_diag(const Trajectory& t) {
  return 0.5 * std::sqrt(t.length * t.length + t.width * t.width);
}

bool pair_masked_in(const GuidanceConfig& cfg, int id_i, int id_j) {
  if (cfg.mask_policy == MaskPolicy::kAllPairs) {
    return true;
  }
  const bool ego_adv = (id_i == cfg.ego_id && id_j == cfg.adv_id) ||
                       (id_i == cfg.adv_id && id_j == cfg.ego_id);
  return !ego_adv;
}

}  // namespace

namespace {

void accumulate_adversarial(const TrajectoryBatch& batch, const GuidanceConfig& cfg,
                            const std::vector<double>& w, double weight, LossResult& out) {
  const std::size_t adv = require_index(batch, cfg.adv_id);
  const std::size_t ego = require_index(batch, cfg.ego_id);
  if (cfg.collided) {
    return;
  }
  const Trajectory& ta = batch.trajectories[adv];
  const Trajectory& te = batch.trajectories[ego];
  const double d_pen = half_diag(ta) + half_diag(te);
  for (std::size_t t = 0; t < batch.steps(); ++t) {
    const Vec2 diff = ta.states[t].position - te.states[t].position;
    const double d = norm(diff);
    if (d > d_pen) {
      const double wt = weight * w[t];
      out.value += wt * d;
      out.grad[adv][t].x += wt * diff.x / d;
      out.grad[adv][t].y += wt * diff.y / d;
    }
  }
}

void accumulate_no_collision(const TrajectoryBatch& batch, const GuidanceConfig& cfg,
                             const std::vector<double>& w, double weight, LossResult& out) {
  const std::size_t n = batch.trajectories.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Trajectory& ti = batch.trajectories[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        continue;
      }
      const Trajectory& tj = batch.trajectories[j];
      if (!pair_masked_in(cfg, ti.vehicle_id, tj.vehicle_id)) {
        continue;
      }
      const double d_pen = half_diag(ti) + half_diag(tj);
      for (std::size_t t = 0; t < batch.steps(); ++t) {
        if (!(ti.states[t].speed > cfg.v_th)) {
          continue;
        }
        const Vec2 diff = ti.states[t].position - tj.states[t].position;
        if (std::abs(diff.x) >= d_pen || std::abs(diff.y) >= d_pen) {
          continue;
        }
        const double d = norm(diff);
        if (d < d_pen) {
          const double wt = weight * w[t];
          out.value += wt * (1.0 - d / d_pen);
          if (d > 0.0) {
            const double g = -wt / (d_pen * d);
            out.grad[i][t].x += g * diff.x;
            out.grad[i][t].y += g * diff.y;
          }
        }
      }
    }
  }
}

void accumulate_on_road(const TrajectoryBatch& batch, const MapModel& map,
                        const GuidanceConfig& cfg, const std::vector<double>& w, double weight,
                        LossResult& out) {
  std::vector<Vec2> pts;
  std::vector<char> on;
  for (std::size_t i = 0; i < batch.trajectories.size(); ++i) {
    const Trajectory& tr = batch.trajectories[i];
    const std::vector<Vec2> offsets = footprint_offsets(tr.length, tr.width, cfg.grid);
    const double l_diag = std::sqrt(tr.length * tr.length + tr.width * tr.width);
    pts.resize(offsets.size());
    on.resize(offsets.size());
    for (std::size_t t = 0; t < tr.size(); ++t) {
      const PoseState& s = tr.states[t];
      if (!(s.speed > cfg.v_th)) {
        continue;
      }
      const double c = std::cos(s.heading);
      const double sn = std::sin(s.heading);
      const auto place = [&](Vec2 o) {
        return Vec2{s.position.x + c * o.x - sn * o.y, s.position.y + sn * o.x + c * o.y};
      };
      const double hl = 0.5 * tr.length;
      const double hw = 0.5 * tr.width;
      const std::array<Vec2, 4> corners = {place({hl, hw}), place({-hl, hw}), place({-hl, -hw}),
                                           place({hl, -hw})};
      if (map.convex_cover(corners)) {
        continue;
      }
      bool any_off = false;
      bool any_on = false;
      for (std::size_t k = 0; k < offsets.size(); ++k) {
        pts[k] = place(offsets[k]);
        on[k] = point_on_road(map, pts[k]) ? 1 : 0;
        any_off |= !on[k];
        any_on |= static_cast<bool>(on[k]);
      }
      if (!any_off) {
        continue;
      }
      const double wt = weight * w[t];
      for (std::size_t k = 0; k < offsets.size(); ++k) {
        if (on[k]) {
          continue;
        }
        const Vec2 p = pts[k];
        if (!any_on) {
          const std::optional<Vec2> q = map.nearest_boundary_point(p);
          const double d = q ? distance(p, *q) : std::numeric_limits<double>::infinity();
          out.value += wt * std::max(0.0, 1.0 - d / l_diag);
          continue;
        }
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < offsets.size(); ++m) {
          if (!on[m]) {
            continue;
          }
          const double d = distance(p, pts[m]);
          if (d < best_d) {
            best_d = d;
            best = m;
          }
        }
        out.value += wt * (1.0 - best_d / l_diag);
        if (best_d > 0.0) {
          // d(1 - |q - p| / l) / dq with q = center + R(heading) * offset.
          const Vec2 q = pts[best];
          const Vec2 dq = (-wt / (l_diag * best_d)) * (q - p);
          const Vec2 arm = q - s.position;
          out.grad[i][t].x += dq.x;
          out.grad[i][t].y += dq.y;
          out.grad[i][t].heading += dq.x * -arm.y + dq.y * arm.x;
        }
      }
    }
  }
}

std::vector<double> batch_weights(const TrajectoryBatch& batch, const GuidanceConfig& cfg) {
  return decay_weights(static_cast<int>(std::max<std::size_t>(batch.steps(), 1)),
                       cfg.lambda_decay);
}

}  // namespace

LossResult adversarial_loss(const TrajectoryBatch& batch, const GuidanceConfig& cfg) {
  LossResult out = LossResult::zeros(batch);
  accumulate_adversarial(batch, cfg, batch_weights(batch, cfg), 1.0, out);
  return out;
}

LossResult no_collision_loss(const TrajectoryBatch& batch, const GuidanceConfig& cfg) {
  LossResult out = LossResult::zeros(batch);
  accumulate_no_collision(batch, cfg, batch_weights(batch, cfg), 1.0, out);
  return out;
}

LossResult on_road_loss(const TrajectoryBatch& batch, const MapModel& map,
                        const GuidanceConfig& cfg) {
  LossResult out = LossResult::zeros(batch);
  accumulate_on_road(batch, map, cfg, batch_weights(batch, cfg), 1.0, out);
  return out;
}

LossResult collision_stage_loss(const TrajectoryBatch& batch, const MapModel& map,
                                const GuidanceConfig& cfg) {
  if (cfg.stage != Stage::kCollision) {
    throw InvalidInput("collision_stage_loss requires the collision stage");
  }
  GuidanceConfig c = cfg;
  c.mask_policy = MaskPolicy::kExcludeEgoAdvPair;
  LossResult out = LossResult::zeros(batch);
  const std::vector<double> w = batch_weights(batch, c);
  if (c.alpha != 0.0) {
    accumulate_adversarial(batch, c, w, c.alpha, out);
  } else {
    require_index(batch, c.adv_id);
    require_index(batch, c.ego_id);
  }
  if (c.beta != 0.0) {
    accumulate_no_collision(batch, c, w, c.beta, out);
  }
  if (c.gamma != 0.0) {
    accumulate_on_road(batch, map, c, w, c.gamma, out);
  }
  return out;
}

LossResult evasion_stage_loss(const TrajectoryBatch& batch, const MapModel& map,
                              const GuidanceConfig& cfg) {
  if (cfg.stage != Stage::kEvasion) {
    throw InvalidInput("evasion_stage_loss requires the evasion stage");
  }
  GuidanceConfig c = cfg;
  c.mask_policy = MaskPolicy::kAllPairs;
  LossResult out = LossResult::zeros(batch);
  const std::vector<double> w = batch_weights(batch, c);
  if (c.beta != 0.0) {
    accumulate_no_collision(batch, c, w, c.beta, out);
  }
  if (c.gamma != 0.0) {
    accumulate_on_road(batch, map, c, w, c.gamma, out);
  }
  return out;
}

LossResult stage_loss(const TrajectoryBatch& batch, const MapModel& map,
                      const GuidanceConfig& cfg) {
  return cfg.stage == Stage::kCollision ? collision_stage_loss(batch, map, cfg)
                                        : evasion_stage_loss(batch, map, cfg);
}

}  // namespace evasim
