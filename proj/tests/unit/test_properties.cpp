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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "evasim/geometry.hpp"
#include "evasim/guidance.hpp"
#include "evasim/io.hpp"
#include "evasim/metrics.hpp"
#include "evasim/motion_prior.hpp"
#include "evasim/selection.hpp"
#include "evasim/simulation.hpp"
#include "evasim/templates.hpp"
#include "oracles.hpp"

using namespace evasim;

namespace {

constexpr double kPi = std::numbers::pi;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

OrientedBox random_box(std::mt19937_64& rng, double spread) {
  return OrientedBox({uniform(rng, -spread, spread), uniform(rng, -spread, spread)},
                     uniform(rng, -kPi, kPi), uniform(rng, 0.5, 6.0), uniform(rng, 0.3, 3.0));
}

OrientedBox moved(const OrientedBox& b, double rot, Vec2 shift) {
  const double c = std::cos(rot), s = std::sin(rot);
  const Vec2 p = b.center();
  return OrientedBox({c * p.x - s * p.y + shift.x, s * p.x + c * p.y + shift.y},
                     b.heading() + rot, b.length(), b.width());
}

OrientedBox resized(const OrientedBox& b, double delta) {
  return OrientedBox(b.center(), b.heading(), b.length() + delta, b.width() + delta);
}

// Inflating or deflating either box by 1e-6 m does not change the answer.
bool robust_pair(const OrientedBox& a, const OrientedBox& b) {
  const bool v = obb_overlap(a, b);
  return obb_overlap(resized(a, 1e-6), resized(b, 1e-6)) == v &&
         obb_overlap(resized(a, -1e-6), resized(b, -1e-6)) == v;
}

// Star-shaped simple polygon around c.
std::vector<Vec2> random_star(std::mt19937_64& rng, Vec2 c, int n) {
  std::vector<double> ang;
  for (int i = 0; i < n; ++i) ang.push_back(uniform(rng, 0.0, 2.0 * kPi));
  std::sort(ang.begin(), ang.end());
  std::vector<Vec2> out;
  for (double a : ang) {
    const double r = uniform(rng, 1.0, 6.0);
    out.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return out;
}

VehicleState vehicle(int id, Vec2 p, double heading, double speed, bool ego = false) {
  VehicleState v;
  v.id = id;
  v.position = p;
  v.heading = heading;
  v.speed = speed;
  v.is_ego = ego;
  return v;
}

// Footprint grid computed without the library helpers.
std::vector<Vec2> grid_points(const PoseState& s, double length, double width, int rows, int cols) {
  std::vector<Vec2> out;
  const double c = std::cos(s.heading), sn = std::sin(s.heading);
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < cols; ++k) {
      const double lx = -0.5 * length + length * k / (cols - 1);
      const double ly = -0.5 * width + width * r / (rows - 1);
      out.push_back({s.position.x + c * lx - sn * ly, s.position.y + sn * lx + c * ly});
    }
  }
  return out;
}

}  // namespace

TEST(GeometryProperties, OverlapSymmetricAndRigidInvariant) {
  std::mt19937_64 rng(101);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const OrientedBox a = random_box(rng, 4.0);
    const OrientedBox b = random_box(rng, 4.0);
    EXPECT_EQ(obb_overlap(a, b), obb_overlap(b, a));
    if (!robust_pair(a, b)) continue;
    const double rot = uniform(rng, -kPi, kPi);
    const Vec2 shift{uniform(rng, -100, 100), uniform(rng, -100, 100)};
    ASSERT_EQ(obb_overlap(moved(a, rot, shift), moved(b, rot, shift)), obb_overlap(a, b)) << i;
    ++checked;
  }
  EXPECT_GT(checked, 4900);
}

TEST(GeometryProperties, PenaltyDistanceIsSoundCertificate) {
  std::mt19937_64 rng(202);
  int near_pen = 0;
  for (int i = 0; i < 10000; ++i) {
    const OrientedBox a = random_box(rng, 0.0);
    OrientedBox b = random_box(rng, 0.0);
    const double d = penalty_distance(a, b) * uniform(rng, 0.6, 1.1);
    const double dir = uniform(rng, -kPi, kPi);
    b = OrientedBox(a.center() + d * unit_from_heading(dir), b.heading(), b.length(), b.width());
    const double cd = distance(a.center(), b.center());
    if (cd > penalty_distance(a, b)) {
      ASSERT_FALSE(obb_overlap(a, b)) << i;
      ASSERT_FALSE(oracle::sampled_overlap(a, b, 0.05)) << i;
    }
    if (std::abs(cd - penalty_distance(a, b)) < 0.05) ++near_pen;
  }
  EXPECT_GT(near_pen, 100);
}

TEST(GeometryProperties, FootprintCountAndBounds) {
  std::mt19937_64 rng(303);
  for (int i = 0; i < 500; ++i) {
    const OrientedBox b = random_box(rng, 50.0);
    const FootprintGrid g{2 + static_cast<int>(rng() % 5), 2 + static_cast<int>(rng() % 5)};
    const std::vector<Vec2> pts = footprint_points(b, g);
    ASSERT_EQ(pts.size(), static_cast<std::size_t>(g.rows * g.cols));
    for (const Vec2& p : pts) {
      const Vec2 l = b.to_local(p);
      EXPECT_LE(std::abs(l.x), 0.5 * b.length() + 1e-9);
      EXPECT_LE(std::abs(l.y), 0.5 * b.width() + 1e-9);
    }
    for (const Vec2& c : b.corners()) {
      const bool present = std::any_of(pts.begin(), pts.end(),
                                       [&](Vec2 p) { return distance(p, c) < 1e-9; });
      EXPECT_TRUE(present);
    }
  }
}

TEST(GeometryProperties, PointOnRoadMatchesRayCasting) {
  std::mt19937_64 rng(404);
  for (int set = 0; set < 20; ++set) {
    std::vector<std::vector<Vec2>> raw;
    std::vector<Polygon> polys;
    const int count = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < count; ++k) {
      raw.push_back(random_star(rng, {uniform(rng, -4, 4), uniform(rng, -4, 4)},
                                3 + static_cast<int>(rng() % 8)));
      polys.emplace_back(raw.back());
    }
    const MapModel map(polys);
    for (int i = 0; i < 1000; ++i) {
      const Vec2 p{uniform(rng, -11, 11), uniform(rng, -11, 11)};
      ASSERT_EQ(point_on_road(map, p), oracle::ray_cast_on_road(raw, p)) << set << " " << i;
    }
    for (const auto& poly : raw) {
      for (const Vec2& v : poly) EXPECT_TRUE(point_on_road(map, v));
    }
  }
}

TEST(GuidanceProperties, DecayWeightsSumToOne) {
  std::mt19937_64 rng(505);
  for (int i = 0; i < 2000; ++i) {
    const double lambda = i == 0 ? 1.0 : uniform(rng, 1e-6, 1.0);
    const int T = 1 + static_cast<int>(rng() % 200);
    const std::vector<double> w = decay_weights(T, lambda);
    ASSERT_EQ(w.size(), static_cast<std::size_t>(T));
    double sum = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) {
      EXPECT_GE(w[t], 0.0);
      if (t) {
        EXPECT_LE(w[t], w[t - 1]);
      }
      sum += w[t];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12) << lambda << " " << T;
  }
}

TEST(GuidanceProperties, AdversarialGradientPointsAwayFromEgo) {
  std::mt19937_64 rng(606);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    TrajectoryBatch b = oracle::random_batch(rng, 2, 8);
    GuidanceConfig cfg;
    cfg.ego_id = b.trajectories[0].vehicle_id;
    cfg.adv_id = b.trajectories[1].vehicle_id;
    cfg.lambda_decay = uniform(rng, 0.1, 1.0);
    const LossResult r = adversarial_loss(b, cfg);
    for (std::size_t t = 0; t < b.steps(); ++t) {
      const OrientedBox e = b.trajectories[0].box_at(t);
      const OrientedBox a = b.trajectories[1].box_at(t);
      const double d = distance(e.center(), a.center());
      if (d <= penalty_distance(e, a) + 1e-6) continue;
      const Vec2 toward = (1.0 / d) * (e.center() - a.center());
      const PoseGrad g = r.grad[1][t];
      EXPECT_LT(g.x * toward.x + g.y * toward.y, 0.0);
      ++checked;
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(GuidanceProperties, DetachedBlocksHaveZeroGradient) {
  std::mt19937_64 rng(707);
  for (int i = 0; i < 200; ++i) {
    TrajectoryBatch b = oracle::random_batch(rng, 2, 6);
    for (auto& s : b.trajectories[1].states) s.position = 0.35 * s.position;
    for (auto& s : b.trajectories[0].states) s.position = 0.35 * s.position;
    GuidanceConfig cfg;
    cfg.ego_id = b.trajectories[0].vehicle_id;
    cfg.adv_id = b.trajectories[1].vehicle_id;
    const LossResult r = adversarial_loss(b, cfg);
    for (const PoseGrad& g : r.grad[0]) {
      ASSERT_EQ(g.x, 0.0);
      ASSERT_EQ(g.y, 0.0);
      ASSERT_EQ(g.heading, 0.0);
    }
    TrajectoryBatch shifted = b;
    for (auto& s : shifted.trajectories[0].states) s.position += Vec2{0.3, -0.2};
    if (r.value > 0.0) {
      EXPECT_NE(adversarial_loss(shifted, cfg).value, r.value);
    }

    // A parked vehicle only pushes others away: its own block stays zero.
    TrajectoryBatch parked = b;
    for (auto& s : parked.trajectories[0].states) s.speed = 0.0;
    for (auto& s : parked.trajectories[1].states) s.speed = 3.0;
    cfg.mask_policy = MaskPolicy::kAllPairs;
    cfg.stage = Stage::kEvasion;
    const LossResult nc = no_collision_loss(parked, cfg);
    for (const PoseGrad& g : nc.grad[0]) {
      ASSERT_EQ(g.x, 0.0);
      ASSERT_EQ(g.y, 0.0);
    }
  }
}

TEST(GuidanceProperties, LossesNonNegativeAndFinite) {
  std::mt19937_64 rng(808);
  const MapModel map = oracle::gradient_map();
  for (int i = 0; i < 300; ++i) {
    TrajectoryBatch b = oracle::random_batch(rng, 2 + static_cast<int>(rng() % 4), 10);
    const double scale = uniform(rng, 0.2, 1.0);
    for (auto& t : b.trajectories)
      for (auto& s : t.states) s.position = scale * s.position;
    GuidanceParams params;
    params.lambda_decay = uniform(rng, 0.0, 1.0);
    const int ego = b.trajectories[0].vehicle_id, adv = b.trajectories[1].vehicle_id;
    for (Stage stage : {Stage::kCollision, Stage::kEvasion}) {
      const GuidanceConfig cfg = params.for_stage(stage, ego, adv);
      for (const LossResult& r : {adversarial_loss(b, cfg), no_collision_loss(b, cfg),
                                  on_road_loss(b, map, cfg), stage_loss(b, map, cfg)}) {
        ASSERT_TRUE(std::isfinite(r.value));
        ASSERT_GE(r.value, 0.0);
        for (const auto& row : r.grad)
          for (const PoseGrad& g : row) {
            ASSERT_TRUE(std::isfinite(g.x) && std::isfinite(g.y) && std::isfinite(g.heading));
          }
      }
    }
  }
}

TEST(GuidanceProperties, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(909);
  for (oracle::LossKind k : {oracle::LossKind::kAdversarial, oracle::LossKind::kNoCollision,
                             oracle::LossKind::kOnRoad}) {
    for (int i = 0; i < 20; ++i) {
      const oracle::GradCheck g = oracle::check_gradient(k, rng);
      ASSERT_LE(g.max_rel_error, 1e-3) << static_cast<int>(k) << " " << i;
    }
  }
}

TEST(MotionProperties, RolloutRespectsBounds) {
  std::mt19937_64 rng(1001);
  const ActionLimits lim;
  for (int i = 0; i < 500; ++i) {
    const VehicleState start = vehicle(0, {uniform(rng, -5, 5), uniform(rng, -5, 5)},
                                       uniform(rng, -kPi, kPi), uniform(rng, 0.0, lim.speed_max));
    ActionSequence seq;
    seq.dt = 0.1;
    for (int t = 0; t < 30; ++t) {
      seq.actions.push_back({uniform(rng, -lim.accel_max, lim.accel_max),
                             uniform(rng, -lim.yaw_rate_max, lim.yaw_rate_max)});
    }
    const Trajectory tr = rollout_kinematics(start, seq);
    double speed = start.speed, heading = start.heading;
    for (const PoseState& s : tr.states) {
      EXPECT_LE(std::abs(s.speed - speed), lim.accel_max * seq.dt + 1e-9);
      EXPECT_LE(std::abs(normalize_angle(s.heading - heading)), lim.yaw_rate_max * seq.dt + 1e-9);
      EXPECT_GE(s.speed, 0.0);
      EXPECT_LE(s.speed, lim.speed_max);
      speed = s.speed;
      heading = s.heading;
    }
  }
}

TEST(SimulationProperties, CommittedRunsAreBoundedAndValidityIsSound) {
  // Closest candidate of every fourth suite scene, scanned independently.
  SimConfig cfg;
  cfg.seed = 17;
  const ActionLimits lim = cfg.prior.limits;
  const std::vector<Scene> suite = synthetic_suite();
  int valid = 0;
  for (std::size_t i = 0; i < suite.size(); i += 4) {
    const Scene& s = suite[i];
    const auto choice = select_closest(s).choice;
    if (!choice) continue;
    const CollisionOutcome co = run_collision_stage(s, *choice, cfg);
    const TrajectoryBatch& b = co.trajectories;
    for (const Trajectory& t : b.trajectories) {
      for (std::size_t k = 1; k < t.size(); ++k) {
        ASSERT_LE(std::abs(t.states[k].speed - t.states[k - 1].speed),
                  lim.accel_max * b.dt + 1e-9);
        ASSERT_LE(std::abs(normalize_angle(t.states[k].heading - t.states[k - 1].heading)),
                  lim.yaw_rate_max * b.dt + 1e-9);
      }
    }
    if (!co.valid) continue;
    ++valid;
    std::vector<std::vector<Vec2>> polys;
    for (const Polygon& p : s.map.drivable_polygons()) polys.push_back(p.vertices());
    const Trajectory& adv = b.at(*choice);
    int hit_ego = -1, hit_other = -1, off_start = -1, run = 0;
    for (std::size_t k = 0; k < b.steps(); ++k) {
      for (const Trajectory& o : b.trajectories) {
        if (o.vehicle_id == adv.vehicle_id) continue;
        if (!obb_overlap(adv.box_at(k), o.box_at(k))) continue;
        if (o.vehicle_id == s.ego().id) {
          if (hit_ego < 0) hit_ego = static_cast<int>(k);
        } else if (hit_other < 0) {
          hit_other = static_cast<int>(k);
        }
      }
      bool off = false;
      for (const Vec2& p : grid_points(adv.states[k], adv.length, adv.width, 3, 5)) {
        off = off || !oracle::ray_cast_on_road(polys, p);
      }
      run = off ? run + 1 : 0;
      if (run == cfg.offroad_steps && off_start < 0) off_start = static_cast<int>(k) - run + 1;
    }
    ASSERT_GE(hit_ego, 0) << s.scene_id;
    EXPECT_EQ(co.collision_step, hit_ego) << s.scene_id;
    if (hit_other >= 0) {
      EXPECT_LT(hit_ego, hit_other) << s.scene_id;
    }
    if (off_start >= 0) {
      EXPECT_LT(hit_ego, off_start) << s.scene_id;
    }

    const EvasionOutcome eo = run_evasion_stage(s, co, cfg);
    for (const Trajectory& t : b.trajectories) {
      if (t.vehicle_id == s.ego().id) continue;
      EXPECT_EQ(eo.trajectories.at(t.vehicle_id).states, t.states) << s.scene_id;
    }
  }
  EXPECT_GT(valid, 0);
}

TEST(MetricsProperties, CrMonotoneAndSampleMeanRecount) {
  std::mt19937_64 rng(1101);
  std::vector<PlannerTrace> traces;
  for (int i = 0; i < 400; ++i) {
    PlannerTrace t;
    t.sample_id = "s" + std::to_string(i);
    t.scene_id = "scene" + std::to_string(i % 13);
    for (int k = 0; k <= 6; ++k) {
      t.waypoints.push_back({0.5 * k, 0.0});
      t.collision_indicators.push_back(uniform(rng, 0, 1) < 0.15 ? 1 : 0);
    }
    int last = 0;
    for (double h : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
      const CrValue v = planner_cr(t, h);
      EXPECT_GE(v.cr, last);
      EXPECT_EQ(v.valid, t.collision_indicators[0] == 0);
      last = v.cr;
    }
    traces.push_back(t);
  }
  for (double h : {1.0, 2.0, 3.0}) {
    double sum = 0.0;
    int n = 0;
    for (const PlannerTrace& t : traces) {
      if (t.collision_indicators[0]) continue;
      int any = 0;
      for (int k = 0; k <= static_cast<int>(h / 0.5); ++k) any |= t.collision_indicators[k];
      sum += any;
      ++n;
    }
    EXPECT_NEAR(aggregate_cr(traces, CrGrouping::kSample, h).value, sum / n, 1e-12);
  }
}

TEST(MetricsProperties, ClosestDistanceBoundedByInitialDistance) {
  std::mt19937_64 rng(1202);
  for (int i = 0; i < 300; ++i) {
    const TrajectoryBatch b = oracle::random_batch(rng, 3, 12);
    const int e = b.trajectories[0].vehicle_id, a = b.trajectories[2].vehicle_id;
    const double d0 = distance(b.at(e).states[0].position, b.at(a).states[0].position);
    const double c = closest_distance(b, e, a);
    EXPECT_LE(c, d0);
    double brute = d0;
    for (std::size_t k = 0; k < b.steps(); ++k) {
      brute = std::min(brute, distance(b.at(e).states[k].position, b.at(a).states[k].position));
    }
    EXPECT_EQ(c, brute);
  }
}

TEST(MetricsProperties, RealismIsPseudometric) {
  std::mt19937_64 rng(1303);
  const auto bundle = [&] {
    RealismStats s = empty_realism_stats();
    for (Histogram& h : s.features) {
      const double mu = uniform(rng, h.lo, h.hi), sd = uniform(rng, 0.1, 3.0);
      std::normal_distribution<double> n(mu, sd);
      for (int k = 0; k < 200; ++k) h.add(n(rng));
    }
    return s;
  };
  for (int i = 0; i < 100; ++i) {
    const RealismStats a = bundle(), b = bundle(), c = bundle();
    EXPECT_EQ(realism_distance(a, a), 0.0);
    EXPECT_GE(realism_distance(a, b), 0.0);
    EXPECT_NEAR(realism_distance(a, b), realism_distance(b, a), 1e-12);
    EXPECT_LE(realism_distance(a, c), realism_distance(a, b) + realism_distance(b, c) + 1e-12);
  }
}

TEST(IoProperties, RandomScenariosRoundTripBitIdentically) {
  std::mt19937_64 rng(1404);
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + static_cast<int>(rng() % 5);
    TrajectoryBatch b = oracle::random_batch(rng, n, 1 + static_cast<int>(rng() % 30));
    Scene s;
    s.scene_id = "rt" + std::to_string(i);
    for (std::size_t k = 0; k < b.trajectories.size(); ++k) {
      const Trajectory& t = b.trajectories[k];
      VehicleState v = state_at(t, 0, k == 0);
      v.length = t.length;
      v.width = t.width;
      s.vehicles.push_back(v);
    }
    const ScenarioFile f =
        make_scenario_file(s, b, i % 2 ? "collision" : "evasion", b.trajectories.back().vehicle_id);
    const std::string text = serialize_scenario(f);
    ASSERT_EQ(serialize_scenario(parse_scenario(text)), text);
    EXPECT_EQ(scenario_to_batch(parse_scenario(text)).trajectories[0].states, b.trajectories[0].states);
  }
}
