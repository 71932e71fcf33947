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

#include "evasim/errors.hpp"
#include "evasim/metrics.hpp"
#include "evasim/pipeline.hpp"
#include "evasim/templates.hpp"

using namespace evasim;

namespace {

VehicleState car(int id, double x, double y, double heading, double speed, bool ego = false) {
  VehicleState v;
  v.id = id;
  v.position = {x, y};
  v.heading = heading;
  v.speed = speed;
  v.is_ego = ego;
  return v;
}

Trajectory straight(const VehicleState& v, int steps, double dt = 0.1) {
  Trajectory t;
  t.vehicle_id = v.id;
  t.length = v.length;
  t.width = v.width;
  t.dt = dt;
  for (int k = 0; k <= steps; ++k) {
    t.states.push_back({v.position + (v.speed * dt * k) * unit_from_heading(v.heading), v.heading, v.speed});
  }
  return t;
}

Scene scene_of(std::vector<VehicleState> vs) {
  Scene s;
  s.scene_id = "m";
  s.map = MapModel({rect_polygon(-100, -50, 200, 50)});
  s.vehicles = std::move(vs);
  return s;
}

TrajectoryBatch batch_from(const Scene& s, int steps) {
  TrajectoryBatch b;
  for (const VehicleState& v : s.vehicles) b.trajectories.push_back(straight(v, steps));
  return b;
}

PlannerTrace trace_of(std::vector<int> ind, std::string scene = "s", std::string id = "x") {
  PlannerTrace t;
  t.scene_id = std::move(scene);
  t.sample_id = std::move(id);
  t.collision_indicators = std::move(ind);
  t.waypoints.assign(t.collision_indicators.size(), Vec2{});
  return t;
}

// W1 between two equal-size samples: mean gap of the sorted values.
double sorted_w1(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

double bin_center(const Histogram& h, double x) {
  const double w = h.bin_width();
  const double i = std::clamp(std::floor((x - h.lo) / w), 0.0, static_cast<double>(h.counts.size() - 1));
  return h.lo + (i + 0.5) * w;
}

}  // namespace

TEST(SuccessRates, Counts) {
  std::vector<CollisionOutcome> c(4);
  EXPECT_EQ(collision_success_rate(c), 0.0);
  c[0].valid = c[1].valid = c[2].valid = true;
  EXPECT_EQ(collision_success_rate(c), 0.75);
  for (auto& o : c) o.valid = true;
  EXPECT_EQ(collision_success_rate(c), 1.0);
  EXPECT_EQ(collision_success_rate({}), 0.0);

  std::vector<EvasionOutcome> e(5);
  EXPECT_EQ(evasion_success_rate(e), 0.0);
  e[1].success = e[3].success = true;
  EXPECT_EQ(evasion_success_rate(e), 0.4);
  for (auto& o : e) o.success = true;
  EXPECT_EQ(evasion_success_rate(e), 1.0);
}

TEST(TrajectoryCollisionRate, CleanAndConstructed) {
  const Scene clean = scene_of({car(0, 0, 0, 0, 5, true), car(1, 0, 10, 0, 5)});
  std::vector<AdversaryRun> runs = {{batch_from(clean, 30), 0, 1, clean.map}};
  EXPECT_EQ(trajectory_collision_rate(runs), 0.0);
  const Scene hit = scene_of({car(0, 0, 0, 0, 0, true), car(1, -20, 0, 0, 10), car(2, 50, 10, 0, 0)});
  runs.push_back({batch_from(hit, 30), 0, 1, hit.map});
  EXPECT_EQ(trajectory_collision_rate(runs), 0.5);
}

TEST(OffRoadRate, StationaryOffRoadVehicleCounts) {
  const Scene s = scene_of({car(0, 0, 0, 0, 5, true), car(1, 0, 80, 0, 0.0)});
  std::vector<AdversaryRun> runs = {{batch_from(s, 10), 0, 1, s.map}};
  EXPECT_EQ(off_road_rate(runs), 1.0);
  const Scene ok = scene_of({car(0, 0, 0, 0, 5, true), car(1, 0, 20, 0, 5)});
  runs.push_back({batch_from(ok, 10), 0, 1, ok.map});
  EXPECT_EQ(off_road_rate(runs), 0.5);
}

TEST(Wasserstein, DiracsOneApart) {
  Histogram a(0.0, 2.0, 2), b(0.0, 2.0, 2);
  a.add(0.5);
  b.add(1.5);
  EXPECT_DOUBLE_EQ(wasserstein1(a, b), 1.0);
  EXPECT_EQ(wasserstein1(a, a), 0.0);
}

TEST(Wasserstein, MatchesSortedSampleOracle) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n1(0.0, 2.0), n2(1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Histogram a(-8.0, 8.0, 64), b(-8.0, 8.0, 64);
    std::vector<double> xa, xb;
    for (int i = 0; i < 500; ++i) {
      const double x = n1(rng), y = n2(rng);
      a.add(x);
      b.add(y);
      xa.push_back(bin_center(a, x));
      xb.push_back(bin_center(b, y));
    }
    EXPECT_NEAR(wasserstein1(a, b), sorted_w1(xa, xb), 1e-9);
  }
}

TEST(Wasserstein, ShiftBound) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.5);
  Histogram ref(-8.0, 8.0, 64);
  for (int i = 0; i < 400; ++i) ref.add(n(rng));
  std::vector<double> xs;
  for (int i = 0; i < 400; ++i) xs.push_back(n(rng));
  for (int k = 1; k <= 8; ++k) {
    const double c = k * 0.25;  // whole bins
    Histogram h(-8.0, 8.0, 64), shifted(-8.0, 8.0, 64);
    for (double x : xs) {
      h.add(x);
      shifted.add(x + c);
    }
    EXPECT_LE(wasserstein1(h, shifted), c + 1e-12);
    EXPECT_LE(std::abs(wasserstein1(shifted, ref) - wasserstein1(h, ref)), c + 1e-12);
  }
}

TEST(Wasserstein, RejectsEmptyOrMismatched) {
  Histogram a(0.0, 1.0, 4), b(0.0, 1.0, 4), c(0.0, 2.0, 4);
  a.add(0.1);
  EXPECT_THROW(wasserstein1(a, b), EmptyBatch);
  c.add(0.1);
  EXPECT_THROW(wasserstein1(a, c), InvalidInput);
}

TEST(Histogram, OutOfRangeValuesLandInEdgeBins) {
  Histogram h(-1.0, 1.0, 4);
  h.add(-50.0);
  h.add(50.0);
  h.add(1.0);
  EXPECT_EQ(h.counts, (std::vector<double>{1, 0, 0, 2}));
}

TEST(Realism, PseudometricOnBundles) {
  const Scene a = make_template("cut_in", {12.0, 8.0, 8.0, 0.0, 6.0, 2});
  const Scene b = make_template("intersection");
  SimConfig c;
  c.total_steps = 40;
  const std::vector<TrajectoryBatch> ra = {origin_rollout(a, c)};
  const std::vector<TrajectoryBatch> rb = {origin_rollout(b, c)};
  const RealismStats sa = realism_stats(ra);
  const RealismStats sb = realism_stats(rb);
  EXPECT_EQ(realism_distance(ra, sa), 0.0);
  EXPECT_GE(realism_distance(sa, sb), 0.0);
  EXPECT_EQ(realism_distance(sa, sb), realism_distance(sb, sa));
  EXPECT_THROW(realism_stats(std::vector<TrajectoryBatch>{}), EmptyBatch);
}

TEST(Realism, FeaturesOfKnownMotion) {
  // Constant 2 m/s^2 acceleration in a straight line: all longitudinal mass
  // in one bin, lateral and jerk at zero.
  Trajectory t;
  t.vehicle_id = 0;
  t.dt = 0.125;
  double v = 1.0;
  Vec2 p{};
  for (int k = 0; k < 10; ++k) {
    t.states.push_back({p, 0.0, v});
    v += 0.25;
    p.x += v * t.dt;
  }
  TrajectoryBatch b;
  b.dt = t.dt;
  b.trajectories = {t};
  const RealismStats s = realism_stats(std::vector<TrajectoryBatch>{b});
  EXPECT_EQ(s.features[0].total(), 9.0);
  EXPECT_EQ(s.features[0].counts[static_cast<std::size_t>(std::floor((2.0 + 8.0) / 0.25))], 9.0);
  EXPECT_EQ(s.features[1].counts[32], 9.0);
  EXPECT_EQ(s.features[2].total(), 8.0);
}

TEST(ClosestDistance, Examples) {
  const Scene s = scene_of({car(0, 0, 0, 0, 0, true), car(1, 3, 4, 0, 0)});
  EXPECT_DOUBLE_EQ(closest_distance(batch_from(s, 5), 0, 1), 5.0);
  // Crossing paths: the minimum is reached at the crossing step.
  const Scene x = scene_of({car(0, -10, 0, 0, 10, true), car(1, 0, -10, std::numbers::pi / 2, 10)});
  const TrajectoryBatch b = batch_from(x, 20);
  EXPECT_NEAR(closest_distance(b, 0, 1), 0.0, 1e-12);
  EXPECT_LE(closest_distance(b, 0, 1), distance(b.at(0).states[0].position, b.at(1).states[0].position));
  EXPECT_THROW(closest_distance(b, 0, 5), MissingVehicle);
}

TEST(PlannerCr, Examples) {
  EXPECT_EQ(planner_cr(trace_of({0, 0, 0, 0, 0, 0, 0}), 3.0).cr, 0);
  EXPECT_TRUE(planner_cr(trace_of({0, 0, 0, 0, 0, 0, 0}), 3.0).valid);
  const PlannerTrace t = trace_of({0, 0, 0, 0, 1, 0, 0});
  EXPECT_EQ(planner_cr(t, 2.0).cr, 1);
  EXPECT_EQ(planner_cr(t, 1.0).cr, 0);
  EXPECT_FALSE(planner_cr(trace_of({1, 0, 0, 0, 0, 0, 0}), 3.0).valid);
}

TEST(PlannerCr, Errors) {
  EXPECT_THROW(planner_cr(trace_of({0, 0, 0}), 3.0), InsufficientHorizon);
  EXPECT_THROW(planner_cr(trace_of({0, 0, 0}), 0.7), InvalidInput);
}

TEST(AggregateCr, Examples) {
  const std::vector<PlannerTrace> one = {trace_of({0, 0, 0, 0, 0, 0, 0})};
  EXPECT_EQ(aggregate_cr(one, CrGrouping::kSample, 3.0).value, 0.0);
  EXPECT_EQ(aggregate_cr(one, CrGrouping::kScene, 3.0).value, 0.0);

  const std::vector<PlannerTrace> two = {
      trace_of({0, 1, 0, 0, 0, 0, 0}, "a", "a1"), trace_of({0, 0, 1, 0, 0, 0, 0}, "a", "a2"),
      trace_of({0, 0, 0, 0, 0, 0, 1}, "b", "b1"), trace_of({0, 0, 0, 0, 0, 0, 0}, "b", "b2")};
  EXPECT_EQ(aggregate_cr(two, CrGrouping::kScene, 3.0).value, 1.5);
  EXPECT_EQ(aggregate_cr(two, CrGrouping::kSample, 3.0).value, 0.75);

  const std::vector<PlannerTrace> bad = {trace_of({1, 0, 0, 0, 0, 0, 0}), trace_of({1, 1, 0, 0, 0, 0, 0})};
  const CrAggregate agg = aggregate_cr(bad, CrGrouping::kScene, 3.0);
  EXPECT_EQ(agg.value, 0.0);
  EXPECT_EQ(agg.valid_samples, 0);
  EXPECT_EQ(agg.invalid_samples, 2);
}

TEST(AggregateCr, SampleLevelEqualsRecount) {
  std::mt19937_64 rng(31);
  std::bernoulli_distribution coin(0.15);
  std::vector<PlannerTrace> traces;
  for (int i = 0; i < 200; ++i) {
    std::vector<int> ind(7);
    for (int& x : ind) x = coin(rng);
    traces.push_back(trace_of(ind, "s" + std::to_string(i % 13), std::to_string(i)));
  }
  for (double t : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
    int valid = 0, hits = 0;
    for (const PlannerTrace& tr : traces) {
      if (tr.collision_indicators[0]) continue;
      ++valid;
      hits += std::any_of(tr.collision_indicators.begin(),
                          tr.collision_indicators.begin() + static_cast<long>(t / 0.5) + 1,
                          [](int x) { return x != 0; });
    }
    EXPECT_DOUBLE_EQ(aggregate_cr(traces, CrGrouping::kSample, t).value, static_cast<double>(hits) / valid);
  }
}

TEST(RunPlanner, EmptyRoadHasNoCollisions) {
  const Scene s = scene_of({car(0, 0, 0, 0, 10, true)});
  const PlannerTrace t = run_planner(PlannerKind::kConstantVelocity, batch_from(s, 40), s);
  ASSERT_EQ(t.collision_indicators.size(), 7u);
  for (int x : t.collision_indicators) EXPECT_EQ(x, 0);
  for (std::size_t i = 0; i < t.waypoints.size(); ++i) EXPECT_NEAR(t.waypoints[i].x, 5.0 * i, 1e-9);
}

TEST(RunPlanner, CrossingAtOneAndAHalfSeconds) {
  const Scene s = scene_of({car(0, 0, 0, 0, 10, true), car(1, 15, -15, std::numbers::pi / 2, 10)});
  const TrajectoryBatch b = batch_from(s, 40);
  const PlannerTrace cv = run_planner(PlannerKind::kConstantVelocity, b, s);
  EXPECT_EQ(cv.collision_indicators, (std::vector<int>{0, 0, 0, 1, 0, 0, 0}));
  const PlannerTrace rb = run_planner(PlannerKind::kReactiveBrake, b, s);
  int a = 0, r = 0;
  for (int x : cv.collision_indicators) a += x;
  for (int x : rb.collision_indicators) r += x;
  EXPECT_LE(r, a);
}

TEST(RunPlanner, ReactiveBrakeNoWorseOnCrossingsOverSuite) {
  // Each suite ego keeps its initial state; a single car crosses its
  // constant-velocity path at 1.5 s from the left.
  int cv = 0, rb = 0;
  for (const Scene& s : synthetic_suite()) {
    const VehicleState& e = s.ego();
    const double v = std::max(e.speed, 5.0);
    const Vec2 fwd = unit_from_heading(e.heading);
    const Vec2 left{-fwd.y, fwd.x};
    const Vec2 meet = e.position + 1.5 * v * fwd;
    const Vec2 start = meet + 15.0 * left;
    const Scene x = scene_of({car(0, e.position.x, e.position.y, e.heading, v, true),
                              car(1, start.x, start.y, e.heading - std::numbers::pi / 2, 10)});
    const TrajectoryBatch b = batch_from(x, 40);
    for (int i : run_planner(PlannerKind::kConstantVelocity, b, x).collision_indicators) cv += i;
    for (int i : run_planner(PlannerKind::kReactiveBrake, b, x).collision_indicators) rb += i;
  }
  EXPECT_LE(rb, cv);
  EXPECT_GT(cv, 0);
}

TEST(RunPlanner, SamplesEveryHalfSecond) {
  const Scene s = scene_of({car(0, 0, 0, 0, 10, true)});
  const auto samples = planner_samples(PlannerKind::kReactiveBrake, batch_from(s, 90), s, "p");
  ASSERT_EQ(samples.size(), 13u);  // starts 0, 5, ..., 60 leave a full 3 s horizon
  EXPECT_EQ(samples.front().sample_id, "p@0");
  EXPECT_EQ(samples.back().sample_id, "p@60");
  EXPECT_THROW(run_planner(PlannerKind::kReactiveBrake, batch_from(s, 20), s), InsufficientHorizon);
}

TEST(PlannerKind, Names) {
  EXPECT_EQ(planner_from_string("constant_velocity"), PlannerKind::kConstantVelocity);
  EXPECT_EQ(to_string(PlannerKind::kReactiveBrake), "reactive_brake");
  EXPECT_THROW(planner_from_string("uniad"), InvalidInput);
}
