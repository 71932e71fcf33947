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

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evasim/scene.hpp"
#include "evasim/simulation.hpp"

namespace evasim {

double collision_success_rate(std::span<const CollisionOutcome> outcomes);
double evasion_success_rate(std::span<const EvasionOutcome> outcomes);

/// Final trajectory of one adversary together with the map it drives on.
struct AdversaryRun {
  TrajectoryBatch batch;
  int ego_id = 0;
  int adv_id = 0;
  MapModel map;
};

/// Fraction of adversaries that overlap any other vehicle at any step.
double trajectory_collision_rate(std::span<const AdversaryRun> runs);
/// Fraction of adversaries with an off-road onset (see offroad_onset).
double off_road_rate(std::span<const AdversaryRun> runs, FootprintGrid grid = {},
                     int consecutive = 3);

/// Fixed-grid histogram; values outside [lo, hi] land in the edge bins.
struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> counts;

  Histogram() = default;
  Histogram(double lo, double hi, std::size_t bins);
  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  void add(double value);
  double total() const;
  friend bool operator==(const Histogram&, const Histogram&) = default;
};

/// W1 between the normalized histograms: sum |F - G| * bin_width over bins.
/// Grids must match.
double wasserstein1(const Histogram& a, const Histogram& b);

/// Longitudinal acceleration, lateral acceleration (speed * yaw rate) and jerk.
struct RealismStats {
  static constexpr std::size_t kBins = 64;
  std::array<Histogram, 3> features;
  friend bool operator==(const RealismStats&, const RealismStats&) = default;
};

RealismStats empty_realism_stats();
/// Accumulates every vehicle of every batch. Throws EmptyBatch if no feature
/// sample can be formed.
RealismStats realism_stats(std::span<const TrajectoryBatch> batches);
double realism_distance(std::span<const TrajectoryBatch> batches, const RealismStats& reference);
double realism_distance(const RealismStats& a, const RealismStats& b);

/// Minimum center distance between ego and adversary over all steps.
double closest_distance(const TrajectoryBatch& batch, int ego_id, int adv_id);

struct PlannerTrace {
  std::string sample_id;
  std::string scene_id;
  std::vector<Vec2> waypoints;           // 0.5 s spacing, index 0 is the start
  std::vector<int> collision_indicators;  // one per waypoint
};

struct CrValue {
  int cr = 0;
  bool valid = true;
};

/// cr(t) over indicators 0..t/0.5; invalid when indicator 0 is set. t must
/// be a positive multiple of 0.5 s.
CrValue planner_cr(const PlannerTrace& trace, double t);

enum class CrGrouping { kSample, kScene };

struct CrAggregate {
  double value = 0.0;
  int valid_samples = 0;
  int invalid_samples = 0;
  int groups = 0;
};

/// Sample level: mean cr over valid samples. Scene level: mean over scenes
/// with a valid sample of the number of valid colliding samples.
CrAggregate aggregate_cr(std::span<const PlannerTrace> traces, CrGrouping grouping, double t);

enum class PlannerKind { kConstantVelocity, kReactiveBrake };

std::string to_string(PlannerKind k);
PlannerKind planner_from_string(const std::string& s);

struct PlannerOptions {
  int start_step = 0;
  double horizon_s = 3.0;
  double waypoint_dt = 0.5;
  double brake_decel = 4.0;  // m/s^2
  double brake_ttc = 1.5;    // s
};

/// Replaces the ego of `scenario` from `start_step` on with the planner and
/// checks its box against every other vehicle at each waypoint.
PlannerTrace run_planner(PlannerKind planner, const TrajectoryBatch& scenario, const Scene& scene,
                         const PlannerOptions& opts = {});

/// One trace per start frame at waypoint_dt spacing whose horizon fits in the
/// scenario; sample ids are "<prefix>@<start_step>".
std::vector<PlannerTrace> planner_samples(PlannerKind planner, const TrajectoryBatch& scenario,
                                          const Scene& scene, const std::string& prefix,
                                          const PlannerOptions& opts = {});

struct SceneBreakdown {
  int candidates = 0;
  int valid_collisions = 0;
  int evasions = 0;
  friend bool operator==(const SceneBreakdown&, const SceneBreakdown&) = default;
};

struct MetricsReport {
  double csr = 0.0;
  double esr = 0.0;
  double collision_rate = 0.0;
  double off_road_rate = 0.0;
  double realism = 0.0;
  double closest_distance_mean = 0.0;
  std::map<std::string, SceneBreakdown> per_scene;
};

}  // namespace evasim
