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
#include <string>
#include <vector>

#include "evasim/metrics.hpp"
#include "evasim/simulation.hpp"

namespace evasim {

/// Everything a CLI run reads from its config file. Defaults reproduce the
/// reference setup (D = 25 m, collision stage 1/50/1, evasion stage 1/1,
/// lambda 0.9).
struct RunConfig {
  std::uint64_t seed = 0;
  double D = 25.0;
  double lane_width = 3.7;
  SimConfig sim;
  PlannerKind planner = PlannerKind::kReactiveBrake;
  std::vector<double> cr_horizons = {1.0, 2.0, 3.0};
  std::string realism_reference;  // empty: use the origin rollouts
  std::string output_dir = "out";
  int jobs = 0;                   // 0: logical cores

  /// sim with the run seed applied.
  SimConfig sim_config() const;
  void validate() const;
};

/// Parses the INI/TOML-style subset used by run configs:
///
///   # comment
///   seed = 7
///   [collision_stage]
///   alpha = 1.0
///   [prior]
///   noise_schedule = [0.5, 0.25, 0.0]
///
/// Sections: top level (seed, D, lane_width, jobs, output_dir), sim, prior,
/// guidance, collision_stage, evasion_stage, metrics. Unknown sections or
/// keys throw InvalidInput with the line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const RunConfig& cfg);

}  // namespace evasim
