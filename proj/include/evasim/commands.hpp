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

#include <iosfwd>
#include <string>
#include <vector>

#include "evasim/config.hpp"
#include "evasim/templates.hpp"

namespace evasim {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInternalError = 2;

enum class SelectorKind { kClosest, kRule, kRandom, kFromAnnotation };
SelectorKind selector_from_string(const std::string& s);
std::string to_string(SelectorKind k);

/// File-name-safe form of a scene id.
std::string file_stem(const std::string& scene_id);

/// Writes <out>/annotations/<scene>.json per scene. Malformed scene files are
/// skipped and listed in <out>/errors.log; the exit code is then 1.
int cmd_annotate(const RunConfig& cfg, const std::string& scenes_path, const std::string& out_dir,
                 std::ostream& log);

/// Selection, collision stage, evasion stage and export per scene.
///
///   <out>/scenarios/<scene>__adv<id>.json        exported evasion scenarios
///   <out>/runs/<scene>__adv<id>.collision.json   collision-stage batch
///   <out>/runs/<scene>__adv<id>.evasion.json     evasion-stage batch (valid collisions)
///   <out>/origin/<scene>__adv<id>.json           unguided rollout, same seed
///   <out>/ledger.json                            one entry per scene
///
/// `annotations_dir` is read by the from_annotation selector; when empty the
/// annotation is computed in place.
int cmd_generate(const RunConfig& cfg, const std::string& scenes_path, SelectorKind selector,
                 const std::string& out_dir, const std::string& annotations_dir,
                 std::ostream& log);

/// Reads a cmd_generate output tree and writes <out>/metrics.json.
int cmd_evaluate(const RunConfig& cfg, const std::string& results_dir, const std::string& out_dir,
                 std::ostream& log);

struct AblationAxis {
  std::string param;  // e.g. "collision_stage.alpha" or "lambda_decay"
  std::vector<double> values;
};

/// The full grid: alpha, beta, gamma of the collision stage, beta and gamma of
/// the evasion stage over {0, 1, 50}, then lambda_decay over {0, 0.9, 1}.
std::vector<AblationAxis> default_ablation_grid();
/// "param=v1,v2;param=v1" form; empty text gives the default grid.
std::vector<AblationAxis> parse_ablation_grid(const std::string& text);
/// Applies one grid value to a copy of the config.
RunConfig with_param(const RunConfig& cfg, const std::string& param, double value);

/// One metrics row per (axis, value); writes <out>/ablation.json and .csv.
int cmd_ablate(const RunConfig& cfg, const std::string& scenes_path,
               const std::vector<AblationAxis>& grid, const std::string& out_dir,
               std::ostream& log);

int cmd_render(const std::string& scenario_path, const std::string& out_path, int stride,
               std::ostream& log);

/// name "suite" writes every scene of synthetic_suite() into out_path as a
/// directory; any other name writes one scene file.
int cmd_template(const std::string& name, const TemplateParams& params,
                 const std::string& out_path, std::ostream& log);

}  // namespace evasim
