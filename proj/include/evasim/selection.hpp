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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evasim/random.hpp"
#include "evasim/scene.hpp"
#include "evasim/simulation.hpp"

namespace evasim {

inline constexpr double kDefaultCandidateRadius = 25.0;
inline constexpr const char* kNoVehicleAnswer = "no vehicle is appropriate";

/// Non-ego vehicles whose center lies within D of the ego center (inclusive).
std::set<int> candidates_within(const Scene& scene, double D);

/// Seed of the collision-stage run for one candidate.
inline std::uint64_t candidate_seed(std::uint64_t seed, int vehicle_id) {
  return mix_seed(seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(vehicle_id)));
}

struct CandidateSummary {
  bool valid = false;
  std::optional<FailureReason> failure_reason;
  std::optional<int> collision_step;
  std::uint64_t seed = 0;
  friend bool operator==(const CandidateSummary&, const CandidateSummary&) = default;
};

struct AnnotationRecord {
  std::string scene_id;
  std::set<int> candidates;
  std::set<int> s_coll;
  std::map<int, CandidateSummary> per_candidate;
  /// Candidates whose simulation raised; they are not part of s_coll.
  std::map<int, std::string> errors;
  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

CandidateSummary summarize(const CollisionOutcome& outcome, std::uint64_t seed);

/// Runs the collision stage for every candidate with seed candidate_seed(cfg.seed, id).
AnnotationRecord annotate_scoll(const Scene& scene, const SimConfig& cfg,
                                double D = kDefaultCandidateRadius);

struct SelectorPrediction {
  std::string scene_id;
  std::optional<int> choice;  // nullopt is NONE
  friend bool operator==(const SelectorPrediction&, const SelectorPrediction&) = default;
};

SelectorPrediction select_closest(const Scene& scene, double D = kDefaultCandidateRadius);

/// Largest closing speed / max(distance, 1 m) among candidates that are closing in.
SelectorPrediction select_rule_based(const Scene& scene, double D = kDefaultCandidateRadius);

/// Uniform pick among candidates whose lateral offset from the ego heading
/// axis is at most one lane width.
SelectorPrediction select_random_adjacent(const Scene& scene, double D, Rng& rng,
                                          double lane_width = 3.7);

/// Trimmed content of the first <answer>...</answer> pair.
std::optional<std::string> extract_answer(std::string_view output);

/// 1 iff the output is exactly a think block followed by an answer block,
/// with only whitespace between them.
int format_reward(std::string_view output);

/// 1 - levenshtein / max_len over case-folded strings; 1 for two empty strings.
double normalized_similarity(std::string_view a, std::string_view b);

double accuracy_reward(std::string_view output, const std::set<int>& s_coll);

struct SelectorScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int true_positives = 0;
  int predicted = 0;
  int positives = 0;
};

/// Scene-level scoring; throws MismatchedScenes unless the scene ids match one to one.
SelectorScore evaluate_selector(const std::vector<SelectorPrediction>& predictions,
                                const std::vector<AnnotationRecord>& annotations);

}  // namespace evasim
