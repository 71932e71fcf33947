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

#include "evasim/selection.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <regex>

#include "evasim/errors.hpp"

namespace evasim {

std::set<int> candidates_within(const Scene& scene, double D) {
  if (!(D > 0.0)) {
    throw InvalidInput("candidate radius must be positive");
  }
  const VehicleState& ego = scene.ego();
  std::set<int> out;
  for (const VehicleState& v : scene.vehicles) {
    if (!v.is_ego && center_distance(v, ego) <= D) {
      out.insert(v.id);
    }
  }
  return out;
}

CandidateSummary summarize(const CollisionOutcome& outcome, std::uint64_t seed) {
  return {outcome.valid, outcome.failure_reason, outcome.collision_step, seed};
}

AnnotationRecord annotate_scoll(const Scene& scene, const SimConfig& cfg, double D) {
  AnnotationRecord rec;
  rec.scene_id = scene.scene_id;
  rec.candidates = candidates_within(scene, D);
  for (int id : rec.candidates) {
    SimConfig c = cfg;
    c.seed = candidate_seed(cfg.seed, id);
    try {
      const CollisionOutcome o = run_collision_stage(scene, id, c);
      rec.per_candidate[id] = summarize(o, c.seed);
      if (o.valid) {
        rec.s_coll.insert(id);
      }
    } catch (const Error& e) {
      rec.errors[id] = e.what();
    }
  }
  return rec;
}

SelectorPrediction select_closest(const Scene& scene, double D) {
  const VehicleState& ego = scene.ego();
  SelectorPrediction out{scene.scene_id, std::nullopt};
  double best = std::numeric_limits<double>::infinity();
  for (int id : candidates_within(scene, D)) {
    const double d = center_distance(scene.at(id), ego);
    if (d < best) {  // ids ascend, so ties keep the smaller id
      best = d;
      out.choice = id;
    }
  }
  return out;
}

SelectorPrediction select_rule_based(const Scene& scene, double D) {
  const VehicleState& ego = scene.ego();
  const Vec2 v_ego = ego.speed * unit_from_heading(ego.heading);
  SelectorPrediction out{scene.scene_id, std::nullopt};
  double best = -std::numeric_limits<double>::infinity();
  for (int id : candidates_within(scene, D)) {
    const VehicleState& v = scene.at(id);
    const Vec2 rel_v = v.speed * unit_from_heading(v.heading) - v_ego;
    const double d = center_distance(v, ego);
    const double closing =
        d > 0.0 ? dot(rel_v, (1.0 / d) * (ego.position - v.position)) : norm(rel_v);
    if (!(closing > 0.0)) {
      continue;
    }
    const double score = closing / std::max(d, 1.0);
    if (score > best) {
      best = score;
      out.choice = id;
    }
  }
  return out;
}

SelectorPrediction select_random_adjacent(const Scene& scene, double D, Rng& rng,
                                          double lane_width) {
  const VehicleState& ego = scene.ego();
  const Vec2 axis = unit_from_heading(ego.heading);
  std::vector<int> pool;
  for (int id : candidates_within(scene, D)) {
    const double lateral = cross(axis, scene.at(id).position - ego.position);
    if (std::abs(lateral) <= lane_width + 1e-6) {
      pool.push_back(id);
    }
  }
  SelectorPrediction out{scene.scene_id, std::nullopt};
  if (!pool.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    out.choice = pool[pick(rng)];
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::string fold(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

}  // namespace

std::optional<std::string> extract_answer(std::string_view output) {
  constexpr std::string_view kOpen = "<answer>";
  constexpr std::string_view kClose = "</answer>";
  const std::size_t open = output.find(kOpen);
  if (open == std::string_view::npos) {
    return std::nullopt;
  }
  const std::size_t body = open + kOpen.size();
  const std::size_t close = output.find(kClose, body);
  if (close == std::string_view::npos) {
    return std::nullopt;
  }
  return std::string(trim(output.substr(body, close - body)));
}

int format_reward(std::string_view output) {
  // Block bodies may not contain further think/answer tags.
  static const std::regex kPattern(
      R"(^<think>(?:(?!</?think>|</?answer>)[\s\S])*</think>\s*)"
      R"(<answer>(?:(?!</?think>|</?answer>)[\s\S])*</answer>$)");
  return std::regex_match(output.begin(), output.end(), kPattern) ? 1 : 0;
}

double normalized_similarity(std::string_view a, std::string_view b) {
  const std::string fa = fold(a);
  const std::string fb = fold(b);
  const std::size_t len = std::max(fa.size(), fb.size());
  if (len == 0) {
    return 1.0;
  }
  return 1.0 - static_cast<double>(levenshtein(fa, fb)) / static_cast<double>(len);
}

double accuracy_reward(std::string_view output, const std::set<int>& s_coll) {
  const std::optional<std::string> ans = extract_answer(output);
  if (!ans) {
    return 0.0;
  }
  if (s_coll.empty()) {
    return normalized_similarity(*ans, kNoVehicleAnswer);
  }
  int id = 0;
  const char* first = ans->data();
  const char* last = first + ans->size();
  const auto [ptr, ec] = std::from_chars(first, last, id);
  if (ans->empty() || ec != std::errc() || ptr != last) {
    return 0.0;
  }
  return s_coll.count(id) ? 1.0 : 0.0;
}

SelectorScore evaluate_selector(const std::vector<SelectorPrediction>& predictions,
                                const std::vector<AnnotationRecord>& annotations) {
  std::map<std::string, const AnnotationRecord*> by_id;
  for (const AnnotationRecord& a : annotations) {
    if (!by_id.emplace(a.scene_id, &a).second) {
      throw MismatchedScenes("duplicate annotation for scene '" + a.scene_id + "'");
    }
  }
  if (predictions.size() != annotations.size()) {
    throw MismatchedScenes("prediction and annotation counts differ");
  }
  std::set<std::string> seen;
  SelectorScore s;
  for (const SelectorPrediction& p : predictions) {
    const auto it = by_id.find(p.scene_id);
    if (it == by_id.end() || !seen.insert(p.scene_id).second) {
      throw MismatchedScenes("no unique annotation for scene '" + p.scene_id + "'");
    }
    const AnnotationRecord& a = *it->second;
    if (p.choice) {
      ++s.predicted;
      if (a.s_coll.count(*p.choice)) {
        ++s.true_positives;
      }
    }
    if (!a.s_coll.empty()) {
      ++s.positives;
    }
  }
  s.precision = s.predicted ? static_cast<double>(s.true_positives) / s.predicted : 0.0;
  s.recall = s.positives ? static_cast<double>(s.true_positives) / s.positives : 0.0;
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                                      : 0.0;
  return s;
}

}  // namespace evasim
