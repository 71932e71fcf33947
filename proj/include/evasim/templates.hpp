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

#include <string>
#include <vector>

#include "evasim/scene.hpp"

namespace evasim {

/// Geometry knobs shared by the scene templates. Not every template reads
/// every field; see make_template.
struct TemplateParams {
  double gap = 30.0;             // longitudinal spacing ego -> adversary (m)
  double ego_speed = 8.0;        // m/s
  double adv_speed = 8.0;        // m/s
  double lateral_offset = 0.0;   // adversary offset from its nominal lane center (m)
  double strip_width = 6.0;      // wall template: non-drivable median width (m)
  int background = 0;            // number of extra non-adversarial vehicles
};

inline constexpr double kLaneWidth = 3.7;
/// boxed_in caps its front and rear spacing here (twice the penalty distance
/// of two default 4.5 x 2 m cars is about 9.85 m).
inline constexpr double kBoxedInMaxGap = 9.5;

/// Builds a deterministic scene. Vehicle 0 is always the ego; vehicle 1 is
/// the template's intended adversary; background vehicles use ids >= 2.
///
///  head_on        two-lane road; adversary `gap` ahead driving toward the ego,
///                 in the ego's lane shifted by lateral_offset.
///  cut_in         two same-direction lanes; adversary `gap` ahead in the
///                 adjacent lane.
///  rear_approach  adversary `gap` behind in the ego's lane.
///  wall           two parallel roads separated by a non-drivable strip of
///                 strip_width; the adversary is on the far road.
///  boxed_in       three lanes; neighbors in front, behind, left and right of
///                 the ego within twice the penalty distance. The front and rear
///                 neighbors sit min(gap, kBoxedInMaxGap) away.
///  intersection   perpendicular crossing; the adversary approaches from the
///                 right-hand road and reaches the conflict zone with the ego.
///
/// Throws InvalidInput for an unknown name.
Scene make_template(const std::string& name, const TemplateParams& params = {});

std::vector<std::string> template_names();

/// Deterministic synthetic suite of parameterized template scenes (36 scenes).
std::vector<Scene> synthetic_suite();

}  // namespace evasim
