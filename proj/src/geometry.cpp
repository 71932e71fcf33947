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

#include "evasim/geometry.hpp"

#include <algorithm>
#include <numbers>

#include "evasim/errors.hpp"

namespace evasim {

double normalize_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, kTwoPi);
  if (a <= -std::numbers::pi) {
    a += kTwoPi;
  } else if (a > std::numbers::pi) {
    a -= kTwoPi;
  }
  return a;
}

OrientedBox::OrientedBox(Vec2 center, double heading, double length, double width)
    : center_(center),
      heading_(heading),
      length_(length),
      width_(width),
      cos_(std::cos(heading)),
      sin_(std::sin(heading)) {
  if (!(length > 0.0) || !(width > 0.0) || !std::isfinite(length) || !std::isfinite(width)) {
    throw InvalidInput("box dimensions must be positive and finite");
  }
  if (!std::isfinite(center.x) || !std::isfinite(center.y) || !std::isfinite(heading)) {
    throw InvalidInput("box pose must be finite");
  }
}

Vec2 OrientedBox::to_map(Vec2 local) const {
  return {center_.x + cos_ * local.x - sin_ * local.y,
          center_.y + sin_ * local.x + cos_ * local.y};
}

Vec2 OrientedBox::to_local(Vec2 p) const {
  const Vec2 d = p - center_;
  return {cos_ * d.x + sin_ * d.y, -sin_ * d.x + cos_ * d.y};
}

std::array<Vec2, 4> OrientedBox::corners() const {
  const double hl = 0.5 * length_;
  const double hw = 0.5 * width_;
  return {to_map({hl, hw}), to_map({-hl, hw}), to_map({-hl, -hw}), to_map({hl, -hw})};
}

namespace {

// Half-extent of the box projected on a unit axis.
double projected_radius(const OrientedBox& b, Vec2 axis) {
  return 0.5 * b.length() * std::abs(dot(b.axis_long(), axis)) +
         0.5 * b.width() * std::abs(dot(b.axis_lat(), axis));
}

}  // namespace

bool obb_overlap(const OrientedBox& a, const OrientedBox& b) {
  const Vec2 d = b.center() - a.center();
  const std::array<Vec2, 4> axes = {a.axis_long(), a.axis_lat(), b.axis_long(), b.axis_lat()};
  for (const Vec2& axis : axes) {
    const double sep = std::abs(dot(d, axis));
    if (sep > projected_radius(a, axis) + projected_radius(b, axis)) {
      return false;
    }
  }
  return true;
}

double penalty_distance(const OrientedBox& a, const OrientedBox& b) {
  return 0.5 * (a.diag() + b.diag());
}

std::vector<Vec2> footprint_offsets(double length, double width, FootprintGrid grid) {
  if (grid.rows < 2 || grid.cols < 2) {
    throw InvalidInput("footprint grid needs at least 2 rows and 2 cols");
  }
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(grid.rows * grid.cols));
  for (int r = 0; r < grid.rows; ++r) {
    const double ly = -0.5 * width + width * r / (grid.rows - 1);
    for (int c = 0; c < grid.cols; ++c) {
      const double lx = -0.5 * length + length * c / (grid.cols - 1);
      out.push_back({lx, ly});
    }
  }
  return out;
}

std::vector<Vec2> footprint_points(const OrientedBox& box, FootprintGrid grid) {
  std::vector<Vec2> pts = footprint_offsets(box.length(), box.width(), grid);
  for (Vec2& p : pts) {
    p = box.to_map(p);
  }
  return pts;
}

Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) {
    return a;
  }
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

}  // namespace evasim
