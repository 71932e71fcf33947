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

#include <optional>
#include <span>
#include <vector>

#include "evasim/geometry.hpp"

namespace evasim {

/// Simple polygon with at least three vertices and nonzero area.
class Polygon {
 public:
  explicit Polygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  double signed_area() const;
  bool convex() const { return convex_; }

  /// Inside or on the boundary.
  bool contains(Vec2 p) const;
  /// Closest point on the polygon boundary.
  Vec2 closest_boundary_point(Vec2 p) const;

 private:
  bool on_boundary(Vec2 p) const;

  std::vector<Vec2> vertices_;
  std::vector<double> edge_len_;
  Vec2 lo_;
  Vec2 hi_;
  double orientation_ = 1.0;  // +1 counter-clockwise, -1 clockwise
  bool convex_ = false;
};

/// Drivable area as a union of possibly overlapping polygons.
class MapModel {
 public:
  MapModel() = default;
  explicit MapModel(std::vector<Polygon> drivable) : drivable_(std::move(drivable)) {}

  const std::vector<Polygon>& drivable_polygons() const { return drivable_; }
  bool empty() const { return drivable_.empty(); }

  /// Sufficient test: some convex drivable polygon contains every point.
  bool convex_cover(std::span<const Vec2> pts) const;

  /// Closest point on any drivable polygon boundary; nullopt for an empty map.
  std::optional<Vec2> nearest_boundary_point(Vec2 p) const;

 private:
  std::vector<Polygon> drivable_;
};

/// True iff p lies inside or on the boundary of the drivable union.
bool point_on_road(const MapModel& map, Vec2 p);

/// Axis-aligned rectangle polygon helper used by scene templates and tests.
Polygon rect_polygon(double x0, double y0, double x1, double y1);

}  // namespace evasim
