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
#include <cmath>
#include <vector>

namespace evasim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::sqrt(v.x * v.x + v.y * v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit_from_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Footprint sampling grid: rows run across the width, cols along the length.
struct FootprintGrid {
  int rows = 3;
  int cols = 5;
};

/// Rectangle in the map frame. Dimensions are validated on construction.
class OrientedBox {
 public:
  OrientedBox(Vec2 center, double heading, double length, double width);

  Vec2 center() const { return center_; }
  double heading() const { return heading_; }
  double length() const { return length_; }
  double width() const { return width_; }
  double diag() const { return std::sqrt(length_ * length_ + width_ * width_); }

  Vec2 axis_long() const { return {cos_, sin_}; }
  Vec2 axis_lat() const { return {-sin_, cos_}; }

  /// Maps a point given in box-local coordinates (x along length) to the map frame.
  Vec2 to_map(Vec2 local) const;
  /// Inverse of to_map.
  Vec2 to_local(Vec2 p) const;

  /// Corners counter-clockwise from front-left.
  std::array<Vec2, 4> corners() const;

 private:
  Vec2 center_;
  double heading_;
  double length_;
  double width_;
  double cos_;
  double sin_;
};

/// Closed-rectangle intersection test using the separating axis theorem.
bool obb_overlap(const OrientedBox& a, const OrientedBox& b);

/// Sum of the two half-diagonals. Center distance above this certifies that
/// the boxes cannot overlap under any relative orientation.
double penalty_distance(const OrientedBox& a, const OrientedBox& b);

/// Box-local offsets of the footprint sample points (row-major, rows across
/// the width). Requires rows, cols >= 2.
std::vector<Vec2> footprint_offsets(double length, double width, FootprintGrid grid);

/// rows x cols points uniformly covering the rectangle, corners included.
std::vector<Vec2> footprint_points(const OrientedBox& box, FootprintGrid grid);

/// Closest point on segment [a, b] to p.
Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b);

}  // namespace evasim
