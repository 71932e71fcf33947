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

#include "evasim/map_model.hpp"

#include <algorithm>
#include <limits>

#include "evasim/errors.hpp"

namespace evasim {

namespace {
constexpr double kBoundaryEps = 1e-9;
}  // namespace

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw InvalidInput("polygon needs at least 3 vertices");
  }
  lo_ = hi_ = vertices_.front();
  for (const Vec2& v : vertices_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw InvalidInput("polygon vertex is not finite");
    }
    lo_ = {std::min(lo_.x, v.x), std::min(lo_.y, v.y)};
    hi_ = {std::max(hi_.x, v.x), std::max(hi_.y, v.y)};
  }
  const double area = signed_area();
  if (std::abs(area) <= 0.0) {
    throw InvalidInput("polygon has zero area");
  }
  orientation_ = area > 0.0 ? 1.0 : -1.0;
  const std::size_t n = vertices_.size();
  edge_len_.resize(n);
  convex_ = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 b = vertices_[(i + 1) % n];
    const Vec2 c = vertices_[(i + 2) % n];
    edge_len_[i] = distance(a, b);
    if (orientation_ * cross(b - a, c - b) < 0.0) {
      convex_ = false;
    }
  }
}

bool Polygon::on_boundary(Vec2 p) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 ab = vertices_[(i + 1) % n] - a;
    const Vec2 ap = p - a;
    const double len = edge_len_[i];
    if (std::abs(cross(ab, ap)) <= kBoundaryEps * len) {
      const double t = dot(ap, ab);
      if (t >= -kBoundaryEps * len && t <= len * len + kBoundaryEps * len) {
        return true;
      }
    }
  }
  return false;
}

double Polygon::signed_area() const {
  double acc = 0.0;
  for (std::size_t i = 0, n = vertices_.size(); i < n; ++i) {
    acc += cross(vertices_[i], vertices_[(i + 1) % n]);
  }
  return 0.5 * acc;
}

bool Polygon::contains(Vec2 p) const {
  if (p.x < lo_.x - kBoundaryEps || p.x > hi_.x + kBoundaryEps || p.y < lo_.y - kBoundaryEps ||
      p.y > hi_.y + kBoundaryEps) {
    return false;
  }
  const std::size_t n = vertices_.size();
  if (convex_) {
    // Inside the closed half-plane of every edge, up to the boundary tolerance.
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = vertices_[i];
      const Vec2 b = vertices_[(i + 1) % n];
      if (orientation_ * cross(b - a, p - a) < -kBoundaryEps * edge_len_[i]) {
        return false;
      }
    }
    return true;
  }
  if (on_boundary(p)) {
    return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = vertices_[j];
    const Vec2 b = vertices_[i];
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

Vec2 Polygon::closest_boundary_point(Vec2 p) const {
  Vec2 best = vertices_.front();
  double best_d = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 q = closest_point_on_segment(p, vertices_[i], vertices_[(i + 1) % n]);
    const double d = distance(p, q);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

bool MapModel::convex_cover(std::span<const Vec2> pts) const {
  for (const Polygon& poly : drivable_) {
    if (poly.convex() &&
        std::all_of(pts.begin(), pts.end(), [&](Vec2 p) { return poly.contains(p); })) {
      return true;
    }
  }
  return false;
}

std::optional<Vec2> MapModel::nearest_boundary_point(Vec2 p) const {
  std::optional<Vec2> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Polygon& poly : drivable_) {
    const Vec2 q = poly.closest_boundary_point(p);
    const double d = distance(p, q);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

bool point_on_road(const MapModel& map, Vec2 p) {
  return std::any_of(map.drivable_polygons().begin(), map.drivable_polygons().end(),
                     [p](const Polygon& poly) { return poly.contains(p); });
}

Polygon rect_polygon(double x0, double y0, double x1, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

}  // namespace evasim
