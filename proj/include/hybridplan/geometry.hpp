// Copyright 2026 The hybridplan Authors
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

#ifndef HYBRIDPLAN__GEOMETRY_HPP_
#define HYBRIDPLAN__GEOMETRY_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

namespace hybridplan
{

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Signed difference a - b on the circle, in (-pi, pi].
inline double angle_diff(double a, double b) { return normalize_angle(a - b); }

struct Vec2
{
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2 &) const = default;

  constexpr double dot(const Vec2 & o) const { return x * o.x + y * o.y; }
  constexpr double cross(const Vec2 & o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 unit_vector(double heading) { return {std::cos(heading), std::sin(heading)}; }

/// Planar pose (position + heading).
struct Pose2
{
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  Vec2 position() const { return {x, y}; }
  bool operator==(const Pose2 &) const = default;
};

/// Expresses `pose` in the frame attached to `ref`.
Pose2 to_ego_frame(const Pose2 & pose, const Pose2 & ref);
/// Inverse of to_ego_frame: lifts a `ref`-relative pose back to the world frame.
Pose2 from_ego_frame(const Pose2 & local, const Pose2 & ref);

double point_segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b);
bool segments_intersect(const Vec2 & a, const Vec2 & b, const Vec2 & c, const Vec2 & d);
double segment_segment_distance(const Vec2 & a, const Vec2 & b, const Vec2 & c, const Vec2 & d);

/// Arclength/lateral coordinates of a point relative to a polyline.
struct PolylineProjection
{
  double s{0.0};        // arclength of the closest point
  double d{0.0};        // signed lateral offset, left positive
  std::size_t segment{0};
  Vec2 closest;
};

/// Open polyline with cumulative arclength. Immutable after construction.
class Polyline
{
public:
  Polyline() = default;
  /// Throws std::invalid_argument on fewer than two points or zero total length.
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2> & points() const { return points_; }
  double length() const { return cum_s_.empty() ? 0.0 : cum_s_.back(); }
  bool empty() const { return points_.empty(); }

  /// Closest-point projection; endpoints clamp (no extrapolation). Ties go to the smallest s.
  /// The optional window restricts the search to segments overlapping [s_lo, s_hi].
  PolylineProjection project(const Vec2 & p) const;
  PolylineProjection project(const Vec2 & p, double s_lo, double s_hi) const;

  Vec2 point_at(double s) const;
  /// Tangent heading, linearly blended between vertex tangents so it is continuous in s.
  double heading_at(double s) const;
  /// Signed curvature estimate from the blended heading.
  double curvature_at(double s) const;
  Vec2 normal_at(double s) const;

  /// Polyline shifted laterally by `offset` (left positive).
  Polyline offset(double offset) const;

  bool operator==(const Polyline & o) const { return points_ == o.points_; }

private:
  std::size_t segment_index(double s) const;
  double vertex_tangent(std::size_t i) const;

  std::vector<Vec2> points_;
  std::vector<double> cum_s_;
  std::vector<double> seg_heading_;
};

/// Closed simple polygon with a uniform-grid edge index for fast containment and
/// boundary-distance queries. Immutable after construction.
class Polygon
{
public:
  Polygon() = default;
  explicit Polygon(std::vector<Vec2> vertices);

  const std::vector<Vec2> & vertices() const { return vertices_; }
  bool empty() const { return vertices_.size() < 3; }

  bool contains(const Vec2 & p) const;
  /// Distance from p to the nearest boundary edge.
  double boundary_distance(const Vec2 & p) const;
  /// Minimum distance between the polygon boundary and any of the given segments.
  double boundary_distance_to_segments(const std::vector<std::array<Vec2, 2>> & segments) const;

  bool operator==(const Polygon & o) const { return vertices_ == o.vertices_; }

private:
  struct Cell
  {
    std::vector<std::size_t> edges;
    bool center_inside{false};
  };

  bool contains_brute(const Vec2 & p) const;
  std::optional<std::size_t> cell_of(const Vec2 & p) const;
  void build_index();

  std::vector<Vec2> vertices_;
  Vec2 min_{};
  Vec2 max_{};
  double cell_size_{1.0};
  std::size_t nx_{0};
  std::size_t ny_{0};
  std::vector<Cell> cells_;
};

}  // namespace hybridplan

#endif  // HYBRIDPLAN__GEOMETRY_HPP_
