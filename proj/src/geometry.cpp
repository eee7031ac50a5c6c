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

#include "hybridplan/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>

namespace hybridplan
{

double normalize_angle(double angle)
{
  double a = std::fmod(angle + kPi, 2.0 * kPi);
  if (a <= 0.0) {
    a += 2.0 * kPi;
  }
  return a - kPi;
}

Pose2 to_ego_frame(const Pose2 & pose, const Pose2 & ref)
{
  const double c = std::cos(ref.theta);
  const double s = std::sin(ref.theta);
  const double dx = pose.x - ref.x;
  const double dy = pose.y - ref.y;
  return {c * dx + s * dy, -s * dx + c * dy, normalize_angle(pose.theta - ref.theta)};
}

Pose2 from_ego_frame(const Pose2 & local, const Pose2 & ref)
{
  const double c = std::cos(ref.theta);
  const double s = std::sin(ref.theta);
  return {
    ref.x + c * local.x - s * local.y, ref.y + s * local.x + c * local.y,
    normalize_angle(local.theta + ref.theta)};
}

double point_segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 <= 0.0) {
    return (p - a).norm();
  }
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

namespace
{
int orientation(const Vec2 & a, const Vec2 & b, const Vec2 & c)
{
  const double v = (b - a).cross(c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(const Vec2 & a, const Vec2 & b, const Vec2 & p)
{
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

// Liang-Barsky clip of segment ab against an axis-aligned rectangle.
bool segment_touches_rect(const Vec2 & a, const Vec2 & b, const Vec2 & lo, const Vec2 & hi)
{
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - lo.x, hi.x - a.x, a.y - lo.y, hi.y - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) return false;
  }
  return true;
}
}  // namespace

bool segments_intersect(const Vec2 & a, const Vec2 & b, const Vec2 & c, const Vec2 & d)
{
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double segment_segment_distance(const Vec2 & a, const Vec2 & b, const Vec2 & c, const Vec2 & d)
{
  if (segments_intersect(a, b, c, d)) {
    return 0.0;
  }
  return std::min(
    std::min(point_segment_distance(a, c, d), point_segment_distance(b, c, d)),
    std::min(point_segment_distance(c, a, b), point_segment_distance(d, a, b)));
}

// ---------------------------------------------------------------------------
// Polyline

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points))
{
  if (points_.size() < 2) {
    throw std::invalid_argument("polyline needs at least two points");
  }
  cum_s_.resize(points_.size(), 0.0);
  seg_heading_.resize(points_.size() - 1, 0.0);
  double last_heading = 0.0;
  bool have_heading = false;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 d = points_[i + 1] - points_[i];
    const double len = d.norm();
    if (!std::isfinite(len)) {
      throw std::invalid_argument("polyline has non-finite points");
    }
    cum_s_[i + 1] = cum_s_[i] + len;
    if (len > 0.0) {
      last_heading = std::atan2(d.y, d.x);
      if (!have_heading) {
        for (std::size_t k = 0; k < i; ++k) seg_heading_[k] = last_heading;
        have_heading = true;
      }
    }
    seg_heading_[i] = last_heading;
  }
  if (!(cum_s_.back() > 0.0)) {
    throw std::invalid_argument("degenerate polyline: zero total length");
  }
}

std::size_t Polyline::segment_index(double s) const
{
  if (s <= 0.0) return 0;
  const auto it = std::upper_bound(cum_s_.begin(), cum_s_.end(), s);
  const auto idx = static_cast<std::size_t>(std::distance(cum_s_.begin(), it));
  return std::min(idx == 0 ? 0 : idx - 1, seg_heading_.size() - 1);
}

double Polyline::vertex_tangent(std::size_t i) const
{
  if (i == 0) return seg_heading_.front();
  if (i >= seg_heading_.size()) return seg_heading_.back();
  const double prev = seg_heading_[i - 1];
  return normalize_angle(prev + 0.5 * angle_diff(seg_heading_[i], prev));
}

PolylineProjection Polyline::project(const Vec2 & p) const
{
  return project(p, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
}

PolylineProjection Polyline::project(const Vec2 & p, double s_lo, double s_hi) const
{
  if (points_.size() < 2) {
    throw std::invalid_argument("projection onto an empty polyline");
  }
  std::size_t first = 0;
  std::size_t last = seg_heading_.size() - 1;
  if (std::isfinite(s_lo)) first = segment_index(s_lo);
  if (std::isfinite(s_hi)) last = std::max(first, segment_index(s_hi));

  double best = std::numeric_limits<double>::infinity();
  PolylineProjection out;
  double best_t_raw = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const Vec2 a = points_[i];
    const Vec2 ab = points_[i + 1] - a;
    const double len2 = ab.dot(ab);
    double t_raw = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    const double t = std::clamp(t_raw, 0.0, 1.0);
    const Vec2 q = a + ab * t;
    const double dist = (p - q).norm();
    if (dist < best) {
      best = dist;
      best_t_raw = t_raw;
      out.segment = i;
      out.closest = q;
      out.s = cum_s_[i] + t * std::sqrt(len2);
      const Vec2 dir = unit_vector(seg_heading_[i]);
      const double side = dir.cross(p - q);
      out.d = side >= 0.0 ? dist : -dist;
    }
  }
  // Clamped at a polyline end: lateral offset measured along the end normal.
  const bool before_start = out.segment == 0 && best_t_raw < 0.0;
  const bool after_end = out.segment == seg_heading_.size() - 1 && best_t_raw > 1.0;
  if (before_start || after_end) {
    const double h = seg_heading_[out.segment];
    const Vec2 n{-std::sin(h), std::cos(h)};
    out.d = (p - out.closest).dot(n);
  }
  return out;
}

Vec2 Polyline::point_at(double s) const
{
  const std::size_t i = segment_index(s);
  const double h = seg_heading_[i];
  return points_[i] + unit_vector(h) * (s - cum_s_[i]);
}

double Polyline::heading_at(double s) const
{
  const std::size_t i = segment_index(s);
  const double len = cum_s_[i + 1] - cum_s_[i];
  if (len <= 0.0) return seg_heading_[i];
  const double f = std::clamp((s - cum_s_[i]) / len, 0.0, 1.0);
  const double t0 = vertex_tangent(i);
  const double t1 = vertex_tangent(i + 1);
  return normalize_angle(t0 + f * angle_diff(t1, t0));
}

double Polyline::curvature_at(double s) const
{
  const std::size_t i = segment_index(s);
  const double len = cum_s_[i + 1] - cum_s_[i];
  if (len <= 0.0 || s < 0.0 || s > length()) return 0.0;
  return angle_diff(vertex_tangent(i + 1), vertex_tangent(i)) / len;
}

Vec2 Polyline::normal_at(double s) const
{
  const double h = heading_at(s);
  return {-std::sin(h), std::cos(h)};
}

Polyline Polyline::offset(double offset) const
{
  std::vector<Vec2> out;
  out.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double h = vertex_tangent(i);
    out.push_back(points_[i] + Vec2{-std::sin(h), std::cos(h)} * offset);
  }
  return Polyline(std::move(out));
}

// ---------------------------------------------------------------------------
// Polygon

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices))
{
  if (vertices_.size() < 3) {
    throw std::invalid_argument("polygon needs at least three vertices");
  }
  build_index();
}

void Polygon::build_index()
{
  min_ = max_ = vertices_.front();
  for (const auto & v : vertices_) {
    min_.x = std::min(min_.x, v.x);
    min_.y = std::min(min_.y, v.y);
    max_.x = std::max(max_.x, v.x);
    max_.y = std::max(max_.y, v.y);
  }
  const double w = std::max(max_.x - min_.x, 1e-6);
  const double h = std::max(max_.y - min_.y, 1e-6);
  cell_size_ = std::max(2.0, std::sqrt(w * h / 40000.0));
  nx_ = static_cast<std::size_t>(std::ceil(w / cell_size_)) + 1;
  ny_ = static_cast<std::size_t>(std::ceil(h / cell_size_)) + 1;
  cells_.assign(nx_ * ny_, Cell{});

  const std::size_t n = vertices_.size();
  for (std::size_t e = 0; e < n; ++e) {
    const Vec2 a = vertices_[e];
    const Vec2 b = vertices_[(e + 1) % n];
    const auto ix0 = static_cast<std::size_t>((std::min(a.x, b.x) - min_.x) / cell_size_);
    const auto ix1 = static_cast<std::size_t>((std::max(a.x, b.x) - min_.x) / cell_size_);
    const auto iy0 = static_cast<std::size_t>((std::min(a.y, b.y) - min_.y) / cell_size_);
    const auto iy1 = static_cast<std::size_t>((std::max(a.y, b.y) - min_.y) / cell_size_);
    for (std::size_t iy = iy0; iy <= std::min(iy1, ny_ - 1); ++iy) {
      for (std::size_t ix = ix0; ix <= std::min(ix1, nx_ - 1); ++ix) {
        const Vec2 lo{min_.x + ix * cell_size_, min_.y + iy * cell_size_};
        const Vec2 hi{lo.x + cell_size_, lo.y + cell_size_};
        if (segment_touches_rect(a, b, lo, hi)) {
          cells_[iy * nx_ + ix].edges.push_back(e);
        }
      }
    }
  }
  for (std::size_t iy = 0; iy < ny_; ++iy) {
    for (std::size_t ix = 0; ix < nx_; ++ix) {
      const Vec2 c{min_.x + (ix + 0.5) * cell_size_, min_.y + (iy + 0.5) * cell_size_};
      cells_[iy * nx_ + ix].center_inside = contains_brute(c);
    }
  }
}

bool Polygon::contains_brute(const Vec2 & p) const
{
  // Crossing number with the half-open rule on edge endpoints.
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 & a = vertices_[i];
    const Vec2 & b = vertices_[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::optional<std::size_t> Polygon::cell_of(const Vec2 & p) const
{
  if (p.x < min_.x || p.y < min_.y || p.x > max_.x || p.y > max_.y) {
    return std::nullopt;
  }
  const auto ix = std::min(static_cast<std::size_t>((p.x - min_.x) / cell_size_), nx_ - 1);
  const auto iy = std::min(static_cast<std::size_t>((p.y - min_.y) / cell_size_), ny_ - 1);
  return iy * nx_ + ix;
}

bool Polygon::contains(const Vec2 & p) const
{
  if (vertices_.size() < 3) return false;
  const auto cell = cell_of(p);
  if (!cell) return false;
  const Cell & c = cells_[*cell];
  if (c.edges.empty()) {
    return c.center_inside;
  }
  return contains_brute(p);
}

double Polygon::boundary_distance(const Vec2 & p) const
{
  const std::size_t n = vertices_.size();
  if (n < 3) return std::numeric_limits<double>::infinity();
  const auto clamp_idx = [](double v, std::size_t count) {
    if (v < 0.0) return std::size_t{0};
    return std::min(static_cast<std::size_t>(v), count - 1);
  };
  const std::size_t cx = clamp_idx((p.x - min_.x) / cell_size_, nx_);
  const std::size_t cy = clamp_idx((p.y - min_.y) / cell_size_, ny_);
  // Distance from p to the clamped cell's box, a lower bound for rings.
  const double outside = std::hypot(
    std::max({min_.x - p.x, 0.0, p.x - max_.x}), std::max({min_.y - p.y, 0.0, p.y - max_.y}));

  double best = std::numeric_limits<double>::infinity();
  const std::size_t max_ring = std::max(nx_, ny_);
  for (std::size_t r = 0; r <= max_ring; ++r) {
    const double ring_lower =
      std::max(outside, r == 0 ? 0.0 : (static_cast<double>(r) - 1.0) * cell_size_);
    if (best <= ring_lower) break;
    const long x0 = static_cast<long>(cx) - static_cast<long>(r);
    const long x1 = static_cast<long>(cx) + static_cast<long>(r);
    const long y0 = static_cast<long>(cy) - static_cast<long>(r);
    const long y1 = static_cast<long>(cy) + static_cast<long>(r);
    for (long iy = y0; iy <= y1; ++iy) {
      if (iy < 0 || iy >= static_cast<long>(ny_)) continue;
      for (long ix = x0; ix <= x1; ++ix) {
        if (ix < 0 || ix >= static_cast<long>(nx_)) continue;
        if (iy != y0 && iy != y1 && ix != x0 && ix != x1) continue;
        for (const std::size_t e : cells_[static_cast<std::size_t>(iy) * nx_ + ix].edges) {
          best = std::min(best, point_segment_distance(p, vertices_[e], vertices_[(e + 1) % n]));
        }
      }
    }
  }
  return best;
}

double Polygon::boundary_distance_to_segments(
  const std::vector<std::array<Vec2, 2>> & segments) const
{
  const std::size_t n = vertices_.size();
  double best = std::numeric_limits<double>::infinity();
  for (const auto & seg : segments) {
    best = std::min({best, boundary_distance(seg[0]), boundary_distance(seg[1])});
  }
  if (best == 0.0) return 0.0;
  // Any edge closer than `best` to a segment must touch its expanded bounding box.
  for (const auto & seg : segments) {
    const Vec2 lo{std::min(seg[0].x, seg[1].x) - best, std::min(seg[0].y, seg[1].y) - best};
    const Vec2 hi{std::max(seg[0].x, seg[1].x) + best, std::max(seg[0].y, seg[1].y) + best};
    if (hi.x < min_.x || hi.y < min_.y || lo.x > max_.x || lo.y > max_.y) continue;
    const auto ix0 = static_cast<std::size_t>(std::max(0.0, (lo.x - min_.x) / cell_size_));
    const auto iy0 = static_cast<std::size_t>(std::max(0.0, (lo.y - min_.y) / cell_size_));
    const auto ix1 = std::min(static_cast<std::size_t>((hi.x - min_.x) / cell_size_), nx_ - 1);
    const auto iy1 = std::min(static_cast<std::size_t>((hi.y - min_.y) / cell_size_), ny_ - 1);
    for (std::size_t iy = iy0; iy <= iy1; ++iy) {
      for (std::size_t ix = ix0; ix <= ix1; ++ix) {
        for (const std::size_t e : cells_[iy * nx_ + ix].edges) {
          best = std::min(
            best, segment_segment_distance(seg[0], seg[1], vertices_[e], vertices_[(e + 1) % n]));
        }
      }
    }
  }
  return best;
}

}  // namespace hybridplan
