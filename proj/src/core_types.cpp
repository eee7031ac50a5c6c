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

#include "hybridplan/core_types.hpp"

#include <algorithm>
#include <limits>

namespace hybridplan
{

bool TrajState::finite() const
{
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta) && std::isfinite(v) &&
         std::isfinite(a) && std::isfinite(k) && std::isfinite(j);
}

void Trajectory::validate() const
{
  if (states.empty()) {
    throw std::invalid_argument("trajectory must contain at least one state");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("trajectory dt must be positive");
  }
}

std::array<Vec2, 4> OrientedBox::corners() const
{
  const Vec2 f = unit_vector(heading) * (0.5 * length);
  const Vec2 l = Vec2{-std::sin(heading), std::cos(heading)} * (0.5 * width);
  return {center - f - l, center + f - l, center + f + l, center - f + l};
}

std::vector<std::array<Vec2, 2>> OrientedBox::edges() const
{
  const auto c = corners();
  return {{c[0], c[1]}, {c[1], c[2]}, {c[2], c[3]}, {c[3], c[0]}};
}

bool OrientedBox::contains(const Vec2 & p) const
{
  const Vec2 d = p - center;
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  const double lon = c * d.x + s * d.y;
  const double lat = -s * d.x + c * d.y;
  return std::abs(lon) <= 0.5 * length && std::abs(lat) <= 0.5 * width;
}

OrientedBox footprint(const Pose2 & pose, const VehicleSize & size)
{
  const Vec2 c = pose.position() + unit_vector(pose.theta) * size.rear_axle_offset;
  return {c, pose.theta, size.length, size.width};
}

OrientedBox footprint(const TrajState & state, const VehicleSize & size)
{
  return footprint(state.pose(), size);
}

namespace
{
// Half-extent of a box projected onto a unit axis.
double projected_radius(const OrientedBox & b, const Vec2 & axis)
{
  const Vec2 u = unit_vector(b.heading);
  const Vec2 n{-u.y, u.x};
  return 0.5 * b.length * std::abs(u.dot(axis)) + 0.5 * b.width * std::abs(n.dot(axis));
}
}  // namespace

bool boxes_intersect(const OrientedBox & a, const OrientedBox & b)
{
  const Vec2 d = b.center - a.center;
  const Vec2 ua = unit_vector(a.heading);
  const Vec2 ub = unit_vector(b.heading);
  const std::array<Vec2, 4> axes{ua, Vec2{-ua.y, ua.x}, ub, Vec2{-ub.y, ub.x}};
  for (const auto & axis : axes) {
    if (std::abs(d.dot(axis)) > projected_radius(a, axis) + projected_radius(b, axis)) {
      return false;
    }
  }
  return true;
}

double box_distance(const OrientedBox & a, const OrientedBox & b)
{
  if (boxes_intersect(a, b)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto & ea : a.edges()) {
    for (const auto & eb : b.edges()) {
      best = std::min(best, segment_segment_distance(ea[0], ea[1], eb[0], eb[1]));
    }
  }
  return best;
}

bool box_segment_intersect(const OrientedBox & box, const Vec2 & a, const Vec2 & b)
{
  if (box.contains(a) || box.contains(b)) return true;
  for (const auto & e : box.edges()) {
    if (segments_intersect(e[0], e[1], a, b)) return true;
  }
  return false;
}

bool box_polygon_intersect(const OrientedBox & box, const Polygon & poly)
{
  if (poly.empty()) return false;
  if (poly.contains(box.center)) return true;
  const auto corners = box.corners();
  for (const auto & c : corners) {
    if (poly.contains(c)) return true;
  }
  const auto & v = poly.vertices();
  for (const auto & p : v) {
    if (box.contains(p)) return true;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 & p = v[i];
    const Vec2 & q = v[(i + 1) % v.size()];
    for (int e = 0; e < 4; ++e) {
      if (segments_intersect(corners[e], corners[(e + 1) % 4], p, q)) return true;
    }
  }
  return false;
}

const char * to_string(AgentType t)
{
  switch (t) {
    case AgentType::kVehicle:
      return "vehicle";
    case AgentType::kPedestrian:
      return "pedestrian";
    case AgentType::kCyclist:
      return "cyclist";
  }
  return "vehicle";
}

const char * to_string(LightState s)
{
  switch (s) {
    case LightState::kRed:
      return "red";
    case LightState::kYellow:
      return "yellow";
    case LightState::kGreen:
      return "green";
  }
  return "green";
}

AgentType agent_type_from_string(const std::string & s)
{
  if (s == "vehicle") return AgentType::kVehicle;
  if (s == "pedestrian") return AgentType::kPedestrian;
  if (s == "cyclist") return AgentType::kCyclist;
  throw ParseError("unknown agent type '" + s + "'");
}

LightState light_state_from_string(const std::string & s)
{
  if (s == "red") return LightState::kRed;
  if (s == "yellow") return LightState::kYellow;
  if (s == "green") return LightState::kGreen;
  throw ParseError("unknown light state '" + s + "'");
}

void AgentTrack::validate() const
{
  if (times.size() != poses.size() || times.size() != speeds.size()) {
    throw std::invalid_argument("agent track: times, poses and speeds differ in length");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::invalid_argument("agent track: timestamps must be strictly increasing");
    }
  }
}

std::optional<std::size_t> AgentTrack::index_at_or_before(double t) const
{
  const auto it = std::upper_bound(times.begin(), times.end(), t + 1e-9);
  if (it == times.begin()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
}

Polygon Lane::area() const
{
  const Polyline right = centerline.offset(-0.5 * width);
  const Polyline left = centerline.offset(0.5 * width);
  std::vector<Vec2> pts = right.points();
  const auto & lp = left.points();
  pts.insert(pts.end(), lp.rbegin(), lp.rend());
  return Polygon(std::move(pts));
}

void MapModel::finalize()
{
  lane_areas.clear();
  lane_areas.reserve(lanes.size());
  for (const auto & lane : lanes) {
    lane_areas.push_back(lane.area());
  }
  for (const int id : route) {
    if (!find_lane(id)) {
      throw std::invalid_argument("route references unknown lane " + std::to_string(id));
    }
  }
  if (!route_centerline.empty() && !drivable.empty()) {
    for (const auto & p : route_centerline.points()) {
      if (!in_drivable(p)) {
        throw std::invalid_argument("drivable area does not cover the route centerline");
      }
    }
  }
  for (const auto & l : lights) {
    if (!find_stop_line(l.stop_line_id)) {
      throw std::invalid_argument("light references unknown stop line");
    }
  }
}

const Lane * MapModel::find_lane(int id) const
{
  for (const auto & l : lanes) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

const StopLine * MapModel::find_stop_line(int id) const
{
  for (const auto & s : stop_lines) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

bool MapModel::in_drivable(const Vec2 & p) const
{
  return std::any_of(drivable.begin(), drivable.end(), [&](const Polygon & poly) {
    return poly.contains(p);
  });
}

bool MapModel::in_any_lane(const Vec2 & p) const
{
  return std::any_of(lane_areas.begin(), lane_areas.end(), [&](const Polygon & poly) {
    return poly.contains(p);
  });
}

LightStates Scene::lights_at(double t) const
{
  LightStates out;
  for (const auto & ev : light_schedule) {
    if (ev.time <= t + 1e-9) {
      out[ev.light_id] = ev.state;
    }
  }
  return out;
}

}  // namespace hybridplan
