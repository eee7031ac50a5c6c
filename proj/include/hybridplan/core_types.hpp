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

#ifndef HYBRIDPLAN__CORE_TYPES_HPP_
#define HYBRIDPLAN__CORE_TYPES_HPP_

#include "hybridplan/geometry.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hybridplan
{

/// Malformed input data (scene files, weights, configs).
class ParseError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A file written by an incompatible schema version.
class VersionError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// File system failure (missing file, unwritable directory).
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Planner state at one instant, anchored at the rear axle.
struct TrajState
{
  double x{0.0};      // m
  double y{0.0};      // m
  double theta{0.0};  // rad, (-pi, pi]
  double v{0.0};      // m/s, >= 0
  double a{0.0};      // m/s^2
  double k{0.0};      // 1/m, curvature control applied to reach this state
  double j{0.0};      // m/s^3, jerk control applied to reach this state

  Pose2 pose() const { return {x, y, theta}; }
  Vec2 position() const { return {x, y}; }
  bool finite() const;
  bool operator==(const TrajState &) const = default;
};

/// Uniformly sampled sequence of states; timestamps are index * dt.
struct Trajectory
{
  std::vector<TrajState> states;
  double dt{0.1};

  std::size_t size() const { return states.size(); }
  const TrajState & operator[](std::size_t i) const { return states[i]; }
  TrajState & operator[](std::size_t i) { return states[i]; }
  /// Throws std::invalid_argument when empty or dt <= 0.
  void validate() const;
  bool operator==(const Trajectory &) const = default;
};

struct OrientedBox
{
  Vec2 center;
  double heading{0.0};
  double length{0.0};
  double width{0.0};

  /// Corners counter-clockwise starting at rear-right.
  std::array<Vec2, 4> corners() const;
  std::vector<std::array<Vec2, 2>> edges() const;
  bool contains(const Vec2 & p) const;
  double circumradius() const { return 0.5 * std::hypot(length, width); }
  bool operator==(const OrientedBox &) const = default;
};

/// Body dimensions. `rear_axle_offset` is the distance from the rear axle forward to the box center.
struct VehicleSize
{
  static constexpr double kDefaultRearOverhang = 0.9;

  double length{4.5};
  double width{1.9};
  double rear_axle_offset{4.5 / 2.0 - kDefaultRearOverhang};

  static VehicleSize with_overhang(double length, double width, double rear_overhang)
  {
    return {length, width, length / 2.0 - rear_overhang};
  }
  bool operator==(const VehicleSize &) const = default;
};

/// Body box for a rear-axle state.
OrientedBox footprint(const TrajState & state, const VehicleSize & size);
OrientedBox footprint(const Pose2 & rear_axle_pose, const VehicleSize & size);

/// Exact separating-axis overlap test. Touching boxes count as intersecting.
bool boxes_intersect(const OrientedBox & a, const OrientedBox & b);
/// Minimum distance between box boundaries; 0 when they overlap.
double box_distance(const OrientedBox & a, const OrientedBox & b);
/// Box vs closed segment overlap.
bool box_segment_intersect(const OrientedBox & box, const Vec2 & a, const Vec2 & b);
/// Box vs polygon overlap (area intersection).
bool box_polygon_intersect(const OrientedBox & box, const Polygon & poly);

enum class AgentType { kVehicle, kPedestrian, kCyclist };
enum class LightState { kRed, kYellow, kGreen };

const char * to_string(AgentType t);
const char * to_string(LightState s);
AgentType agent_type_from_string(const std::string & s);
LightState light_state_from_string(const std::string & s);

/// Logged track of a non-ego agent. Poses are anchored at the box center.
struct AgentTrack
{
  int id{0};
  AgentType type{AgentType::kVehicle};
  double length{4.5};
  double width{1.9};
  int lane_id{-1};  // lane the agent travels, -1 if none
  std::vector<double> times;
  std::vector<Pose2> poses;
  std::vector<double> speeds;

  /// Throws std::invalid_argument on length mismatch or non-increasing timestamps.
  void validate() const;
  /// Index of the latest sample at or before t, if any.
  std::optional<std::size_t> index_at_or_before(double t) const;
  OrientedBox box_at(std::size_t i) const { return {poses[i].position(), poses[i].theta, length, width}; }
  bool operator==(const AgentTrack &) const = default;
};

struct Lane
{
  int id{0};
  Polyline centerline;
  double width{3.5};
  std::vector<int> successors;

  /// Lane area between the two centerline offsets.
  Polygon area() const;
  bool operator==(const Lane &) const = default;
};

enum class StopControl { kLight, kStopSign };

/// Stop line segment; `heading` is the travel direction it controls.
struct StopLine
{
  int id{0};
  Vec2 a;
  Vec2 b;
  double heading{0.0};
  StopControl control{StopControl::kLight};
  int light_id{-1};
  bool operator==(const StopLine &) const = default;
};

struct TrafficLight
{
  int id{0};
  int stop_line_id{0};
  bool operator==(const TrafficLight &) const = default;
};

/// Region where the route must yield: agents on `priority_lanes` (or pedestrians,
/// when `pedestrian_priority` is set) have the right of way.
struct ConflictZone
{
  int id{0};
  Polygon area;
  std::vector<int> priority_lanes;
  bool pedestrian_priority{false};
  bool operator==(const ConflictZone &) const = default;
};

struct Crosswalk
{
  int id{0};
  Polygon area;
  bool operator==(const Crosswalk &) const = default;
};

/// HD-map stand-in. Build with the fields, then call `finalize()` once to derive lane areas and
/// validate invariants.
struct MapModel
{
  std::vector<Lane> lanes;
  std::vector<Crosswalk> crosswalks;
  std::vector<StopLine> stop_lines;
  std::vector<TrafficLight> lights;
  std::vector<Polygon> drivable;
  std::vector<ConflictZone> conflict_zones;
  std::vector<int> route;
  Polyline route_centerline;

  /// Derived: one area polygon per lane, same order as `lanes`.
  std::vector<Polygon> lane_areas;

  /// Throws std::invalid_argument when a route lane is missing or the drivable area does not
  /// cover the route centerline.
  void finalize();
  const Lane * find_lane(int id) const;
  const StopLine * find_stop_line(int id) const;
  bool in_drivable(const Vec2 & p) const;
  bool in_any_lane(const Vec2 & p) const;

  bool operator==(const MapModel & o) const
  {
    return lanes == o.lanes && crosswalks == o.crosswalks && stop_lines == o.stop_lines &&
           lights == o.lights && drivable == o.drivable && conflict_zones == o.conflict_zones &&
           route == o.route && route_centerline == o.route_centerline;
  }
};

using LightStates = std::map<int, LightState>;

struct LightEvent
{
  double time{0.0};
  int light_id{0};
  LightState state{LightState::kGreen};
  bool operator==(const LightEvent &) const = default;
};

/// A logged scene: map, ego log, agent logs, static obstacles and light schedule.
struct Scene
{
  std::string id;
  double dt{0.1};
  MapModel map;
  VehicleSize ego_size;
  std::vector<TrajState> ego_states;
  std::vector<AgentTrack> agents;
  std::vector<OrientedBox> static_obstacles;
  std::vector<LightEvent> light_schedule;

  double duration() const { return ego_states.empty() ? 0.0 : dt * (ego_states.size() - 1); }
  std::size_t ticks() const { return ego_states.empty() ? 0 : ego_states.size() - 1; }
  /// Light states in effect at time t (latest schedule event at or before t per light).
  LightStates lights_at(double t) const;
  bool operator==(const Scene &) const = default;
};

/// Planner input at one instant.
struct SceneFrame
{
  double timestamp{0.0};
  double dt{0.1};  // spacing of ego_history
  TrajState ego;
  VehicleSize ego_size;
  /// Ego states oldest to newest; the last entry equals `ego`.
  std::vector<TrajState> ego_history;
  /// Tracks with samples up to `timestamp` as history; later samples are the logged future.
  std::vector<AgentTrack> agents;
  std::vector<OrientedBox> static_obstacles;
  LightStates lights;
  const MapModel * map{nullptr};
};

}  // namespace hybridplan

#endif  // HYBRIDPLAN__CORE_TYPES_HPP_
