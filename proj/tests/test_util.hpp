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


#ifndef HYBRIDPLAN__TEST_UTIL_HPP_
#define HYBRIDPLAN__TEST_UTIL_HPP_

#include "hybridplan/core_types.hpp"
#include "hybridplan/kinematics.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace hybridplan::testing
{

/// Two-lane straight road along +x: lane 1 (route) at y = 0, lane 2 westbound at y = 3.5.
inline MapModel straight_map(double x0 = -100.0, double x1 = 400.0)
{
  MapModel m;
  m.lanes.push_back({1, Polyline({{x0, 0.0}, {x1, 0.0}}), 3.5, {}});
  m.lanes.push_back({2, Polyline({{x1, 3.5}, {x0, 3.5}}), 3.5, {}});
  m.route = {1};
  m.route_centerline = Polyline({{x0, 0.0}, {x1, 0.0}});
  m.drivable.emplace_back(std::vector<Vec2>{{x0 - 1.0, -2.25}, {x1 + 1.0, -2.25}, {x1 + 1.0, 5.75}, {x0 - 1.0, 5.75}});
  m.finalize();
  return m;
}

/// Constant-speed straight ego log on the route lane.
inline std::vector<TrajState> straight_log(double x0, double v, std::size_t ticks, double dt = 0.1)
{
  std::vector<TrajState> s;
  for (std::size_t i = 0; i <= ticks; ++i) {
    TrajState st;
    st.x = x0 + v * dt * static_cast<double>(i);
    st.v = v;
    s.push_back(st);
  }
  return s;
}

/// Constant-velocity agent track sampled at the ego timestamps.
inline AgentTrack constant_track(
  int id, Pose2 start, double v, std::size_t ticks, double dt = 0.1, AgentType type = AgentType::kVehicle)
{
  AgentTrack a;
  a.id = id;
  a.type = type;
  if (type == AgentType::kPedestrian) {
    a.length = 0.6;
    a.width = 0.6;
  }
  for (std::size_t i = 0; i <= ticks; ++i) {
    const double t = dt * static_cast<double>(i);
    a.times.push_back(t);
    a.poses.push_back({start.x + v * t * std::cos(start.theta), start.y + v * t * std::sin(start.theta), start.theta});
    a.speeds.push_back(v);
  }
  return a;
}

inline Scene straight_scene(const std::string & id, double v, std::size_t ticks)
{
  Scene s;
  s.id = id;
  s.map = straight_map();
  s.ego_states = straight_log(0.0, v, ticks);
  return s;
}

/// Constant-speed straight trajectory from `x0`.
inline Trajectory straight_traj(double x0, double v, std::size_t steps, double dt = 0.1)
{
  Trajectory t;
  t.dt = dt;
  t.states = straight_log(x0, v, steps, dt);
  return t;
}

}  // namespace hybridplan::testing

#endif  // HYBRIDPLAN__TEST_UTIL_HPP_
