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


#include "hybridplan/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hybridplan::policy
{

namespace
{

enum OneHot { kOhEgo = 8, kOhVehicle, kOhPedestrian, kOhCyclist, kOhLane, kOhRoute, kOhCrosswalk, kOhStopLine };
constexpr int kRed = 16;
constexpr int kYellow = 17;
constexpr int kStopSign = 18;

using Row = Eigen::Matrix<double, 1, kFeatureWidth>;

Row pose_row(const Pose2 & local, double v, double t, double length, double width, int onehot)
{
  Row r = Row::Zero();
  r[0] = local.x / 20.0;
  r[1] = local.y / 20.0;
  r[2] = std::cos(local.theta);
  r[3] = std::sin(local.theta);
  r[4] = v / 10.0;
  r[5] = t;
  r[6] = length / 5.0;
  r[7] = width / 5.0;
  r[onehot] = 1.0;
  return r;
}

FeatureRows stack(const std::vector<Row> & rows)
{
  FeatureRows m(static_cast<Eigen::Index>(rows.size()), kFeatureWidth);
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i];
  return m;
}

int agent_onehot(AgentType t)
{
  switch (t) {
    case AgentType::kVehicle:
      return kOhVehicle;
    case AgentType::kPedestrian:
      return kOhPedestrian;
    case AgentType::kCyclist:
      return kOhCyclist;
  }
  return kOhVehicle;
}

struct Ranked
{
  double dist;
  int id;
  FeatureElement element;
};

void append_nearest(std::vector<FeatureElement> & out, std::vector<Ranked> & items, int cap)
{
  std::stable_sort(items.begin(), items.end(), [](const Ranked & a, const Ranked & b) {
    return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
  });
  const std::size_t n = std::min(items.size(), static_cast<std::size_t>(std::max(0, cap)));
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::move(items[i].element));
}

// Polyline points expressed in the ego frame, cropped to the contiguous run of points near the
// ego. Returns fewer than two points when nothing is in range.
std::vector<Vec2> local_polyline(const Polyline & line, const Pose2 & ref, double range)
{
  std::vector<Vec2> local;
  local.reserve(line.points().size());
  for (const auto & p : line.points()) {
    const Pose2 q = to_ego_frame({p.x, p.y, 0.0}, ref);
    local.push_back({q.x, q.y});
  }
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < local.size(); ++i) {
    const double d = local[i].norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  std::size_t lo = best;
  std::size_t hi = best;
  while (lo > 0 && local[lo - 1].norm() <= range) --lo;
  while (hi + 1 < local.size() && local[hi + 1].norm() <= range) ++hi;
  if (lo > 0) --lo;
  if (hi + 1 < local.size()) ++hi;
  return {local.begin() + static_cast<std::ptrdiff_t>(lo), local.begin() + static_cast<std::ptrdiff_t>(hi) + 1};
}

// Samples `count` points every `step` m starting `back` m behind the closest point to the ego.
std::vector<Row> sample_polyline(
  const std::vector<Vec2> & pts, double back, double step, int count, double width, int onehot,
  double & dist)
{
  std::vector<Row> rows;
  Polyline line;
  try {
    line = Polyline(pts);
  } catch (const std::invalid_argument &) {
    return rows;
  }
  const auto p = line.project({0.0, 0.0});
  dist = std::abs(p.d);
  double s = std::max(0.0, p.s - back);
  for (int k = 0; k < count && s <= line.length(); ++k, s += step) {
    const Vec2 q = line.point_at(s);
    rows.push_back(pose_row({q.x, q.y, line.heading_at(s)}, 0.0, 0.0, step, width, onehot));
  }
  return rows;
}

}  // namespace

std::vector<FeatureElement> encode_scene(const SceneFrame & frame, const EncoderConfig & cfg)
{
  std::vector<FeatureElement> out;
  const Pose2 ref = frame.ego.pose();
  const double now = frame.timestamp;

  // Ego history, sampled backwards from the current state.
  {
    std::vector<Row> rows;
    const auto & hist = frame.ego_history;
    const auto stride = static_cast<std::size_t>(std::max(1L, std::lround(cfg.history_step / frame.dt)));
    for (int k = cfg.history_depth - 1; k >= 0; --k) {
      TrajState s = frame.ego;
      if (!hist.empty()) {
        const std::size_t back = static_cast<std::size_t>(k) * stride;
        const std::size_t idx = hist.size() - 1 >= back ? hist.size() - 1 - back : 0;
        s = hist[idx];
      }
      if (k == 0) s = frame.ego;
      rows.push_back(pose_row(
        to_ego_frame(s.pose(), ref), s.v, -static_cast<double>(k) * cfg.history_step,
        frame.ego_size.length, frame.ego_size.width, kOhEgo));
    }
    out.push_back({ElementKind::kEgo, 0, stack(rows)});
  }

  std::vector<Ranked> agents;
  for (const auto & a : frame.agents) {
    const auto idx = a.index_at_or_before(now);
    if (!idx) continue;
    const Pose2 cur = to_ego_frame(a.poses[*idx], ref);
    const double dist = std::hypot(cur.x, cur.y);
    if (dist > cfg.range) continue;
    std::vector<Row> rows;
    for (int k = cfg.history_depth - 1; k >= 0; --k) {
      const double t = now - static_cast<double>(k) * cfg.history_step;
      const std::size_t i = a.index_at_or_before(t).value_or(0);
      rows.push_back(pose_row(
        to_ego_frame(a.poses[i], ref), a.speeds[i], -static_cast<double>(k) * cfg.history_step,
        a.length, a.width, agent_onehot(a.type)));
    }
    agents.push_back({dist, a.id, {ElementKind::kAgent, a.id, stack(rows)}});
  }
  int obstacle_id = -1;
  for (const auto & o : frame.static_obstacles) {
    const Pose2 cur = to_ego_frame({o.center.x, o.center.y, o.heading}, ref);
    const double dist = std::hypot(cur.x, cur.y);
    if (dist > cfg.range) {
      --obstacle_id;
      continue;
    }
    std::vector<Row> rows{pose_row(cur, 0.0, 0.0, o.length, o.width, kOhVehicle)};
    agents.push_back({dist, obstacle_id, {ElementKind::kAgent, obstacle_id, stack(rows)}});
    --obstacle_id;
  }
  append_nearest(out, agents, cfg.max_agents);

  if (frame.map == nullptr) return out;
  const MapModel & map = *frame.map;

  if (!map.route_centerline.empty()) {
    const auto pts = local_polyline(map.route_centerline, ref, cfg.range + 20.0);
    double dist = 0.0;
    auto rows = sample_polyline(pts, 10.0, 4.0, 18, 0.0, kOhRoute, dist);
    if (rows.size() >= 2 && dist <= cfg.range) out.push_back({ElementKind::kRoute, 0, stack(rows)});
  }

  std::vector<Ranked> lanes;
  for (const auto & lane : map.lanes) {
    const auto pts = local_polyline(lane.centerline, ref, cfg.range + 20.0);
    double dist = 0.0;
    auto rows = sample_polyline(pts, 10.0, 5.0, 12, lane.width, kOhLane, dist);
    if (rows.size() < 2 || dist > cfg.range) continue;
    lanes.push_back({dist, lane.id, {ElementKind::kLane, lane.id, stack(rows)}});
  }
  append_nearest(out, lanes, cfg.max_lanes);

  std::vector<Ranked> crosswalks;
  for (const auto & cw : map.crosswalks) {
    const auto & v = cw.area.vertices();
    if (v.empty()) continue;
    std::vector<Row> rows;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2 & a = v[i];
      const Vec2 & b = v[(i + 1) % v.size()];
      const Pose2 q = to_ego_frame({a.x, a.y, std::atan2(b.y - a.y, b.x - a.x)}, ref);
      dist = std::min(dist, std::hypot(q.x, q.y));
      rows.push_back(pose_row(q, 0.0, 0.0, 0.0, 0.0, kOhCrosswalk));
    }
    if (dist > cfg.range) continue;
    crosswalks.push_back({dist, cw.id, {ElementKind::kCrosswalk, cw.id, stack(rows)}});
  }
  append_nearest(out, crosswalks, cfg.max_crosswalks);

  std::vector<Ranked> lines;
  for (const auto & line : map.stop_lines) {
    std::vector<Row> rows;
    double red = 0.0;
    double yellow = 0.0;
    if (line.control == StopControl::kLight) {
      const auto it = frame.lights.find(line.light_id);
      if (it != frame.lights.end()) {
        red = it->second == LightState::kRed ? 1.0 : 0.0;
        yellow = it->second == LightState::kYellow ? 1.0 : 0.0;
      }
    }
    const double sign = line.control == StopControl::kStopSign ? 1.0 : 0.0;
    double dist = std::numeric_limits<double>::infinity();
    const Vec2 mid = (line.a + line.b) * 0.5;
    for (const Vec2 & p : {line.a, mid, line.b}) {
      const Pose2 q = to_ego_frame({p.x, p.y, line.heading}, ref);
      dist = std::min(dist, std::hypot(q.x, q.y));
      Row r = pose_row(q, 0.0, 0.0, 0.0, 0.0, kOhStopLine);
      r[kRed] = red;
      r[kYellow] = yellow;
      r[kStopSign] = sign;
      rows.push_back(r);
    }
    if (dist > cfg.range) continue;
    lines.push_back({dist, line.id, {ElementKind::kStopLine, line.id, stack(rows)}});
  }
  append_nearest(out, lines, cfg.max_stop_lines);
  return out;
}

SceneFrame frame_at(const Scene & scene, std::size_t tick, std::size_t history_ticks, bool include_future)
{
  SceneFrame f;
  f.timestamp = static_cast<double>(tick) * scene.dt;
  f.dt = scene.dt;
  f.ego = scene.ego_states.at(tick);
  f.ego_size = scene.ego_size;
  for (std::size_t k = history_ticks + 1; k-- > 0;) {
    f.ego_history.push_back(scene.ego_states[tick >= k ? tick - k : 0]);
  }
  f.static_obstacles = scene.static_obstacles;
  f.lights = scene.lights_at(f.timestamp);
  f.map = &scene.map;
  const double t_lo = f.timestamp - static_cast<double>(history_ticks) * scene.dt - 1e-9;
  for (const auto & a : scene.agents) {
    if (include_future) {
      f.agents.push_back(a);
      continue;
    }
    AgentTrack cut = a;
    cut.times.clear();
    cut.poses.clear();
    cut.speeds.clear();
    for (std::size_t i = 0; i < a.times.size(); ++i) {
      if (a.times[i] > f.timestamp + 1e-9) break;
      if (a.times[i] < t_lo) continue;
      cut.times.push_back(a.times[i]);
      cut.poses.push_back(a.poses[i]);
      cut.speeds.push_back(a.speeds[i]);
    }
    f.agents.push_back(std::move(cut));
  }
  return f;
}

}  // namespace hybridplan::policy
