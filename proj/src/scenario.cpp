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


#include "hybridplan/scenario.hpp"

#include "hybridplan/fallback.hpp"
#include "hybridplan/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>

namespace hybridplan::scenario
{

namespace
{

constexpr std::array<const char *, kNumTemplates> kTemplateNames{
  "straight-follow",  "lead-braking",     "signalized-intersection", "stop-sign",
  "pedestrian-crossing", "parked-car-nudge", "oncoming-traffic"};

constexpr double kRoadStart = -30.0;
constexpr double kRoadLength = 480.0;
constexpr double kEgoStartS = 30.0;
constexpr double kShoulder = 0.5;

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng
{
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi)
  {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(gen_);
  }
  double uniform(const Range & r) { return uniform(r.lo, r.hi); }
  int integer(int lo, int hi) { return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
  std::mt19937_64 gen_;
};

struct Road
{
  Polyline center;
  double lane_width{3.5};

  Pose2 pose(double s, double d, bool reverse = false) const
  {
    const Vec2 p = center.point_at(s) + center.normal_at(s) * d;
    const double h = center.heading_at(s);
    return {p.x, p.y, normalize_angle(reverse ? h + kPi : h)};
  }
};

Road make_road(double curvature, double lane_width)
{
  std::vector<Vec2> pts;
  const double step = 2.0;
  const int n = static_cast<int>(kRoadLength / step);
  Vec2 p{kRoadStart, 0.0};
  pts.push_back(p);
  for (int i = 0; i < n; ++i) {
    const double h = curvature * (static_cast<double>(i) + 0.5) * step;
    p = p + unit_vector(h) * step;
    pts.push_back(p);
  }
  return {Polyline(std::move(pts)), lane_width};
}

void add_two_lane_road(MapModel & map, const Road & road)
{
  const double w = road.lane_width;
  Lane ego_lane{1, road.center, w, {}};
  const Polyline other = road.center.offset(w);
  std::vector<Vec2> rev(other.points().rbegin(), other.points().rend());
  Lane oncoming{2, Polyline(std::move(rev)), w, {}};
  map.lanes.push_back(std::move(ego_lane));
  map.lanes.push_back(std::move(oncoming));
  map.route = {1};
  map.route_centerline = road.center;
}

// Polyline points with both ends pushed outward by `ext` along the end tangents.
std::vector<Vec2> extended(const Polyline & line, double ext)
{
  std::vector<Vec2> pts = line.points();
  pts.front() = pts.front() - unit_vector(line.heading_at(0.0)) * ext;
  pts.back() = pts.back() + unit_vector(line.heading_at(line.length())) * ext;
  return pts;
}

void add_straight_drivable(MapModel & map, const Road & road)
{
  const double w = road.lane_width;
  std::vector<Vec2> pts = extended(road.center.offset(-(0.5 * w + kShoulder)), 1.0);
  const auto left = extended(road.center.offset(1.5 * w + kShoulder), 1.0);
  pts.insert(pts.end(), left.rbegin(), left.rend());
  map.drivable.emplace_back(std::move(pts));
}

Polygon rect(double x0, double y0, double x1, double y1)
{
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

// Straight east-west road crossed by a north-south road at x = cx.
void add_intersection(MapModel & map, const Road & road, double cx)
{
  const double w = road.lane_width;
  map.lanes.push_back({5, Polyline({{cx + 0.5 * w, -80.0}, {cx + 0.5 * w, 80.0}}), w, {}});
  map.lanes.push_back({6, Polyline({{cx - 0.5 * w, 80.0}, {cx - 0.5 * w, -80.0}}), w, {}});
  const double lo = -(0.5 * w + kShoulder);
  const double hi = 1.5 * w + kShoulder;
  const double hx = w + kShoulder;
  const double x_start = kRoadStart - 1.0;
  const double x_end = kRoadStart + kRoadLength + 1.0;
  map.drivable.emplace_back(std::vector<Vec2>{
    {x_start, lo}, {cx - hx, lo}, {cx - hx, -80.0}, {cx + hx, -80.0}, {cx + hx, lo},
    {x_end, lo}, {x_end, hi}, {cx + hx, hi}, {cx + hx, 80.0}, {cx - hx, 80.0}, {cx - hx, hi},
    {x_start, hi}});
}

AgentTrack make_track(
  int id, AgentType type, double length, double width, int lane_id, std::size_t samples, double dt,
  const std::function<Pose2(double)> & pose_of_s, double s0, const std::function<double(double)> & speed)
{
  AgentTrack a;
  a.id = id;
  a.type = type;
  a.length = length;
  a.width = width;
  a.lane_id = lane_id;
  double s = s0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double v = std::max(0.0, speed(t));
    a.times.push_back(t);
    a.poses.push_back(pose_of_s(s));
    a.speeds.push_back(v);
    s += v * dt;
  }
  return a;
}

double idm_accel(double v, double v_des, double gap, double dv, double s0, double T)
{
  constexpr double a_max = 1.5;
  constexpr double b = 2.0;
  const double free = v_des > 0.1 ? 1.0 - std::pow(v / v_des, 4.0) : -1.0;
  if (!std::isfinite(gap)) return a_max * free;
  const double s_star = s0 + std::max(0.0, v * T + v * dv / (2.0 * std::sqrt(a_max * b)));
  const double g = std::max(gap, 0.1);
  return a_max * (free - (s_star / g) * (s_star / g));
}

double smoothstep5(double x)
{
  x = std::clamp(x, 0.0, 1.0);
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

// Scripted driver for the logged ego: IDM longitudinal control with optional virtual stop
// lines, pure pursuit toward the route shifted by `offset(s)`.
struct Expert
{
  double v_des{10.0};
  bool ignore_statics{true};
  std::function<double(double)> offset = [](double) { return 0.0; };
  // Route arclength where the front bumper has to stop at time t, if any.
  std::function<std::optional<double>(double, const TrajState &, double)> stop_at =
    [](double, const TrajState &, double) { return std::nullopt; };
};

std::vector<TrajState> drive_expert(const Scene & scene, const Expert & ex, const TrajState & start)
{
  const Polyline & route = scene.map.route_centerline;
  const auto limits = kinematics::KinematicLimits{}.comfort();
  const double dt = scene.dt;
  const std::size_t n = static_cast<std::size_t>(std::lround(25.0 / dt));
  std::vector<TrajState> states{start};
  kinematics::ControlSequence one;
  one.dt = dt;
  one.controls.resize(1);
  double s_hint = route.project(start.position()).s;
  std::vector<fallback::PathObject> objects;
  for (std::size_t i = 0; i < n; ++i) {
    const TrajState & s = states.back();
    const double t = static_cast<double>(i) * dt;
    const OrientedBox box = footprint(s, scene.ego_size);
    objects.clear();
    for (const auto & a : scene.agents) {
      objects.push_back({a.box_at(i), a.speeds[i]});
    }
    if (!ex.ignore_statics) {
      for (const auto & o : scene.static_obstacles) objects.push_back({o, 0.0});
    }
    const auto m = fallback::lead_metrics(route, box, s.v, objects, {0.3, 0.5});
    double acc = idm_accel(s.v, ex.v_des, std::numeric_limits<double>::infinity(), 0.0, 4.0, 1.6);
    if (m.has_lead) {
      acc = std::min(acc, idm_accel(s.v, ex.v_des, m.gap, s.v - m.lead_v, 4.0, 1.6));
    }
    const double s_front = m.ego_s + 0.5 * scene.ego_size.length;
    if (const auto stop = ex.stop_at(t, s, s_front)) {
      acc = std::min(acc, idm_accel(s.v, ex.v_des, *stop - s_front, s.v, 0.5, 1.0));
    }

    const auto p = route.project(s.position(), s_hint - 5.0, s_hint + 10.0);
    s_hint = p.s;
    const double look = std::max(6.0, s.v);
    const double st = p.s + look;
    const Vec2 target = route.point_at(st) + route.normal_at(st) * ex.offset(st);
    const Pose2 local = to_ego_frame({target.x, target.y, 0.0}, s.pose());
    one.controls[0].j = (acc - s.a) / dt;
    one.controls[0].k = 2.0 * local.y / (local.x * local.x + local.y * local.y);
    const auto c = kinematics::clip_controls(one, s, limits).controls[0];
    states.push_back(kinematics::step(s, c.j, c.k, dt));
  }
  return states;
}

Scene base_scene(Template t, const ScenarioConfig & cfg, std::size_t index)
{
  Scene scene;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s-%04zu", to_string(t), index);
  scene.id = buf;
  scene.dt = cfg.dt;
  return scene;
}

TrajState start_state(const Road & road, double v0)
{
  const Pose2 p = road.pose(kEgoStartS, 0.0);
  TrajState s;
  s.x = p.x;
  s.y = p.y;
  s.theta = p.theta;
  s.v = v0;
  s.k = road.center.curvature_at(kEgoStartS);
  return s;
}

double ego_center_s(const Scene & scene) { return kEgoStartS + scene.ego_size.rear_axle_offset; }

AgentTrack lane_follower(
  int id, const Road & road, double s0, bool oncoming, std::size_t samples, double dt,
  const std::function<double(double)> & speed)
{
  const double d = oncoming ? road.lane_width : 0.0;
  const double sign = oncoming ? -1.0 : 1.0;
  return make_track(
    id, AgentType::kVehicle, 4.5, 1.9, oncoming ? 2 : 1, samples, dt,
    [&road, d, sign, oncoming, s0](double s) { return road.pose(s0 + sign * (s - s0), d, oncoming); },
    s0, speed);
}

}  // namespace

const char * to_string(Template t)
{
  return kTemplateNames[static_cast<std::size_t>(t)];
}

Template template_from_string(const std::string & s)
{
  for (std::size_t i = 0; i < kTemplateNames.size(); ++i) {
    if (s == kTemplateNames[i]) return static_cast<Template>(i);
  }
  throw ParseError("unknown scenario template '" + s + "'");
}

int ScenarioConfig::total() const
{
  int n = 0;
  for (const int c : counts) n += c;
  return n;
}

void ScenarioConfig::validate() const
{
  for (const int c : counts) {
    if (c < 0) throw std::invalid_argument("scenario counts must be non-negative");
  }
  if (!(dt > 0.0) || !(duration > dt)) {
    throw std::invalid_argument("scenario duration and dt must be positive");
  }
  if (std::abs(duration / dt - std::round(duration / dt)) > 1e-6) {
    throw std::invalid_argument("scenario duration must be a multiple of dt");
  }
  if (!(lane_width > 2.5)) throw std::invalid_argument("lane_width must exceed 2.5 m");
  const std::pair<const char *, Range> ranges[] = {
    {"ego_speed", ego_speed},
    {"lead_gap", lead_gap},
    {"brake_time", brake_time},
    {"brake_decel", brake_decel},
    {"road_curvature", road_curvature},
    {"intersection_distance", intersection_distance},
    {"red_duration", red_duration},
    {"pedestrian_speed", pedestrian_speed},
    {"parked_distance", parked_distance}};
  for (const auto & [name, r] : ranges) {
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
      throw std::invalid_argument(std::string("scenario range ") + name + " is inverted");
    }
  }
  if (ego_speed.lo <= 0.0 || lead_gap.lo <= 0.0 || brake_decel.lo <= 0.0 ||
      pedestrian_speed.lo <= 0.0 || red_duration.lo < 8.0) {
    throw std::invalid_argument("scenario ranges out of bounds");
  }
  if (std::abs(road_curvature.lo) > 0.01 || std::abs(road_curvature.hi) > 0.01) {
    throw std::invalid_argument("road_curvature must stay within +-0.01 1/m");
  }
  if (intersection_distance.lo < 40.0 || parked_distance.lo < 60.0) {
    throw std::invalid_argument("intersection_distance >= 40 m and parked_distance >= 60 m required");
  }
}

std::uint64_t scene_seed(std::uint64_t seed, std::uint64_t index)
{
  return splitmix64(splitmix64(seed) ^ (index + 1) * 0x9e3779b97f4a7c15ULL);
}

Scene generate_scene(Template tmpl, const ScenarioConfig & cfg, std::size_t index)
{
  Rng rng(scene_seed(cfg.seed, index));
  Scene scene = base_scene(tmpl, cfg, index);
  const std::size_t samples = static_cast<std::size_t>(std::lround(cfg.duration / cfg.dt)) + 1;
  const double dt = cfg.dt;
  const double w = cfg.lane_width;
  Expert ex;

  const bool curved = tmpl == Template::kStraightFollow || tmpl == Template::kLeadBraking ||
                      tmpl == Template::kParkedCarNudge || tmpl == Template::kOncomingTraffic;
  const double kappa = curved ? rng.uniform(cfg.road_curvature) : 0.0;
  const Road road = make_road(kappa, w);
  add_two_lane_road(scene.map, road);
  double v0 = rng.uniform(cfg.ego_speed);
  const double ego_cs = ego_center_s(scene);
  int next_id = 1;

  switch (tmpl) {
    case Template::kStraightFollow: {
      add_straight_drivable(scene.map, road);
      const double gap = rng.uniform(cfg.lead_gap);
      const double amp = rng.uniform(0.5, 1.5);
      const double period = rng.uniform(8.0, 15.0);
      const double phase = rng.uniform(0.0, 2.0 * kPi);
      const double vl = v0 + rng.uniform(-1.0, 1.0);
      scene.agents.push_back(lane_follower(
        next_id++, road, ego_cs + gap + 4.5, false, samples, dt,
        [=](double t) { return vl + amp * std::sin(2.0 * kPi * t / period + phase); }));
      break;
    }
    case Template::kLeadBraking: {
      add_straight_drivable(scene.map, road);
      const double gap = rng.uniform(cfg.lead_gap);
      const double tb = rng.uniform(cfg.brake_time);
      const double decel = rng.uniform(cfg.brake_decel);
      const double v_low = rng.uniform(0.0, 0.4 * v0);
      const double hold = rng.uniform(2.0, 5.0);
      const double vl = v0;
      scene.agents.push_back(lane_follower(
        next_id++, road, ego_cs + gap + 4.5, false, samples, dt, [=](double t) {
          if (t < tb) return vl;
          const double t_low = tb + (vl - v_low) / decel;
          if (t < t_low) return vl - decel * (t - tb);
          if (t < t_low + hold) return v_low;
          return std::min(vl, v_low + 1.5 * (t - t_low - hold));
        }));
      break;
    }
    case Template::kSignalizedIntersection:
    case Template::kStopSign: {
      const double cx = kRoadStart + kEgoStartS + rng.uniform(cfg.intersection_distance);
      add_intersection(scene.map, road, cx);
      const double line_x = cx - w - 1.0;
      const double line_s = line_x - kRoadStart;
      const bool signal = tmpl == Template::kSignalizedIntersection;
      scene.map.stop_lines.push_back(
        {1, {line_x, -0.5 * w}, {line_x, 0.5 * w}, 0.0,
         signal ? StopControl::kLight : StopControl::kStopSign, signal ? 1 : -1});
      ConflictZone zone;
      zone.id = 1;
      zone.area = rect(cx - w, -0.5 * w, cx + w, 0.5 * w);
      if (!signal) zone.priority_lanes = {5, 6};
      scene.map.conflict_zones.push_back(zone);
      const double front0 = ego_cs + 0.5 * scene.ego_size.length;
      const double t_arrive = (line_s - front0) / v0;
      if (signal) {
        scene.map.lights.push_back({1, 1});
        const double t_yellow = std::max(1.0, t_arrive + rng.uniform(-4.0, 1.0));
        const double t_red = t_yellow + 3.0;
        const double red = rng.uniform(cfg.red_duration);
        scene.light_schedule = {
          {0.0, 1, LightState::kGreen},
          {t_yellow, 1, LightState::kYellow},
          {t_red, 1, LightState::kRed},
          {t_red + red, 1, LightState::kGreen}};
        // Cross traffic passes while the ego approach is red.
        const double vc = rng.uniform(8.0, 11.0);
        const double t_enter = t_red + 4.0 + rng.uniform(0.0, red - 6.0);
        const double y0 = 0.5 * w + 2.25 + vc * t_enter;
        scene.agents.push_back(make_track(
          next_id++, AgentType::kVehicle, 4.5, 1.9, 6, samples, dt,
          [cx, w](double s) { return Pose2{cx - 0.5 * w, -s, -0.5 * kPi}; }, -y0,
          [vc](double) { return vc; }));
        auto decided = std::make_shared<int>(0);  // 0 undecided, 1 stop, 2 go
        Scene * sp = &scene;
        ex.stop_at = [sp, line_s, decided](double t, const TrajState & s, double s_front)
          -> std::optional<double> {
          if (s_front > line_s) return std::nullopt;
          const LightState st = sp->lights_at(t).at(1);
          if (st == LightState::kGreen) {
            *decided = 0;
            return std::nullopt;
          }
          if (st == LightState::kYellow && *decided == 0) {
            *decided = (line_s - s_front) >= s.v * s.v / (2.0 * 3.0) ? 1 : 2;
          }
          if (st == LightState::kRed && *decided == 0) *decided = 1;
          if (*decided == 2) return std::nullopt;
          return line_s;
        };
      } else {
        const double vc = rng.uniform(8.0, 12.0);
        const double t_enter = std::max(2.0, t_arrive + rng.uniform(-1.0, 4.0));
        const double y0 = -0.5 * w - 2.25 - vc * t_enter;
        scene.agents.push_back(make_track(
          next_id++, AgentType::kVehicle, 4.5, 1.9, 5, samples, dt,
          [cx, w](double s) { return Pose2{cx + 0.5 * w, s, 0.5 * kPi}; }, y0,
          [vc](double) { return vc; }));
        auto stopped_at = std::make_shared<double>(-1.0);
        Scene * sp = &scene;
        const Polygon zone_area = zone.area;
        ex.stop_at = [sp, line_s, stopped_at, zone_area, dt, w](
                       double t, const TrajState & s, double s_front) -> std::optional<double> {
          if (s_front > line_s + 0.5) return std::nullopt;
          if (*stopped_at < 0.0) {
            if (s.v < 0.05 && line_s - s_front < 2.5) *stopped_at = t;
            return line_s;
          }
          if (t < *stopped_at + 1.5) return line_s;
          const std::size_t i = static_cast<std::size_t>(std::lround(t / dt));
          for (const auto & a : sp->agents) {
            const OrientedBox b = a.box_at(i);
            if (box_polygon_intersect(b, zone_area)) return line_s;
            const double to_zone = -0.5 * w - (b.center.y + 0.5 * b.length);
            if (to_zone > 0.0 && to_zone < 5.0 * std::max(a.speeds[i], 0.1)) return line_s;
          }
          return std::nullopt;
        };
      }
      break;
    }
    case Template::kPedestrianCrossing: {
      add_straight_drivable(scene.map, road);
      const double cx = kRoadStart + kEgoStartS + rng.uniform(cfg.intersection_distance);
      Crosswalk cw;
      cw.id = 1;
      cw.area = rect(cx - 2.0, -0.5 * w - kShoulder, cx + 2.0, 1.5 * w + kShoulder);
      scene.map.crosswalks.push_back(cw);
      ConflictZone zone;
      zone.id = 1;
      zone.area = rect(cx - 2.0, -0.5 * w, cx + 2.0, 0.5 * w);
      zone.pedestrian_priority = true;
      scene.map.conflict_zones.push_back(zone);
      const double vp = rng.uniform(cfg.pedestrian_speed);
      const double front0 = ego_cs + 0.5 * scene.ego_size.length;
      const double entry_s = cx - 2.0 - kRoadStart;
      const double t_arrive = (entry_s - front0) / v0;
      const double t_p = std::max(1.0, t_arrive + rng.uniform(-3.0, 1.0));
      const double y_edge = -0.5 * w - 0.3;
      const double y0 = y_edge - vp * t_p;
      scene.agents.push_back(make_track(
        next_id++, AgentType::kPedestrian, 0.6, 0.6, -1, samples, dt,
        [cx](double s) { return Pose2{cx, s, 0.5 * kPi}; }, y0, [vp](double) { return vp; }));
      Scene * sp = &scene;
      const double stop_s = entry_s - 1.0;
      ex.stop_at = [sp, stop_s, entry_s, w, vp, dt](
                     double t, const TrajState &, double s_front) -> std::optional<double> {
        if (s_front > entry_s) return std::nullopt;
        const std::size_t i = static_cast<std::size_t>(std::lround(t / dt));
        const double y = sp->agents.front().poses[i].y;
        const double y_lo = -0.5 * w - 0.3 - 3.0 * vp;
        const double y_hi = 0.5 * w + 1.0;
        if (y > y_lo && y < y_hi) return stop_s;
        return std::nullopt;
      };
      break;
    }
    case Template::kParkedCarNudge: {
      add_straight_drivable(scene.map, road);
      v0 = rng.uniform(cfg.ego_speed.lo, std::min(cfg.ego_speed.hi, 11.0));
      const double sp = kEgoStartS + rng.uniform(cfg.parked_distance);
      const Pose2 p = road.pose(sp, -0.5 * w + 0.55);
      scene.static_obstacles.push_back({p.position(), p.theta, 4.5, 1.9});
      const double bump = 0.5 * w - 0.15;
      ex.offset = [sp, bump](double s) {
        if (s < sp) return bump * smoothstep5((s - (sp - 50.0)) / 30.0);
        return bump * (1.0 - smoothstep5((s - (sp + 10.0)) / 25.0));
      };
      break;
    }
    case Template::kOncomingTraffic: {
      add_straight_drivable(scene.map, road);
      const int count = rng.integer(2, 4);
      double s = ego_cs + rng.uniform(60.0, 120.0);
      for (int k = 0; k < count; ++k) {
        const double vo = rng.uniform(8.0, 13.0);
        scene.agents.push_back(
          lane_follower(next_id++, road, s, true, samples, dt, [vo](double) { return vo; }));
        s += rng.uniform(40.0, 90.0);
      }
      break;
    }
  }
  ex.v_des = v0;
  scene.map.finalize();
  scene.ego_states = drive_expert(scene, ex, start_state(road, v0));
  return scene;
}

std::vector<Scene> generate_suite(const ScenarioConfig & cfg, int workers)
{
  cfg.validate();
  std::vector<std::pair<Template, std::size_t>> jobs;
  for (std::size_t t = 0; t < kNumTemplates; ++t) {
    for (int k = 0; k < cfg.counts[t]; ++k) {
      jobs.emplace_back(static_cast<Template>(t), jobs.size());
    }
  }
  std::vector<Scene> out(jobs.size());
  const std::size_t nw = static_cast<std::size_t>(std::max(1, workers));
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < nw; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < jobs.size(); i += nw) {
        out[i] = generate_scene(jobs[i].first, cfg, jobs[i].second);
      }
    });
  }
  for (auto & t : threads) t.join();
  return out;
}

}  // namespace hybridplan::scenario
