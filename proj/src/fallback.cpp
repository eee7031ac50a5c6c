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


#include "hybridplan/fallback.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hybridplan::fallback
{

namespace
{

constexpr double kTol = 1e-9;

constexpr std::array<const char *, kNumCauses> kCauseNames{
  "jerk",       "accel",           "curvature",    "curvature-rate",
  "lateral-accel", "steering-jerk", "stop-sign",   "right-of-way",
  "red-light",  "off-drivable",    "agent-overlap", "static-overlap",
  "lane-boundary-contact", "longitudinal-gap", "ttc", "headway"};

}  // namespace

const char * to_string(Cause c)
{
  return kCauseNames[static_cast<std::size_t>(c)];
}

Cause cause_from_string(const std::string & s)
{
  for (std::size_t i = 0; i < kCauseNames.size(); ++i) {
    if (s == kCauseNames[i]) return static_cast<Cause>(i);
  }
  throw ParseError("unknown violation cause '" + s + "'");
}

Category category_of(Cause c)
{
  if (c <= Cause::kSteeringJerk) return Category::kDynamic;
  if (c <= Cause::kOffDrivable) return Category::kLegality;
  return Category::kCollision;
}

const char * to_string(Category c)
{
  switch (c) {
    case Category::kDynamic:
      return "dynamic";
    case Category::kLegality:
      return "legality";
    case Category::kCollision:
      return "collision";
  }
  return "dynamic";
}

const char * to_string(CandidateKind k)
{
  switch (k) {
    case CandidateKind::kSpeedKeeping:
      return "speed-keeping";
    case CandidateKind::kDistanceKeeping:
      return "distance-keeping";
    case CandidateKind::kEmergencyStop:
      return "emergency-stop";
  }
  return "emergency-stop";
}

const char * to_string(Source s)
{
  switch (s) {
    case Source::kML:
      return "ml";
    case Source::kCandidate:
      return "candidate";
    case Source::kEmergencyStop:
      return "emergency-stop";
  }
  return "ml";
}

void ViolationReport::append(const ViolationReport & o)
{
  violations.insert(violations.end(), o.violations.begin(), o.violations.end());
}

bool ViolationReport::has(Cause c) const
{
  return std::any_of(
    violations.begin(), violations.end(), [c](const Violation & v) { return v.cause == c; });
}

std::optional<Violation> ViolationReport::primary() const
{
  if (violations.empty()) return std::nullopt;
  const Violation * best = &violations.front();
  for (const auto & v : violations) {
    if (v.index < best->index) best = &v;
  }
  return *best;
}

std::size_t FallbackConfig::steps() const
{
  return static_cast<std::size_t>(std::lround(horizon / dt));
}

void FallbackConfig::validate() const
{
  limits.validate();
  if (!(grid_resolution > 0.0 && grid_resolution <= 0.5)) {
    throw std::invalid_argument("fallback: grid_resolution must be in (0, 0.5]");
  }
  const double positives[] = {min_gap,      ttc_threshold, headway_threshold, stop_distance,
                              stop_speed,   horizon,       dt};
  for (const double v : positives) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("fallback: thresholds must be positive");
    }
  }
  if (headway_min_speed < 0.0 || path_margin < 0.0 || row_time_buffer < 0.0) {
    throw std::invalid_argument("fallback: margins must be non-negative");
  }
  if (std::abs(horizon / dt - std::round(horizon / dt)) > 1e-6) {
    throw std::invalid_argument("fallback: horizon must be a multiple of dt");
  }
  if (!(candidates.stop_decel > 0.0) || !(candidates.standstill_gap >= 0.0)) {
    throw std::invalid_argument("fallback: candidate stop_decel and standstill_gap must be positive");
  }
  for (const double g : candidates.time_gaps) {
    if (!(g >= 0.0)) throw std::invalid_argument("fallback: time gaps must be non-negative");
  }
}

ViolationReport check_dynamics(
  const Trajectory & traj, const kinematics::KinematicLimits & limits, std::size_t first)
{
  ViolationReport r;
  const double cap = limits.curvature_cap();
  const double dt = traj.dt;
  for (std::size_t i = first; i < traj.size(); ++i) {
    const TrajState & s = traj[i];
    if (std::abs(s.j) > limits.max_jerk + kTol) {
      r.violations.push_back({Cause::kJerk, i, s.j, limits.max_jerk});
    }
    if (s.a > limits.max_accel + kTol) {
      r.violations.push_back({Cause::kAccel, i, s.a, limits.max_accel});
    } else if (s.a < limits.min_accel - kTol) {
      r.violations.push_back({Cause::kAccel, i, s.a, limits.min_accel});
    }
    if (std::abs(s.k) > cap + kTol) {
      r.violations.push_back({Cause::kCurvature, i, s.k, cap});
    }
    const double lat = std::abs(s.k) * s.v * s.v;
    if (lat > limits.max_lateral_accel + kTol) {
      r.violations.push_back({Cause::kLateralAccel, i, lat, limits.max_lateral_accel});
    }
    if (i >= 1) {
      const double rate = std::abs(s.k - traj[i - 1].k) / dt;
      if (rate > limits.max_curvature_rate + kTol) {
        r.violations.push_back({Cause::kCurvatureRate, i, rate, limits.max_curvature_rate});
      }
      if (rate * s.v > limits.max_steering_jerk + kTol) {
        r.violations.push_back({Cause::kSteeringJerk, i, rate * s.v, limits.max_steering_jerk});
      }
    }
  }
  return r;
}

namespace
{

bool is_prioritized(const prediction::AgentPrediction & a, const ConflictZone & z)
{
  if (z.pedestrian_priority && a.type == AgentType::kPedestrian) return true;
  return std::find(z.priority_lanes.begin(), z.priority_lanes.end(), a.lane_id) !=
         z.priority_lanes.end();
}

double nearest_boundary(const std::vector<Polygon> & polys, const Vec2 & p)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & poly : polys) {
    best = std::min(best, poly.boundary_distance(p));
  }
  return std::isfinite(best) ? best : 0.0;
}

}  // namespace

ViolationReport check_legality(const Trajectory & traj, const World & world, const FallbackConfig & cfg)
{
  ViolationReport r;
  if (world.map == nullptr || traj.size() < 2) return r;
  const MapModel & map = *world.map;
  const VehicleSize & size = world.ego_size;
  const std::size_t n = traj.size();

  std::vector<OrientedBox> boxes(n);
  std::vector<Vec2> fronts(n);
  for (std::size_t i = 0; i < n; ++i) {
    boxes[i] = footprint(traj[i], size);
    fronts[i] = boxes[i].center + unit_vector(boxes[i].heading) * (0.5 * size.length);
  }

  for (const auto & line : map.stop_lines) {
    bool red = false;
    if (line.control == StopControl::kLight) {
      const auto it = world.lights.find(line.light_id);
      red = it != world.lights.end() && it->second == LightState::kRed;
      if (!red) continue;
    } else if (
      std::find(world.cleared_stop_lines.begin(), world.cleared_stop_lines.end(), line.id) !=
      world.cleared_stop_lines.end()) {
      continue;
    }
    const Vec2 mid = (line.a + line.b) * 0.5;
    const Vec2 u = unit_vector(line.heading);
    const Vec2 nrm{-u.y, u.x};
    const double half = 0.5 * (line.b - line.a).norm();
    auto along = [&](std::size_t i) { return (fronts[i] - mid).dot(u); };
    auto relevant = [&](std::size_t i) {
      return std::abs((fronts[i] - mid).dot(nrm)) <= half &&
             std::abs(angle_diff(traj[i].theta, line.heading)) < 0.5 * kPi;
    };
    if (along(0) > 0.0) continue;
    bool stopped = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = along(i);
      if (i >= 1 && f > 0.0 && relevant(i)) {
        if (red) {
          r.violations.push_back({Cause::kRedLight, i, f, 0.0});
        } else if (!stopped) {
          r.violations.push_back({Cause::kStopSign, i, f, 0.0});
        }
        break;
      }
      if (traj[i].v < cfg.stop_speed && f >= -cfg.stop_distance) stopped = true;
    }
  }

  if (!map.drivable.empty()) {
    for (std::size_t i = 1; i < n; ++i) {
      for (const auto & c : boxes[i].corners()) {
        if (!map.in_drivable(c)) {
          r.violations.push_back({Cause::kOffDrivable, i, nearest_boundary(map.drivable, c), 0.0});
          break;
        }
      }
    }
  }

  if (world.predictions != nullptr) {
    const auto & preds = world.predictions->agents;
    const double dt = traj.dt;
    for (const auto & zone : map.conflict_zones) {
      if (box_polygon_intersect(boxes[0], zone.area)) continue;
      std::vector<double> occupied_times;
      for (const auto & a : preds) {
        if (!is_prioritized(a, zone)) continue;
        for (std::size_t k = 0; k < a.states.size(); ++k) {
          if (box_polygon_intersect(a.box(k), zone.area)) {
            occupied_times.push_back(static_cast<double>(k + 1) * world.predictions->dt);
          }
        }
      }
      if (occupied_times.empty()) continue;
      for (std::size_t i = 1; i < n; ++i) {
        if (!box_polygon_intersect(boxes[i], zone.area)) continue;
        const double t = static_cast<double>(i) * dt;
        double best = std::numeric_limits<double>::infinity();
        for (const double ot : occupied_times) best = std::min(best, std::abs(ot - t));
        if (best <= cfg.row_time_buffer) {
          r.violations.push_back({Cause::kRightOfWay, i, best, cfg.row_time_buffer});
          break;
        }
      }
    }
  }
  return r;
}

bool raster_overlap(const OrientedBox & a, const OrientedBox & b, double resolution)
{
  auto bounds = [](const OrientedBox & box, Vec2 & lo, Vec2 & hi) {
    const auto c = box.corners();
    lo = hi = c[0];
    for (const auto & p : c) {
      lo.x = std::min(lo.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }
  };
  Vec2 alo, ahi, blo, bhi;
  bounds(a, alo, ahi);
  bounds(b, blo, bhi);
  const Vec2 lo{std::max(alo.x, blo.x), std::max(alo.y, blo.y)};
  const Vec2 hi{std::min(ahi.x, bhi.x), std::min(ahi.y, bhi.y)};
  if (lo.x > hi.x || lo.y > hi.y) return false;
  const long ix0 = static_cast<long>(std::floor(lo.x / resolution));
  const long ix1 = static_cast<long>(std::floor(hi.x / resolution));
  const long iy0 = static_cast<long>(std::floor(lo.y / resolution));
  const long iy1 = static_cast<long>(std::floor(hi.y / resolution));
  for (long ix = ix0; ix <= ix1; ++ix) {
    for (long iy = iy0; iy <= iy1; ++iy) {
      const OrientedBox cell{
        {(static_cast<double>(ix) + 0.5) * resolution, (static_cast<double>(iy) + 0.5) * resolution},
        0.0,
        resolution,
        resolution};
      if (boxes_intersect(cell, a) && boxes_intersect(cell, b)) return true;
    }
  }
  return false;
}

LeadMetrics lead_metrics(
  const Polyline & route, const OrientedBox & ego_box, double ego_v,
  std::span<const PathObject> objects, const LeadParams & params)
{
  LeadMetrics m;
  if (route.empty()) return m;
  const auto pe = route.project(ego_box.center);
  m.ego_s = pe.s;
  double best_s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto & o = objects[i];
    if ((o.box.center - ego_box.center).norm() > 200.0) continue;
    const auto pa = route.project(o.box.center);
    if (!(pa.s > pe.s)) continue;
    const double rel = angle_diff(o.box.heading, route.heading_at(pa.s));
    if (std::abs(rel) >= 0.25 * kPi) continue;
    if (std::abs(pa.d - pe.d) >= 0.5 * (ego_box.width + o.box.width) + params.path_margin) continue;
    if (pa.s < best_s) {
      best_s = pa.s;
      m.has_lead = true;
      m.lead_index = i;
      m.lead_s = pa.s;
      m.lead_v = o.v * std::cos(rel);
      m.gap = pa.s - pe.s - 0.5 * (ego_box.length + o.box.length);
    }
  }
  if (!m.has_lead) return m;
  const double closing = ego_v - m.lead_v;
  if (closing > 0.0) m.ttc = std::max(0.0, m.gap) / closing;
  if (ego_v > params.headway_min_speed) m.headway = std::max(0.0, m.gap) / ego_v;
  return m;
}

ViolationReport check_collision(const Trajectory & traj, const World & world, const FallbackConfig & cfg)
{
  ViolationReport r;
  const std::size_t n = traj.size();
  const auto * preds = world.predictions;
  const std::size_t steps = preds != nullptr ? preds->steps() : 0;
  const LeadParams lp{cfg.path_margin, cfg.headway_min_speed};
  const bool have_route = world.map != nullptr && !world.map->route_centerline.empty();
  const bool have_lanes = world.map != nullptr && !world.map->lane_areas.empty();
  std::vector<PathObject> objects;
  for (std::size_t i = 1; i < n; ++i) {
    const OrientedBox ego = footprint(traj[i], world.ego_size);
    const double ego_r = ego.circumradius();
    const double slack = 2.0 * cfg.grid_resolution;
    objects.clear();
    if (preds != nullptr && steps > 0) {
      const std::size_t k = std::min(i - 1, steps - 1);
      for (const auto & a : preds->agents) {
        const OrientedBox box = a.box(k);
        objects.push_back({box, a.states[k].v});
        if ((box.center - ego.center).norm() > ego_r + box.circumradius() + slack) continue;
        if (raster_overlap(ego, box, cfg.grid_resolution)) {
          r.violations.push_back({Cause::kAgentOverlap, i, box_distance(ego, box), 0.0});
        }
      }
    }
    for (const auto & box : world.static_obstacles) {
      objects.push_back({box, 0.0});
      if ((box.center - ego.center).norm() > ego_r + box.circumradius() + slack) continue;
      if (raster_overlap(ego, box, cfg.grid_resolution)) {
        r.violations.push_back({Cause::kStaticOverlap, i, box_distance(ego, box), 0.0});
      }
    }
    if (have_lanes) {
      for (const auto & c : ego.corners()) {
        if (!world.map->in_any_lane(c)) {
          r.violations.push_back(
            {Cause::kLaneBoundaryContact, i, nearest_boundary(world.map->lane_areas, c), 0.0});
          break;
        }
      }
    }
    if (have_route && !objects.empty()) {
      const LeadMetrics m = lead_metrics(world.map->route_centerline, ego, traj[i].v, objects, lp);
      if (m.has_lead) {
        if (m.gap < cfg.min_gap) {
          r.violations.push_back({Cause::kLongitudinalGap, i, m.gap, cfg.min_gap});
        }
        if (m.ttc < cfg.ttc_threshold) {
          r.violations.push_back({Cause::kTtc, i, m.ttc, cfg.ttc_threshold});
        }
        if (m.headway < cfg.headway_threshold) {
          r.violations.push_back({Cause::kHeadway, i, m.headway, cfg.headway_threshold});
        }
      }
    }
  }
  return r;
}

ViolationReport check_all(const Trajectory & traj, const World & world, const FallbackConfig & cfg)
{
  ViolationReport r = check_dynamics(traj, cfg.check_limits(), 1);
  r.append(check_legality(traj, world, cfg));
  r.append(check_collision(traj, world, cfg));
  return r;
}

double position_distance(const Trajectory & a, const Trajectory & b)
{
  const std::size_t n = std::min(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = a[i].x - b[i].x;
    const double dy = a[i].y - b[i].y;
    sum += dx * dx + dy * dy;
  }
  return sum;
}

FallbackDecision select_trajectory(const Trajectory & ml, const World & world, const FallbackConfig & cfg)
{
  FallbackDecision d;
  d.ml_report = check_all(ml, world, cfg);
  if (d.ml_report.feasible()) {
    d.chosen = ml;
    d.source = Source::kML;
    return d;
  }
  const Polyline empty;
  const Polyline & route = world.map != nullptr ? world.map->route_centerline : empty;
  d.candidates = generate_candidates(ml[0], world.ego_size, route, forecast_lead(ml[0], world, cfg), cfg);
  d.candidate_reports.reserve(d.candidates.size());
  d.distances.reserve(d.candidates.size());
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.candidates.size(); ++i) {
    d.candidate_reports.push_back(check_all(d.candidates[i].traj, world, cfg));
    d.distances.push_back(position_distance(d.candidates[i].traj, ml));
    if (d.candidate_reports.back().feasible() && d.distances.back() < best_dist) {
      best_dist = d.distances.back();
      best = static_cast<int>(i);
    }
  }
  if (best >= 0) {
    d.chosen = d.candidates[static_cast<std::size_t>(best)].traj;
    d.source = Source::kCandidate;
    d.candidate_index = best;
    return d;
  }
  for (std::size_t i = d.candidates.size(); i-- > 0;) {
    if (d.candidates[i].kind == CandidateKind::kEmergencyStop) {
      d.chosen = d.candidates[i].traj;
      d.candidate_index = static_cast<int>(i);
      break;
    }
  }
  d.source = Source::kEmergencyStop;
  return d;
}

std::string decision_log_line(double timestamp, const FallbackDecision & d)
{
  std::string causes;
  std::array<bool, kNumCauses> seen{};
  for (const auto & v : d.ml_report.violations) {
    const auto c = static_cast<std::size_t>(v.cause);
    if (seen[c]) continue;
    seen[c] = true;
    if (!causes.empty()) causes += ',';
    causes += to_string(v.cause);
  }
  if (causes.empty()) causes = "-";
  const double dist =
    d.source == Source::kML ? 0.0 : d.distances.at(static_cast<std::size_t>(d.candidate_index));
  std::string source = to_string(d.source);
  if (d.source == Source::kCandidate) source += ":" + std::to_string(d.candidate_index);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "t=%.2f", timestamp);
  std::string line = buf;
  line += " source=" + source + " causes=" + causes;
  std::snprintf(buf, sizeof(buf), " distance=%.6f", dist);
  line += buf;
  return line;
}

}  // namespace hybridplan::fallback
