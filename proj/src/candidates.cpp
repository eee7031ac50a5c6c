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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>

namespace hybridplan::fallback
{

std::array<double, 5> quartic_speed_plan(double v0, double a0, double v_target, double T)
{
  const double T2 = T * T;
  const double T3 = T2 * T;
  const double r1 = v_target - v0 - a0 * T;
  const double r2 = -a0;
  const double det = 12.0 * T2 * T2;
  const double c3 = (r1 * 12.0 * T2 - 4.0 * T3 * r2) / det;
  const double c4 = (3.0 * T2 * r2 - 6.0 * T * r1) / det;
  return {0.0, v0, 0.5 * a0, c3, c4};
}

std::array<double, 6> quintic_position_plan(double v0, double a0, double s_T, double v_T, double T)
{
  const double T2 = T * T;
  const double T3 = T2 * T;
  Eigen::Matrix3d A;
  A << T3, T3 * T, T3 * T2, 3.0 * T2, 4.0 * T3, 5.0 * T3 * T, 6.0 * T, 12.0 * T2, 20.0 * T3;
  const Eigen::Vector3d b{s_T - v0 * T - 0.5 * a0 * T2, v_T - v0 - a0 * T, -a0};
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  return {0.0, v0, 0.5 * a0, c[0], c[1], c[2]};
}

namespace
{

// Lateral offset plan d(sigma) over [0, S], a quintic from (d0, d0', d0'') to (0, 0, 0).
struct LateralPlan
{
  std::array<double, 6> c{};
  double length{1.0};

  double d(double sigma) const
  {
    if (sigma >= length) return 0.0;
    sigma = std::max(0.0, sigma);
    double out = 0.0;
    for (int i = 5; i >= 0; --i) out = out * sigma + c[static_cast<std::size_t>(i)];
    return out;
  }
};

LateralPlan lateral_plan(double d0, double d1, double d2, double S)
{
  LateralPlan p;
  p.length = S;
  const double S2 = S * S;
  const double S3 = S2 * S;
  Eigen::Matrix3d A;
  A << S3, S3 * S, S3 * S2, 3.0 * S2, 4.0 * S3, 5.0 * S3 * S, 6.0 * S, 12.0 * S2, 20.0 * S3;
  const Eigen::Vector3d b{-(d0 + d1 * S + 0.5 * d2 * S2), -(d1 + d2 * S), -d2};
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  p.c = {d0, d1, 0.5 * d2, c[0], c[1], c[2]};
  return p;
}

struct LateralTracker
{
  const Polyline * route{nullptr};
  LateralPlan plan;
  double s0{0.0};
  double s_hint{0.0};

  // Pure pursuit toward the planned offset path.
  double curvature(const TrajState & s)
  {
    if (route == nullptr) return 0.0;
    const auto p = route->project(s.position(), s_hint - 5.0, s_hint + 5.0 + 2.0 * s.v * 0.1 + 5.0);
    s_hint = p.s;
    const double look = std::max(4.0, s.v);
    const double st = p.s + look;
    const Vec2 target = route->point_at(st) + route->normal_at(st) * plan.d(st - s0);
    const Pose2 local = to_ego_frame({target.x, target.y, 0.0}, s.pose());
    const double l2 = local.x * local.x + local.y * local.y;
    return l2 > 1e-9 ? 2.0 * local.y / l2 : 0.0;
  }
};

Trajectory realize(
  const TrajState & ego, std::size_t steps, double dt, const kinematics::KinematicLimits & lim,
  const std::function<double(double, const TrajState &)> & next_accel,
  std::optional<LateralTracker> tracker)
{
  Trajectory traj;
  traj.dt = dt;
  traj.states.reserve(steps + 1);
  traj.states.push_back(ego);
  kinematics::ControlSequence one;
  one.dt = dt;
  one.controls.resize(1);
  for (std::size_t i = 0; i < steps; ++i) {
    const TrajState & s = traj.states.back();
    const double t_next = static_cast<double>(i + 1) * dt;
    one.controls[0].j = (next_accel(t_next, s) - s.a) / dt;
    one.controls[0].k = tracker ? tracker->curvature(s) : 0.0;
    const auto c = kinematics::clip_controls(one, s, lim).controls[0];
    traj.states.push_back(kinematics::step(s, c.j, c.k, dt));
  }
  return traj;
}

}  // namespace

std::vector<Candidate> generate_candidates(
  const TrajState & ego, const VehicleSize & ego_size, const Polyline & route,
  const std::optional<LeadForecast> & lead, const FallbackConfig & cfg)
{
  (void)ego_size;
  const auto lim = cfg.check_limits();
  const std::size_t steps = cfg.steps();
  const double dt = cfg.dt;
  const double H = static_cast<double>(steps) * dt;
  const CandidateSpec & spec = cfg.candidates;

  std::optional<LateralTracker> tracker;
  if (!route.empty()) {
    const auto p = route.project(ego.position());
    if (std::abs(p.d) <= spec.max_projection_offset) {
      const double dtheta = std::clamp(angle_diff(ego.theta, route.heading_at(p.s)), -1.2, 1.2);
      const double S = std::max(spec.min_lateral_distance, spec.lateral_distance_per_speed * ego.v);
      LateralTracker t;
      t.route = &route;
      t.plan = lateral_plan(p.d, std::tan(dtheta), ego.k - route.curvature_at(p.s), S);
      t.s0 = p.s;
      t.s_hint = p.s;
      tracker = t;
    }
  }

  std::vector<Candidate> out;
  if (tracker) {
    std::vector<double> targets;
    for (const double dv : spec.speed_deltas) {
      const double vt = std::max(0.0, ego.v + dv);
      if (std::find(targets.begin(), targets.end(), vt) != targets.end()) continue;
      targets.push_back(vt);
      const auto c = quartic_speed_plan(ego.v, ego.a, vt, H);
      auto acc = [c, H](double t, const TrajState &) {
        if (t > H) return 0.0;
        return 2.0 * c[2] + 6.0 * c[3] * t + 12.0 * c[4] * t * t;
      };
      out.push_back({CandidateKind::kSpeedKeeping, vt, realize(ego, steps, dt, lim, acc, tracker)});
    }
    if (lead) {
      for (const double gap : spec.time_gaps) {
        const double target = lead->s_end - (spec.standstill_gap + gap * lead->v_end);
        const auto c = quintic_position_plan(ego.v, ego.a, target, lead->v_end, H);
        auto acc = [c, H](double t, const TrajState &) {
          if (t > H) return 0.0;
          return 2.0 * c[2] + 6.0 * c[3] * t + 12.0 * c[4] * t * t + 20.0 * c[5] * t * t * t;
        };
        out.push_back(
          {CandidateKind::kDistanceKeeping, gap, realize(ego, steps, dt, lim, acc, tracker)});
      }
    }
  }

  const double jmax = lim.max_jerk;
  const double a_stop = -std::min(spec.stop_decel, -lim.min_accel);
  auto stop_acc = [jmax, a_stop, dt](double, const TrajState & s) {
    const double a = s.a;
    if (s.v <= 1e-6) {
      return a < 0.0 ? std::min(0.0, a + jmax * dt) : std::max(0.0, a - jmax * dt);
    }
    const double v_next = std::max(0.0, s.v + a * dt);
    if (a < 0.0 && v_next <= a * a / (2.0 * jmax)) {
      return std::min(0.0, a + jmax * dt);
    }
    return a > a_stop ? std::max(a_stop, a - jmax * dt) : std::min(a_stop, a + jmax * dt);
  };
  out.push_back({CandidateKind::kEmergencyStop, 0.0, realize(ego, steps, dt, lim, stop_acc, tracker)});
  return out;
}

std::optional<LeadForecast> forecast_lead(
  const TrajState & ego, const World & world, const FallbackConfig & cfg)
{
  if (world.map == nullptr || world.map->route_centerline.empty()) return std::nullopt;
  const Polyline & route = world.map->route_centerline;
  const auto * preds = world.predictions;
  const std::size_t steps = preds != nullptr ? preds->steps() : 0;
  std::vector<PathObject> now_objects;
  std::vector<PathObject> end_objects;
  if (steps > 0) {
    for (const auto & a : preds->agents) {
      now_objects.push_back({a.box(0), a.states[0].v});
      end_objects.push_back({a.box(steps - 1), a.states[steps - 1].v});
    }
  }
  for (const auto & box : world.static_obstacles) {
    now_objects.push_back({box, 0.0});
    end_objects.push_back({box, 0.0});
  }
  if (now_objects.empty()) return std::nullopt;
  const OrientedBox ego_box = footprint(ego, world.ego_size);
  const LeadMetrics m =
    lead_metrics(route, ego_box, ego.v, now_objects, {cfg.path_margin, cfg.headway_min_speed});
  if (!m.has_lead) return std::nullopt;
  const PathObject & end = end_objects[m.lead_index];
  const auto pe = route.project(end.box.center);
  const double rel = angle_diff(end.box.heading, route.heading_at(pe.s));
  LeadForecast f;
  f.s_end = pe.s - m.ego_s - 0.5 * (ego_box.length + end.box.length);
  f.v_end = std::max(0.0, end.v * std::cos(rel));
  f.length = end.box.length;
  return f;
}

}  // namespace hybridplan::fallback
