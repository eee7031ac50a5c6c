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

#include "hybridplan/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridplan::kinematics
{

double KinematicLimits::curvature_cap() const
{
  return std::min(max_curvature, std::tan(max_steering_angle) / wheelbase);
}

KinematicLimits KinematicLimits::comfort() const
{
  KinematicLimits out = *this;
  out.max_jerk = comfort_max_jerk;
  out.max_accel = comfort_max_accel;
  out.min_accel = comfort_min_accel;
  out.max_lateral_accel = comfort_max_lateral_accel;
  return out;
}

void KinematicLimits::validate() const
{
  const double positives[] = {max_jerk,           max_accel,          max_curvature,
                              max_steering_angle, wheelbase,          max_lateral_accel,
                              max_curvature_rate, max_steering_jerk,  comfort_max_jerk,
                              comfort_max_accel,  comfort_max_lateral_accel};
  for (const double v : positives) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("kinematic limits must be positive and finite");
    }
  }
  if (!(min_accel < 0.0) || !(comfort_min_accel < 0.0)) {
    throw std::invalid_argument("min_accel must be negative");
  }
  if (
    comfort_max_jerk > max_jerk || comfort_max_accel > max_accel ||
    comfort_min_accel < min_accel || comfort_max_lateral_accel > max_lateral_accel) {
    throw std::invalid_argument("comfort limits must not be looser than hard limits");
  }
}

TrajState step(const TrajState & s, double j, double k, double dt)
{
  TrajState n;
  n.x = s.x + s.v * std::cos(s.theta) * dt;
  n.y = s.y + s.v * std::sin(s.theta) * dt;
  n.theta = normalize_angle(s.theta + k * s.v * dt);
  n.v = std::max(0.0, s.v + s.a * dt);
  n.a = s.a + j * dt;
  n.k = k;
  n.j = j;
  return n;
}

namespace
{

enum class JerkCase : unsigned char { kFree, kSaturated, kAccelLow, kAccelHigh };
enum class CurvCase : unsigned char { kFree, kCap, kLateral, kRateFixed, kRateSteer };

struct ClipOutcome
{
  double j{0.0};
  double k{0.0};
  JerkCase jerk_case{JerkCase::kFree};
  CurvCase curv_case{CurvCase::kFree};
  double curv_sign{0.0};
  bool speed_floored{false};
  double next_v{0.0};
};

// Clips one control pair given the state it is applied from. The bounds are evaluated against the
// state the controls lead into, which is what check_dynamics inspects.
ClipOutcome clip_one(
  const TrajState & s, double raw_j, double raw_k, const KinematicLimits & lim, double dt)
{
  ClipOutcome out;

  const double lo_acc = (lim.min_accel - s.a) / dt;
  const double hi_acc = (lim.max_accel - s.a) / dt;
  const double lo_j = std::max(-lim.max_jerk, lo_acc);
  const double hi_j = std::min(lim.max_jerk, hi_acc);
  if (lo_j > hi_j) {
    out.j = s.a > lim.max_accel ? -lim.max_jerk : lim.max_jerk;
    out.jerk_case = JerkCase::kSaturated;
  } else if (raw_j < lo_j) {
    out.j = lo_j;
    out.jerk_case = lo_acc > -lim.max_jerk ? JerkCase::kAccelLow : JerkCase::kSaturated;
  } else if (raw_j > hi_j) {
    out.j = hi_j;
    out.jerk_case = hi_acc < lim.max_jerk ? JerkCase::kAccelHigh : JerkCase::kSaturated;
  } else {
    out.j = raw_j;
  }

  double vn = s.v + s.a * dt;
  if (vn < 0.0) {
    vn = 0.0;
    out.speed_floored = true;
  }
  out.next_v = vn;

  const double cap = lim.curvature_cap();
  double kb = cap;
  bool lateral_active = false;
  if (vn > 0.0 && lim.max_lateral_accel / (vn * vn) < cap) {
    kb = lim.max_lateral_accel / (vn * vn);
    lateral_active = true;
  }
  double rate = lim.max_curvature_rate;
  bool steer_active = false;
  if (vn > 0.0 && lim.max_steering_jerk / vn < rate) {
    rate = lim.max_steering_jerk / vn;
    steer_active = true;
  }
  const CurvCase bound_case = lateral_active ? CurvCase::kLateral : CurvCase::kCap;
  const CurvCase rate_case = steer_active ? CurvCase::kRateSteer : CurvCase::kRateFixed;
  const double kp = s.k;
  const double lo_k = std::max(-kb, kp - rate * dt);
  const double hi_k = std::min(kb, kp + rate * dt);
  if (lo_k > hi_k) {
    // The previous curvature is out of reach of the magnitude bound; the magnitude bound wins.
    out.curv_sign = kp > 0.0 ? 1.0 : -1.0;
    out.k = out.curv_sign * kb;
    out.curv_case = bound_case;
  } else if (raw_k < lo_k) {
    out.k = lo_k;
    out.curv_sign = -1.0;
    out.curv_case = (-kb >= kp - rate * dt) ? bound_case : rate_case;
  } else if (raw_k > hi_k) {
    out.k = hi_k;
    out.curv_sign = 1.0;
    out.curv_case = (kb <= kp + rate * dt) ? bound_case : rate_case;
  } else {
    out.k = raw_k;
  }
  return out;
}

void require_positive_dt(double dt)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dt must be positive");
  }
}

}  // namespace

ControlSequence clip_controls(
  const ControlSequence & raw, const TrajState & state, const KinematicLimits & limits)
{
  require_positive_dt(raw.dt);
  ControlSequence out;
  out.dt = raw.dt;
  out.controls.reserve(raw.size());
  TrajState s = state;
  for (const auto & c : raw.controls) {
    const ClipOutcome r = clip_one(s, c.j, c.k, limits, raw.dt);
    out.controls.push_back({r.j, r.k});
    s = step(s, r.j, r.k, raw.dt);
  }
  return out;
}

Trajectory rollout(const TrajState & s0, const ControlSequence & controls, const KinematicLimits & limits)
{
  const ControlSequence clipped = clip_controls(controls, s0, limits);
  Trajectory traj;
  traj.dt = controls.dt;
  traj.states.reserve(clipped.size() + 1);
  traj.states.push_back(s0);
  for (const auto & c : clipped.controls) {
    traj.states.push_back(step(traj.states.back(), c.j, c.k, controls.dt));
  }
  return traj;
}

Trajectory derive_profile(std::span<const Pose2> poses, std::span<const double> times)
{
  if (poses.size() != times.size()) {
    throw std::invalid_argument("derive_profile: poses and timestamps differ in length");
  }
  if (times.size() < 2) {
    throw std::invalid_argument("derive_profile needs at least 4 poses");
  }
  const double dt = times[1] - times[0];
  require_positive_dt(dt);
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-6 * dt) {
      throw std::invalid_argument("derive_profile: timestamps are not uniform");
    }
  }
  return derive_profile(poses, dt);
}

Trajectory derive_profile(std::span<const Pose2> poses, double dt)
{
  require_positive_dt(dt);
  const std::size_t n = poses.size();
  if (n < 4) {
    throw std::invalid_argument("derive_profile needs at least 4 poses");
  }
  Trajectory traj;
  traj.dt = dt;
  traj.states.resize(n);
  std::vector<double> disp(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto & s = traj.states[i];
    s.x = poses[i].x;
    s.y = poses[i].y;
    s.theta = normalize_angle(poses[i].theta);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    disp[i] = (poses[i + 1].position() - poses[i].position()).norm();
    traj.states[i].v = disp[i] / dt;
  }
  traj.states[n - 1].v = traj.states[n - 2].v;

  for (std::size_t i = 0; i + 2 < n; ++i) {
    traj.states[i].a = (traj.states[i + 1].v - traj.states[i].v) / dt;
  }
  traj.states[n - 2].a = traj.states[n - 3].a;
  traj.states[n - 1].a = traj.states[n - 3].a;

  for (std::size_t i = 1; i + 2 < n; ++i) {
    traj.states[i].j = (traj.states[i].a - traj.states[i - 1].a) / dt;
  }
  traj.states[0].j = traj.states[1].j;
  traj.states[n - 2].j = traj.states[n - 3].j;
  traj.states[n - 1].j = traj.states[n - 3].j;

  for (std::size_t i = 1; i < n; ++i) {
    const double ds = disp[i - 1];
    traj.states[i].k =
      ds < 1e-6 ? 0.0 : angle_diff(traj.states[i].theta, traj.states[i - 1].theta) / ds;
  }
  traj.states[0].k = traj.states[1].k;
  return traj;
}

// ---------------------------------------------------------------------------

DifferentiableRollout::DifferentiableRollout(
  const TrajState & s0, const KinematicLimits & limits, double dt)
: s0_(s0), limits_(limits), dt_(dt)
{
  require_positive_dt(dt);
}

const Trajectory & DifferentiableRollout::forward(
  std::span<const double> raw_j, std::span<const double> raw_k)
{
  if (raw_j.size() != raw_k.size()) {
    throw std::invalid_argument("jerk and curvature sequences differ in length");
  }
  const std::size_t steps = raw_j.size();
  traj_.dt = dt_;
  traj_.states.assign(1, s0_);
  traj_.states.reserve(steps + 1);
  records_.assign(steps, StepRecord{});
  for (std::size_t t = 0; t < steps; ++t) {
    const TrajState & s = traj_.states.back();
    const ClipOutcome r = clip_one(s, raw_j[t], raw_k[t], limits_, dt_);
    StepRecord & rec = records_[t];
    rec.jerk_case = static_cast<JerkCase>(r.jerk_case);
    rec.curv_case = static_cast<CurvCase>(r.curv_case);
    rec.curv_sign = r.curv_sign;
    rec.speed_floored = r.speed_floored;
    rec.next_v = r.next_v;
    traj_.states.push_back(step(s, r.j, r.k, dt_));
  }
  return traj_;
}

void DifferentiableRollout::backward(
  std::span<const double> g_x, std::span<const double> g_y, std::span<const double> g_theta,
  std::span<const double> g_k, std::span<const double> g_j, std::span<double> d_raw_j,
  std::span<double> d_raw_k) const
{
  const std::size_t steps = records_.size();
  if (
    g_x.size() != steps || g_y.size() != steps || g_theta.size() != steps || g_k.size() != steps ||
    g_j.size() != steps || d_raw_j.size() != steps || d_raw_k.size() != steps) {
    throw std::invalid_argument("adjoint arrays must match the number of steps");
  }
  std::fill(d_raw_j.begin(), d_raw_j.end(), 0.0);
  std::fill(d_raw_k.begin(), d_raw_k.end(), 0.0);
  if (steps == 0) return;

  // Adjoints of the state currently being processed (s_{t+1}).
  double ax = g_x[steps - 1];
  double ay = g_y[steps - 1];
  double ath = g_theta[steps - 1];
  double av = 0.0;
  double aa = 0.0;
  double ak = g_k[steps - 1];
  double aj = g_j[steps - 1];

  const double dt = dt_;
  const KinematicLimits & lim = limits_;
  for (std::size_t t = steps; t-- > 0;) {
    const TrajState & s = traj_.states[t];
    const TrajState & n = traj_.states[t + 1];
    const StepRecord & rec = records_[t];

    const double k_bar = ak + ath * s.v * dt;
    const double j_bar = aj + aa * dt;

    const double c = std::cos(s.theta);
    const double sn = std::sin(s.theta);
    double px = ax;
    double py = ay;
    double pth = ath + ax * (-s.v * sn * dt) + ay * (s.v * c * dt);
    double pv = ax * c * dt + ay * sn * dt + ath * n.k * dt;
    double pa = aa;
    double pk = 0.0;
    double vn_bar = av;

    const double vn = rec.next_v;
    switch (rec.curv_case) {
      case CurvCase::kFree:
        d_raw_k[t] = k_bar;
        break;
      case CurvCase::kCap:
        break;
      case CurvCase::kLateral:
        vn_bar += k_bar * (-2.0 * rec.curv_sign * lim.max_lateral_accel / (vn * vn * vn));
        break;
      case CurvCase::kRateFixed:
        pk += k_bar;
        break;
      case CurvCase::kRateSteer:
        pk += k_bar;
        vn_bar += k_bar * (-rec.curv_sign * lim.max_steering_jerk * dt / (vn * vn));
        break;
    }
    switch (rec.jerk_case) {
      case JerkCase::kFree:
        d_raw_j[t] = j_bar;
        break;
      case JerkCase::kSaturated:
        break;
      case JerkCase::kAccelLow:
      case JerkCase::kAccelHigh:
        pa += j_bar * (-1.0 / dt);
        break;
    }
    if (!rec.speed_floored) {
      pv += vn_bar;
      pa += vn_bar * dt;
    }

    if (t == 0) break;
    ax = px + g_x[t - 1];
    ay = py + g_y[t - 1];
    ath = pth + g_theta[t - 1];
    av = pv;
    aa = pa;
    ak = pk + g_k[t - 1];
    aj = g_j[t - 1];
  }
}

}  // namespace hybridplan::kinematics
