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

#ifndef HYBRIDPLAN__KINEMATICS_HPP_
#define HYBRIDPLAN__KINEMATICS_HPP_

#include "hybridplan/core_types.hpp"

#include <span>
#include <vector>

namespace hybridplan::kinematics
{

/// Vehicle limits. Hard bounds are what the vehicle can do; comfort bounds are the tighter values
/// the fallback layer checks planned trajectories against.
struct KinematicLimits
{
  double max_jerk{8.0};                 // m/s^3
  double max_accel{3.0};                // m/s^2
  double min_accel{-8.0};               // m/s^2
  double max_curvature{0.2};            // 1/m
  double max_steering_angle{0.6};       // rad
  double wheelbase{2.8};                // m
  double max_lateral_accel{5.0};        // m/s^2
  double max_curvature_rate{0.5};       // 1/(m s)
  double max_steering_jerk{2.0};        // 1/s^2, curvature rate times speed

  double comfort_max_jerk{4.0};
  double comfort_max_accel{2.0};
  double comfort_min_accel{-4.0};
  double comfort_max_lateral_accel{3.0};

  /// min(max_curvature, tan(max_steering_angle) / wheelbase).
  double curvature_cap() const;
  /// Copy with jerk, acceleration and lateral-acceleration bounds replaced by the comfort values.
  KinematicLimits comfort() const;
  /// Throws std::invalid_argument when a bound is non-positive or comfort is looser than hard.
  void validate() const;
  bool operator==(const KinematicLimits &) const = default;
};

struct Control
{
  double j{0.0};
  double k{0.0};
  bool operator==(const Control &) const = default;
};

struct ControlSequence
{
  std::vector<Control> controls;
  double dt{0.1};

  std::size_t size() const { return controls.size(); }
  bool operator==(const ControlSequence &) const = default;
};

/// One explicit Euler step of the unicycle model. The output records (j, k); speed floors at 0.
TrajState step(const TrajState & s, double j, double k, double dt);

/// Per-step clipping against `limits`, simulated forward from `state`:
/// jerk to +-max_jerk and to the range that keeps the next acceleration inside
/// [min_accel, max_accel]; curvature to the curvature cap, the lateral-acceleration bound at the
/// next speed, and the curvature-rate / steering-jerk bounds relative to the previous curvature.
/// Idempotent.
ControlSequence clip_controls(
  const ControlSequence & raw, const TrajState & state, const KinematicLimits & limits);

/// T+1 states starting at s0: clip, then step.
Trajectory rollout(const TrajState & s0, const ControlSequence & controls, const KinematicLimits & limits);

/// Recovers v, a, k, j from a uniformly timed pose sequence. Conventions match `step`: v and a
/// are forward differences, k and j are recorded on the state they lead into.
/// Throws std::invalid_argument on fewer than 4 poses or non-uniform timestamps.
Trajectory derive_profile(std::span<const Pose2> poses, std::span<const double> times);
Trajectory derive_profile(std::span<const Pose2> poses, double dt);

/// Rollout with enough bookkeeping to back-propagate through clipping and integration.
class DifferentiableRollout
{
public:
  DifferentiableRollout(const TrajState & s0, const KinematicLimits & limits, double dt);

  /// Forward pass on raw controls; the returned trajectory equals rollout() bit for bit.
  const Trajectory & forward(std::span<const double> raw_j, std::span<const double> raw_k);

  /// Given dL/d(state t) for t = 1..T (x, y, theta, recorded k, recorded j), returns dL/d raw
  /// jerk and dL/d raw curvature. Adjoint arrays are indexed by step (size T).
  void backward(
    std::span<const double> g_x, std::span<const double> g_y, std::span<const double> g_theta,
    std::span<const double> g_k, std::span<const double> g_j, std::span<double> d_raw_j,
    std::span<double> d_raw_k) const;

  const Trajectory & trajectory() const { return traj_; }

private:
  enum class JerkCase : unsigned char { kFree, kSaturated, kAccelLow, kAccelHigh };
  enum class CurvCase : unsigned char {
    kFree,
    kCap,
    kLateral,
    kRateFixed,
    kRateSteer,
  };

  struct StepRecord
  {
    JerkCase jerk_case{JerkCase::kFree};
    CurvCase curv_case{CurvCase::kFree};
    double curv_sign{0.0};  // side of the active curvature bound
    bool speed_floored{false};
    double next_v{0.0};
  };

  TrajState s0_;
  KinematicLimits limits_;
  double dt_;
  Trajectory traj_;
  std::vector<StepRecord> records_;
};

}  // namespace hybridplan::kinematics

#endif  // HYBRIDPLAN__KINEMATICS_HPP_
