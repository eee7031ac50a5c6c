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


#ifndef HYBRIDPLAN__SIMULATOR_HPP_
#define HYBRIDPLAN__SIMULATOR_HPP_

#include "hybridplan/core_types.hpp"
#include "hybridplan/fallback.hpp"
#include "hybridplan/features.hpp"
#include "hybridplan/network.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hybridplan::sim
{

/// Anything that maps a frame to a planned trajectory whose state 0 is the ego state.
class Planner
{
public:
  virtual ~Planner() = default;
  /// Number of control steps the planner emits.
  virtual int steps() const = 0;
  virtual double dt() const = 0;
  /// `noise` (optional) perturbs the raw controls.
  virtual Trajectory plan(const SceneFrame & frame, const policy::ControlNoise * noise) const = 0;
};

/// The learned policy.
class NetworkPlanner : public Planner
{
public:
  NetworkPlanner(
    policy::PolicyParams params, policy::EncoderConfig encoder, kinematics::KinematicLimits limits);
  int steps() const override { return params_.shape().steps; }
  double dt() const override { return params_.shape().dt; }
  Trajectory plan(const SceneFrame & frame, const policy::ControlNoise * noise) const override;

private:
  policy::PolicyParams params_;
  policy::EncoderConfig encoder_;
  kinematics::KinematicLimits limits_;
};

struct IdmParams
{
  double max_accel{1.5};   // m/s^2
  double comfort_decel{2.0};  // m/s^2
  double standstill_gap{2.0};  // m
  double time_headway{1.2};  // s
  double exponent{4.0};
  double corridor_margin{0.3};  // m, lateral slack when deciding what is in an agent's path
  double catch_up_gain{0.5};    // 1/s, extra desired speed per meter behind the log
  double max_catch_up{2.0};     // m/s
  bool operator==(const IdmParams &) const = default;
};

struct EventThresholds
{
  double collision_distance{0.05};  // m
  double close_call_distance{0.25};  // m
  double ttc{1.5};                   // s
  double headway{1.0};               // s
  double headway_min_speed{0.5};     // m/s
  double path_margin{0.3};           // m
  double jerk{-5.0};                 // m/s^3
  double passiveness_speed{-5.0};    // m/s, simulated minus logged
  double off_road{10.0};             // m from the route centerline
  bool operator==(const EventThresholds &) const = default;
};

struct SimConfig
{
  fallback::FallbackConfig fallback;
  bool fallback_enabled{true};
  std::size_t history_ticks{10};
  bool reactive_agents{true};
  IdmParams idm;
  EventThresholds events;
  double noise_j{0.0};  // m/s^3, std of additive raw jerk noise
  double noise_k{0.0};  // 1/m, std of additive raw curvature noise
  std::uint64_t seed{0};
  bool record_decisions{true};
  std::vector<double> ade_horizons{1.0, 2.0, 3.0, 4.0};  // s
  std::size_t ade_stride{10};  // ticks between open-loop samples

  /// Throws std::invalid_argument on negative noise or invalid fallback settings.
  void validate() const;
};

enum class EventKind { kCollision, kCloseCall, kDiscomfortBraking, kPassiveness, kOffRoad };
inline constexpr std::size_t kNumEventKinds = 5;
const char * to_string(EventKind k);

struct EventRecord
{
  EventKind kind{EventKind::kCollision};
  std::string scene_id;
  std::size_t tick{0};
  double measured{0.0};
  bool operator==(const EventRecord &) const = default;
};

/// One traced agent state.
struct AgentSnapshot
{
  int id{0};
  OrientedBox box;
  double v{0.0};
  bool operator==(const AgentSnapshot &) const = default;
};

/// Closed-loop rollout of one scene; entry 0 of every per-tick vector is the initial state.
struct SimTrace
{
  std::string scene_id;
  double dt{0.1};
  std::vector<TrajState> ego;
  std::vector<std::vector<AgentSnapshot>> agents;
  std::vector<fallback::Source> sources;  // per executed tick, size ego.size() - 1
  bool operator==(const SimTrace &) const = default;
};

/// Open-loop ADE accumulator.
struct AdeTable
{
  std::vector<double> horizons;
  std::vector<double> sums;
  std::size_t samples{0};
  std::vector<double> values() const;
};

struct SceneResult
{
  std::string scene_id;
  SimTrace trace;
  std::vector<EventRecord> events;
  double meters{0.0};
  std::size_t ticks{0};
  std::size_t ml_ticks{0};
  std::size_t candidate_ticks{0};
  std::size_t emergency_ticks{0};
  std::array<std::size_t, fallback::kNumCauses> triggers{};
  std::vector<std::string> decision_log;
  AdeTable ade;
  bool aborted{false};
  std::string abort_reason;
};

/// Agent that keeps its logged path and adapts only its progress along it.
class ReactiveAgent
{
public:
  ReactiveAgent(const AgentTrack & log, double t0);

  /// Advances to `t + dt` given the ego body and the other agents' current boxes.
  void advance(
    double t, double dt, const OrientedBox & ego_box, double ego_v,
    const std::vector<AgentSnapshot> & others, const IdmParams & idm);

  AgentSnapshot snapshot() const;
  Pose2 pose() const;
  double speed() const { return v_; }
  double s() const { return s_; }
  const AgentTrack & log() const { return *log_; }

private:
  double logged_s(double t) const;
  double logged_v(double t) const;

  const AgentTrack * log_;
  std::optional<Polyline> path_;
  std::vector<double> sample_s_;
  double s_{0.0};
  double v_{0.0};
  double t_{0.0};
};

/// Runs one scene for its full duration. Planner exceptions abort the scene.
SceneResult run_scene(
  const Scene & scene, const Planner & planner, const SimConfig & cfg);

/// Binary events over a finished trace; each kind fires at most once, at its first tick.
/// Close calls are dropped when the scene has a collision.
std::vector<EventRecord> detect_events(
  const SimTrace & trace, const Scene & scene, const EventThresholds & thresholds);

/// Scenes evaluated on `workers` threads; results in scene order.
std::vector<SceneResult> run_suite(
  const std::vector<std::shared_ptr<const Scene>> & scenes, const Planner & planner,
  const SimConfig & cfg, int workers);

/// `tick,x,y,theta,v,a,k,j,source` rows.
std::string trace_csv(const SimTrace & trace);

}  // namespace hybridplan::sim

#endif  // HYBRIDPLAN__SIMULATOR_HPP_
