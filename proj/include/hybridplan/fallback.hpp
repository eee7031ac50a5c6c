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


#ifndef HYBRIDPLAN__FALLBACK_HPP_
#define HYBRIDPLAN__FALLBACK_HPP_

#include "hybridplan/core_types.hpp"
#include "hybridplan/kinematics.hpp"
#include "hybridplan/prediction.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hybridplan::fallback
{

enum class Cause {
  kJerk,
  kAccel,
  kCurvature,
  kCurvatureRate,
  kLateralAccel,
  kSteeringJerk,
  kStopSign,
  kRightOfWay,
  kRedLight,
  kOffDrivable,
  kAgentOverlap,
  kStaticOverlap,
  kLaneBoundaryContact,
  kLongitudinalGap,
  kTtc,
  kHeadway,
};
inline constexpr int kNumCauses = 16;

enum class Category { kDynamic, kLegality, kCollision };

const char * to_string(Cause c);
Cause cause_from_string(const std::string & s);
Category category_of(Cause c);
const char * to_string(Category c);

struct Violation
{
  Cause cause{Cause::kJerk};
  std::size_t index{0};
  double measured{0.0};
  double bound{0.0};
  bool operator==(const Violation &) const = default;
};

enum class Label { kFeasible, kInfeasible };

struct ViolationReport
{
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  Label label() const { return feasible() ? Label::kFeasible : Label::kInfeasible; }
  void append(const ViolationReport & o);
  bool has(Cause c) const;
  /// Violation with the smallest state index; among equal indices the earliest recorded.
  std::optional<Violation> primary() const;
};

struct CandidateSpec
{
  std::vector<double> speed_deltas{-6.0, -4.0, -2.0, 0.0, 2.0};  // m/s relative to ego speed
  std::vector<double> time_gaps{1.0, 1.5, 2.0, 3.0};             // s
  double standstill_gap{3.0};                                   // m, bumper to bumper
  double stop_decel{4.0};                                       // m/s^2
  double min_lateral_distance{15.0};                            // m
  double lateral_distance_per_speed{3.0};                       // s
  double max_projection_offset{10.0};                           // m
};

struct FallbackConfig
{
  kinematics::KinematicLimits limits;
  /// Check planned trajectories against the comfort limits rather than the hard ones.
  bool comfort_checks{true};
  double grid_resolution{0.2};    // m
  double min_gap{2.0};            // m
  double ttc_threshold{1.5};      // s
  double headway_threshold{1.0};  // s
  double headway_min_speed{0.5};  // m/s
  double path_margin{0.3};        // m, lateral slack for the in-path test
  double stop_speed{0.1};         // m/s
  double stop_distance{3.0};      // m
  double row_time_buffer{1.0};    // s
  double horizon{4.0};            // s
  double dt{0.1};                 // s
  prediction::Mode prediction_mode{prediction::Mode::kConstantVelocity};
  CandidateSpec candidates;

  kinematics::KinematicLimits check_limits() const { return comfort_checks ? limits.comfort() : limits; }
  std::size_t steps() const;
  /// Throws std::invalid_argument on non-positive thresholds or resolution outside (0, 0.5].
  void validate() const;
};

/// Everything the checks need besides the trajectory.
struct World
{
  const MapModel * map{nullptr};
  VehicleSize ego_size;
  const prediction::PredictionSet * predictions{nullptr};
  std::span<const OrientedBox> static_obstacles;
  LightStates lights;
  /// Stop-sign lines the ego has already stopped at.
  std::vector<int> cleared_stop_lines;
};

/// Per-state dynamic checks from index `first` on. Rate checks compare with the preceding state.
ViolationReport check_dynamics(
  const Trajectory & traj, const kinematics::KinematicLimits & limits, std::size_t first = 0);

/// Red light, stop sign, off-drivable and right-of-way checks over states 1..T.
ViolationReport check_legality(const Trajectory & traj, const World & world, const FallbackConfig & cfg);

/// Raster overlap, lane-boundary contact, and gap / TTC / headway to the lead over states 1..T.
ViolationReport check_collision(const Trajectory & traj, const World & world, const FallbackConfig & cfg);

/// Dynamics (from index 1), legality and collision.
ViolationReport check_all(const Trajectory & traj, const World & world, const FallbackConfig & cfg);

/// Conservative occupancy-grid overlap. Cells of side `resolution` are aligned to the world
/// origin; a cell is occupied by a box when they intersect. True when some cell is occupied by
/// both boxes.
bool raster_overlap(const OrientedBox & a, const OrientedBox & b, double resolution);

struct PathObject
{
  OrientedBox box;
  double v{0.0};  // speed along box heading
};

struct LeadParams
{
  double path_margin{0.3};
  double headway_min_speed{0.5};
};

/// Longitudinal relation to the nearest same-direction object ahead along the route.
struct LeadMetrics
{
  bool has_lead{false};
  std::size_t lead_index{0};
  double ego_s{0.0};
  double lead_s{0.0};
  double lead_v{0.0};
  double gap{std::numeric_limits<double>::infinity()};
  double ttc{std::numeric_limits<double>::infinity()};
  double headway{std::numeric_limits<double>::infinity()};
};

/// Projects the ego body and objects onto the route. An object is in path when its lateral
/// offset is within half the summed widths plus margin and it is ahead; only objects heading
/// within 45 degrees of the route count. gap is bumper to bumper; TTC requires closing speed > 0;
/// headway requires ego speed above headway_min_speed.
LeadMetrics lead_metrics(
  const Polyline & route, const OrientedBox & ego_box, double ego_v,
  std::span<const PathObject> objects, const LeadParams & params);

enum class CandidateKind { kSpeedKeeping, kDistanceKeeping, kEmergencyStop };
const char * to_string(CandidateKind k);

struct Candidate
{
  CandidateKind kind{CandidateKind::kEmergencyStop};
  double parameter{0.0};  // target speed or time gap
  Trajectory traj;
};

/// Lead state used for distance keeping. `s_end` is the bumper gap between the ego body at its
/// current position and the lead at the horizon end, measured along the route.
struct LeadForecast
{
  double s_end{0.0};
  double v_end{0.0};
  double length{4.5};
};

/// Speed keeping, distance keeping (when a lead is given) and an emergency stop, in that order,
/// realized through the kinematic model under the check limits. Lateral motion returns to the
/// route centerline. Without a usable centerline projection only the emergency stop is produced.
std::vector<Candidate> generate_candidates(
  const TrajState & ego, const VehicleSize & ego_size, const Polyline & route,
  const std::optional<LeadForecast> & lead, const FallbackConfig & cfg);

/// Quartic longitudinal plan to a target speed with zero final acceleration at time T.
/// Returns coefficients c0..c4 of s(t).
std::array<double, 5> quartic_speed_plan(double v0, double a0, double v_target, double T);
/// Quintic longitudinal plan to (s_T, v_T, 0) at time T. Returns coefficients c0..c5 of s(t).
std::array<double, 6> quintic_position_plan(double v0, double a0, double s_T, double v_T, double T);

enum class Source { kML, kCandidate, kEmergencyStop };
const char * to_string(Source s);

struct FallbackDecision
{
  Trajectory chosen;
  Source source{Source::kML};
  int candidate_index{-1};
  ViolationReport ml_report;
  std::vector<Candidate> candidates;
  std::vector<ViolationReport> candidate_reports;
  std::vector<double> distances;  // squared position distance to the ML trajectory
};

/// Lead forecast from the world's predictions and static obstacles at the horizon end.
std::optional<LeadForecast> forecast_lead(
  const TrajState & ego, const World & world, const FallbackConfig & cfg);

/// Returns the ML trajectory when it passes every check; otherwise the feasible candidate with the
/// smallest summed squared position distance to it (first in generation order on ties); otherwise
/// the emergency stop.
FallbackDecision select_trajectory(const Trajectory & ml, const World & world, const FallbackConfig & cfg);

/// Summed squared position distance over the common prefix of two trajectories.
double position_distance(const Trajectory & a, const Trajectory & b);

/// One log record: timestamp, source, causes, distance.
std::string decision_log_line(double timestamp, const FallbackDecision & d);

}  // namespace hybridplan::fallback

#endif  // HYBRIDPLAN__FALLBACK_HPP_
