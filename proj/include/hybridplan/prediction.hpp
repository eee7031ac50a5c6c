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


#ifndef HYBRIDPLAN__PREDICTION_HPP_
#define HYBRIDPLAN__PREDICTION_HPP_

#include "hybridplan/core_types.hpp"

#include <map>
#include <string>
#include <vector>

namespace hybridplan::prediction
{

enum class Mode { kConstantVelocity, kLogReplay };

const char * to_string(Mode m);
/// Accepts "constant-velocity" and "log-replay"; throws ParseError otherwise.
Mode mode_from_string(const std::string & s);

struct PredictedState
{
  double t{0.0};
  Pose2 pose;  // box center
  double v{0.0};
};

struct AgentPrediction
{
  int id{0};
  AgentType type{AgentType::kVehicle};
  double length{0.0};
  double width{0.0};
  int lane_id{-1};
  /// Entry k sits at now + (k + 1) * dt.
  std::vector<PredictedState> states;

  OrientedBox box(std::size_t k) const { return {states[k].pose.position(), states[k].pose.theta, length, width}; }
};

struct PredictionSet
{
  double now{0.0};
  double horizon{0.0};
  double dt{0.1};
  std::vector<AgentPrediction> agents;

  std::size_t steps() const { return agents.empty() ? 0 : agents.front().states.size(); }
};

/// Forecasts every agent over (now, now + horizon] at spacing dt.
/// Constant velocity extrapolates the latest sample at or before `now`; log replay returns the
/// logged samples (interpolated between log timestamps, held after the log ends).
/// An agent without history at `now` stays at its earliest logged pose with zero speed.
/// Throws std::invalid_argument when horizon is negative or not a multiple of dt.
PredictionSet predict(
  const std::vector<AgentTrack> & agents, double now, double horizon, double dt, Mode mode);

}  // namespace hybridplan::prediction

#endif  // HYBRIDPLAN__PREDICTION_HPP_
