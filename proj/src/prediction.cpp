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


#include "hybridplan/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridplan::prediction
{

const char * to_string(Mode m)
{
  return m == Mode::kLogReplay ? "log-replay" : "constant-velocity";
}

Mode mode_from_string(const std::string & s)
{
  if (s == "constant-velocity") return Mode::kConstantVelocity;
  if (s == "log-replay") return Mode::kLogReplay;
  throw ParseError("unknown prediction mode '" + s + "'");
}

namespace
{

PredictedState sample_log(const AgentTrack & a, double t)
{
  const auto & ts = a.times;
  const auto it = std::lower_bound(ts.begin(), ts.end(), t - 1e-9);
  if (it == ts.end()) {
    return {t, a.poses.back(), a.speeds.back()};
  }
  const std::size_t i = static_cast<std::size_t>(it - ts.begin());
  if (std::abs(ts[i] - t) <= 1e-9 || i == 0) {
    return {t, a.poses[i], a.speeds[i]};
  }
  const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
  const Pose2 & p0 = a.poses[i - 1];
  const Pose2 & p1 = a.poses[i];
  Pose2 p{
    p0.x + w * (p1.x - p0.x), p0.y + w * (p1.y - p0.y),
    normalize_angle(p0.theta + w * angle_diff(p1.theta, p0.theta))};
  return {t, p, a.speeds[i - 1] + w * (a.speeds[i] - a.speeds[i - 1])};
}

}  // namespace

PredictionSet predict(
  const std::vector<AgentTrack> & agents, double now, double horizon, double dt, Mode mode)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("prediction dt must be positive");
  }
  if (horizon < 0.0) {
    throw std::invalid_argument("prediction horizon must be non-negative");
  }
  const double ratio = horizon / dt;
  const long n = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(n)) > 1e-6) {
    throw std::invalid_argument("prediction horizon must be a multiple of dt");
  }

  PredictionSet out;
  out.now = now;
  out.horizon = horizon;
  out.dt = dt;
  out.agents.reserve(agents.size());
  for (const auto & a : agents) {
    AgentPrediction p;
    p.id = a.id;
    p.type = a.type;
    p.length = a.length;
    p.width = a.width;
    p.lane_id = a.lane_id;
    p.states.reserve(static_cast<std::size_t>(n));
    const auto idx = a.index_at_or_before(now);
    for (long k = 1; k <= n; ++k) {
      const double t = now + static_cast<double>(k) * dt;
      if (a.poses.empty()) {
        p.states.push_back({t, Pose2{}, 0.0});
      } else if (!idx) {
        p.states.push_back({t, a.poses.front(), 0.0});
      } else if (mode == Mode::kLogReplay) {
        p.states.push_back(sample_log(a, t));
      } else {
        const Pose2 & p0 = a.poses[*idx];
        const double v = a.speeds[*idx];
        const double dist = v * static_cast<double>(k) * dt;
        p.states.push_back(
          {t, Pose2{p0.x + std::cos(p0.theta) * dist, p0.y + std::sin(p0.theta) * dist, p0.theta},
           v});
      }
    }
    out.agents.push_back(std::move(p));
  }
  return out;
}

}  // namespace hybridplan::prediction
