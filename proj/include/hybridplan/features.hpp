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


#ifndef HYBRIDPLAN__FEATURES_HPP_
#define HYBRIDPLAN__FEATURES_HPP_

#include "hybridplan/core_types.hpp"

#include <Eigen/Core>

#include <vector>

namespace hybridplan::policy
{

enum class ElementKind { kEgo, kAgent, kRoute, kLane, kCrosswalk, kStopLine };

/// Row layout: x/20, y/20, cos, sin, v/10, time offset (s), length/5, width/5, one-hot
/// {ego, vehicle, pedestrian, cyclist, lane, route, crosswalk, stop line}, red, yellow, stop sign.
inline constexpr int kFeatureWidth = 19;

using FeatureRows = Eigen::Matrix<double, Eigen::Dynamic, kFeatureWidth, Eigen::RowMajor>;

struct FeatureElement
{
  ElementKind kind{ElementKind::kEgo};
  int id{0};
  FeatureRows rows;
};

struct EncoderConfig
{
  int history_depth{6};      // rows per history element
  double history_step{0.2};  // s between history rows
  int max_agents{16};
  int max_lanes{32};
  int max_crosswalks{8};
  int max_stop_lines{8};
  double range{80.0};  // m
};

/// Ego history first, then agents and static obstacles nearest first, then map elements grouped
/// by kind (route, lanes, crosswalks, stop lines), nearest first within a kind. Every coordinate is
/// expressed in the frame of the current ego pose.
std::vector<FeatureElement> encode_scene(const SceneFrame & frame, const EncoderConfig & cfg = {});

/// Planner input at `tick` of a logged scene. Ego history is padded with the first state when the
/// scene is younger than `history_ticks`. With `include_future` false, agent tracks are cut at the
/// current time.
SceneFrame frame_at(const Scene & scene, std::size_t tick, std::size_t history_ticks, bool include_future);

}  // namespace hybridplan::policy

#endif  // HYBRIDPLAN__FEATURES_HPP_
