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


#ifndef HYBRIDPLAN__SCENARIO_HPP_
#define HYBRIDPLAN__SCENARIO_HPP_

#include "hybridplan/core_types.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hybridplan::scenario
{

enum class Template {
  kStraightFollow,
  kLeadBraking,
  kSignalizedIntersection,
  kStopSign,
  kPedestrianCrossing,
  kParkedCarNudge,
  kOncomingTraffic,
};
inline constexpr std::size_t kNumTemplates = 7;

const char * to_string(Template t);
/// Throws ParseError on unknown names.
Template template_from_string(const std::string & s);

struct Range
{
  double lo{0.0};
  double hi{0.0};
  bool operator==(const Range &) const = default;
};

struct ScenarioConfig
{
  std::array<int, kNumTemplates> counts{};
  std::uint64_t seed{0};
  double duration{25.0};  // s
  double dt{0.1};         // s
  double lane_width{3.5};  // m
  Range ego_speed{8.0, 14.0};          // m/s
  Range lead_gap{25.0, 45.0};          // m, bumper to bumper
  Range brake_time{6.0, 14.0};         // s
  Range brake_decel{2.5, 4.0};         // m/s^2
  Range road_curvature{-0.004, 0.004};  // 1/m
  Range intersection_distance{90.0, 160.0};  // m ahead of the ego start
  Range red_duration{8.0, 12.0};       // s
  Range pedestrian_speed{1.0, 1.6};    // m/s
  Range parked_distance{70.0, 120.0};  // m ahead of the ego start

  int total() const;
  /// Throws std::invalid_argument on negative counts or inverted/degenerate ranges.
  void validate() const;
  bool operator==(const ScenarioConfig &) const = default;
};

/// Seed for scene `index` derived from the suite seed (splitmix64 mixing).
std::uint64_t scene_seed(std::uint64_t seed, std::uint64_t index);

/// One scene of the given template. `index` is the position in the suite and feeds the seed.
Scene generate_scene(Template t, const ScenarioConfig & cfg, std::size_t index);

/// Scenes in template order, `counts[t]` of each. Identical for any worker count.
std::vector<Scene> generate_suite(const ScenarioConfig & cfg, int workers = 1);

}  // namespace hybridplan::scenario

#endif  // HYBRIDPLAN__SCENARIO_HPP_
