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
#include "test_util.hpp"

#include <doctest.h>

using namespace hybridplan;
using prediction::Mode;

TEST_CASE("static agent stays put")
{
  const auto a = testing::constant_track(1, {5, 2, 0.4}, 0.0, 30);
  const auto set = prediction::predict({a}, 1.0, 2.0, 0.1, Mode::kConstantVelocity);
  REQUIRE(set.agents.size() == 1);
  REQUIRE(set.agents[0].states.size() == 20);
  for (const auto & s : set.agents[0].states) {
    CHECK(s.pose == Pose2{5, 2, 0.4});
    CHECK(s.v == 0.0);
  }
}

TEST_CASE("constant velocity extrapolation")
{
  const auto a = testing::constant_track(1, {0, 0, 0}, 1.0, 0);
  const auto set = prediction::predict({a}, 0.0, 1.0, 0.1, Mode::kConstantVelocity);
  const auto & st = set.agents[0].states;
  REQUIRE(st.size() == 10);
  for (std::size_t k = 0; k < st.size(); ++k) {
    CHECK(st[k].pose.x == doctest::Approx(0.1 * static_cast<double>(k + 1)));
    CHECK(st[k].t == doctest::Approx(0.1 * static_cast<double>(k + 1)));
  }
}

TEST_CASE("zero horizon yields empty lists")
{
  const auto a = testing::constant_track(1, {0, 0, 0}, 1.0, 10);
  const auto set = prediction::predict({a}, 0.5, 0.0, 0.1, Mode::kConstantVelocity);
  REQUIRE(set.agents.size() == 1);
  CHECK(set.agents[0].states.empty());
  CHECK(set.steps() == 0);
}

TEST_CASE("log replay follows the logged future")
{
  auto a = testing::constant_track(3, {0, 0, 0}, 2.0, 50);
  // Decelerating log: the constant-velocity forecast overshoots it.
  for (std::size_t i = 0; i < a.poses.size(); ++i) {
    const double t = a.times[i];
    a.poses[i].x = 2.0 * t - 0.25 * t * t;
    a.speeds[i] = 2.0 - 0.5 * t;
  }
  const auto replay = prediction::predict({a}, 1.0, 2.0, 0.1, Mode::kLogReplay);
  const auto cv = prediction::predict({a}, 1.0, 2.0, 0.1, Mode::kConstantVelocity);
  const auto & r = replay.agents[0].states.back();
  CHECK(r.pose.x == doctest::Approx(2.0 * 3.0 - 0.25 * 9.0));
  CHECK(cv.agents[0].states.back().pose.x > r.pose.x);

  // Beyond the log end the last pose is held.
  const auto late = prediction::predict({a}, 4.5, 2.0, 0.1, Mode::kLogReplay);
  CHECK(late.agents[0].states.back().pose.x == doctest::Approx(a.poses.back().x));
}

TEST_CASE("agent without history holds its first pose")
{
  AgentTrack a = testing::constant_track(4, {10, 1, 0}, 3.0, 20);
  for (auto & t : a.times) t += 5.0;
  const auto set = prediction::predict({a}, 1.0, 1.0, 0.1, Mode::kConstantVelocity);
  for (const auto & s : set.agents[0].states) {
    CHECK(s.pose == a.poses.front());
    CHECK(s.v == 0.0);
  }
}

TEST_CASE("prediction argument errors")
{
  CHECK_THROWS_AS(prediction::predict({}, 0.0, -1.0, 0.1, Mode::kConstantVelocity), std::invalid_argument);
  CHECK_THROWS_AS(prediction::predict({}, 0.0, 0.25, 0.1, Mode::kConstantVelocity), std::invalid_argument);
  CHECK(prediction::mode_from_string("log-replay") == Mode::kLogReplay);
  CHECK_THROWS_AS(prediction::mode_from_string("magic"), ParseError);
}
