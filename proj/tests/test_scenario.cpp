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
#include "hybridplan/scenario.hpp"
#include "hybridplan/scene_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace hybridplan;

namespace
{

std::filesystem::path temp_dir(const std::string & name)
{
  const auto p = std::filesystem::temp_directory_path() / ("hybridplan_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

scenario::ScenarioConfig every_template(int n, std::uint64_t seed)
{
  scenario::ScenarioConfig c;
  c.counts.fill(n);
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("suite shape")
{
  scenario::ScenarioConfig c;
  c.counts[static_cast<std::size_t>(scenario::Template::kStraightFollow)] = 10;
  const auto suite = scenario::generate_suite(c);
  REQUIRE(suite.size() == 10);
  for (const auto & s : suite) {
    CHECK(s.ego_states.size() == 251);
    CHECK(s.duration() == doctest::Approx(25.0));
    CHECK(s.dt == 0.1);
  }
}

TEST_CASE("same seed gives identical suites for any worker count")
{
  const auto a = scenario::generate_suite(every_template(2, 7), 1);
  const auto b = scenario::generate_suite(every_template(2, 7), 3);
  CHECK(a == b);
  std::string ja, jb;
  for (const auto & s : a) ja += scene_io::to_json(s);
  for (const auto & s : b) jb += scene_io::to_json(s);
  CHECK(ja == jb);
  const auto c = scenario::generate_suite(every_template(2, 8), 1);
  CHECK_FALSE(a == c);
}

TEST_CASE("logged ego trajectories are dynamically feasible")
{
  const kinematics::KinematicLimits lim;
  for (const auto & s : scenario::generate_suite(every_template(3, 11))) {
    Trajectory t;
    t.dt = s.dt;
    t.states = s.ego_states;
    const auto r = fallback::check_dynamics(t, lim);
    CHECK_MESSAGE(r.feasible(), s.id);
  }
}

TEST_CASE("scene json round trip")
{
  for (const auto & s : scenario::generate_suite(every_template(1, 12))) {
    const Scene back = scene_io::from_json(scene_io::to_json(s));
    CHECK(back == s);
  }
}

TEST_CASE("suite directory round trip")
{
  const auto dir = temp_dir("suite");
  const auto suite = scenario::generate_suite(every_template(1, 13));
  scene_io::save_suite(suite, dir);
  CHECK(scene_io::load_dir(dir) == suite);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed scene files")
{
  const auto s = scenario::generate_suite(every_template(1, 14)).front();
  const std::string text = scene_io::to_json(s);
  CHECK_THROWS_AS(scene_io::from_json(text.substr(0, text.size() / 2)), ParseError);

  auto pos = text.find("\"version\"");
  REQUIRE(pos != std::string::npos);
  const auto colon = text.find(':', pos);
  const auto end = text.find_first_of(",}", colon);
  const std::string v99 = text.substr(0, colon + 1) + " 99" + text.substr(end);
  CHECK_THROWS_AS(scene_io::from_json(v99), VersionError);

  CHECK_THROWS_AS(scene_io::from_json("{\"version\": 1, \"bogus\": 3}"), ParseError);
  CHECK_THROWS_AS(scene_io::load_scene(temp_dir("missing") / "x.json"), IoError);
}

TEST_CASE("scenario config validation")
{
  scenario::ScenarioConfig c;
  CHECK_NOTHROW(c.validate());
  c.counts[0] = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  scenario::ScenarioConfig r;
  r.ego_speed = {5.0, 2.0};
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  CHECK(scenario::template_from_string(scenario::to_string(scenario::Template::kParkedCarNudge)) ==
        scenario::Template::kParkedCarNudge);
  CHECK_THROWS_AS(scenario::template_from_string("nope"), ParseError);
}

TEST_CASE("templates produce their defining content")
{
  const auto suite = scenario::generate_suite(every_template(1, 15));
  REQUIRE(suite.size() == scenario::kNumTemplates);
  bool any_light = false, any_stop_sign = false, any_ped = false, any_static = false;
  for (const auto & s : suite) {
    for (const auto & l : s.map.stop_lines) {
      any_light |= l.control == StopControl::kLight;
      any_stop_sign |= l.control == StopControl::kStopSign;
    }
    for (const auto & a : s.agents) any_ped |= a.type == AgentType::kPedestrian;
    any_static |= !s.static_obstacles.empty();
    CHECK_FALSE(s.map.route_centerline.empty());
  }
  CHECK(any_light);
  CHECK(any_stop_sign);
  CHECK(any_ped);
  CHECK(any_static);
}
