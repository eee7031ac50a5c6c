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


#include "hybridplan/features.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace hybridplan;

namespace
{

SceneFrame bare_frame()
{
  SceneFrame f;
  f.ego.x = 3.0;
  f.ego.y = -1.0;
  f.ego.theta = 0.25;
  f.ego.v = 5.0;
  f.ego_history = {f.ego};
  return f;
}

}  // namespace

TEST_CASE("empty frame encodes only the ego history")
{
  const auto el = policy::encode_scene(bare_frame());
  REQUIRE(el.size() == 1);
  CHECK(el[0].kind == policy::ElementKind::kEgo);
  const auto & last = el[0].rows.row(el[0].rows.rows() - 1);
  CHECK(last(0) == doctest::Approx(0.0));
  CHECK(last(1) == doctest::Approx(0.0));
  CHECK(last(2) == doctest::Approx(1.0));
}

TEST_CASE("agent cap keeps the nearest agents")
{
  SceneFrame f = bare_frame();
  f.ego = TrajState{};
  f.ego_history = {f.ego};
  const double xs[] = {40.0, 5.0, 25.0, 10.0, 60.0};
  for (int i = 0; i < 5; ++i) {
    f.agents.push_back(testing::constant_track(i + 1, {xs[i], 0.0, 0.0}, 0.0, 0));
  }
  policy::EncoderConfig cfg;
  cfg.max_agents = 3;
  const auto el = policy::encode_scene(f, cfg);
  std::vector<int> ids;
  for (const auto & e : el) {
    if (e.kind == policy::ElementKind::kAgent) ids.push_back(e.id);
  }
  CHECK(ids == std::vector<int>{2, 4, 3});
}

TEST_CASE("features are invariant to a world translation")
{
  Scene scene = testing::straight_scene("t", 8.0, 100);
  scene.agents.push_back(testing::constant_track(7, {30.0, 0.0, 0.0}, 6.0, 100));
  scene.agents.push_back(testing::constant_track(8, {60.0, 3.5, kPi}, 5.0, 100));
  const SceneFrame f = policy::frame_at(scene, 40, 10, false);
  const auto base = policy::encode_scene(f);

  Scene moved = scene;
  const Vec2 d{10.0, 5.0};
  MapModel m;
  for (const auto & lane : scene.map.lanes) {
    std::vector<Vec2> pts;
    for (const auto & p : lane.centerline.points()) pts.push_back(p + d);
    m.lanes.push_back({lane.id, Polyline(pts), lane.width, lane.successors});
  }
  m.route = scene.map.route;
  {
    std::vector<Vec2> pts;
    for (const auto & p : scene.map.route_centerline.points()) pts.push_back(p + d);
    m.route_centerline = Polyline(pts);
    std::vector<Vec2> poly;
    for (const auto & p : scene.map.drivable[0].vertices()) poly.push_back(p + d);
    m.drivable.emplace_back(poly);
  }
  m.finalize();
  moved.map = m;
  for (auto & s : moved.ego_states) {
    s.x += d.x;
    s.y += d.y;
  }
  for (auto & a : moved.agents) {
    for (auto & p : a.poses) {
      p.x += d.x;
      p.y += d.y;
    }
  }
  const auto shifted = policy::encode_scene(policy::frame_at(moved, 40, 10, false));
  REQUIRE(shifted.size() == base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(shifted[i].kind == base[i].kind);
    CHECK(shifted[i].id == base[i].id);
    REQUIRE(shifted[i].rows.rows() == base[i].rows.rows());
    CHECK((shifted[i].rows - base[i].rows).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("frame_at pads history and cuts the future")
{
  Scene scene = testing::straight_scene("f", 5.0, 50);
  scene.agents.push_back(testing::constant_track(1, {20.0, 0.0, 0.0}, 4.0, 50));
  const SceneFrame f = policy::frame_at(scene, 3, 10, false);
  CHECK(f.ego_history.size() == 11);
  CHECK(f.ego_history.front() == scene.ego_states.front());
  CHECK(f.ego == scene.ego_states[3]);
  CHECK(f.agents[0].times.back() <= f.timestamp + 1e-12);
  const SceneFrame g = policy::frame_at(scene, 3, 10, true);
  CHECK(g.agents[0].times.size() == scene.agents[0].times.size());
}
