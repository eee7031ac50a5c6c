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


#include "hybridplan/scenario.hpp"
#include "hybridplan/simulator.hpp"
#include "properties.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace hybridplan;
using sim::EventKind;

namespace
{

/// Keeps speed and heading regardless of the scene.
class StraightPlanner : public sim::Planner
{
public:
  int steps() const override { return 40; }
  double dt() const override { return 0.1; }
  Trajectory plan(const SceneFrame & frame, const policy::ControlNoise *) const override
  {
    kinematics::ControlSequence seq;
    seq.controls.assign(40, {0.0, 0.0});
    TrajState s = frame.ego;
    s.a = 0.0;
    s.j = 0.0;
    s.k = 0.0;
    return kinematics::rollout(s, seq, kinematics::KinematicLimits{});
  }
};

sim::NetworkPlanner zero_planner()
{
  policy::NetworkShape shape;
  shape.hidden = 8;
  return {policy::PolicyParams(shape), {}, {}};
}

bool has(const std::vector<sim::EventRecord> & events, EventKind k)
{
  for (const auto & e : events) {
    if (e.kind == k) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("empty road with a zero network keeps a straight line")
{
  const Scene scene = testing::straight_scene("empty", 10.0, 250);
  sim::SimConfig cfg;
  const auto r = sim::run_scene(scene, zero_planner(), cfg);
  CHECK_FALSE(r.aborted);
  CHECK(r.ticks == 250);
  CHECK(r.trace.ego.size() == 251);
  CHECK(r.trace.sources.size() == 250);
  for (const auto & s : r.trace.ego) {
    CHECK(s.y == doctest::Approx(0.0));
    CHECK(s.v == doctest::Approx(10.0));
  }
  CHECK(r.trace.ego.back().x == doctest::Approx(250.0));
  CHECK(r.meters == doctest::Approx(250.0));
  CHECK(r.events.empty());
  CHECK(r.ml_ticks == 250);
}

TEST_CASE("identical seeds give identical traces")
{
  scenario::ScenarioConfig sc;
  sc.counts.fill(0);
  sc.counts[static_cast<std::size_t>(scenario::Template::kLeadBraking)] = 1;
  sc.seed = 3;
  const Scene scene = scenario::generate_suite(sc).front();
  sim::SimConfig cfg;
  cfg.noise_j = 1.0;
  cfg.noise_k = 0.02;
  cfg.seed = 42;
  policy::NetworkShape shape;
  shape.hidden = 8;
  const sim::NetworkPlanner planner(policy::PolicyParams::random(shape, 5), {}, {});
  const auto a = sim::run_scene(scene, planner, cfg);
  const auto b = sim::run_scene(scene, planner, cfg);
  CHECK(a.trace == b.trace);
  CHECK(a.decision_log == b.decision_log);
  cfg.seed = 43;
  CHECK_FALSE(sim::run_scene(scene, planner, cfg).trace == a.trace);
}

TEST_CASE("reactive agent in free flow follows its logged speed")
{
  const auto log = testing::constant_track(1, {0.0, 0.0, 0.0}, 10.0, 200);
  sim::ReactiveAgent agent(log, 0.0);
  const OrientedBox far_ego{{-500.0, 50.0}, 0.0, 4.5, 1.9};
  for (int i = 0; i < 150; ++i) {
    agent.advance(0.1 * i, 0.1, far_ego, 0.0, {agent.snapshot()}, sim::IdmParams{});
    CHECK(std::abs(agent.speed() - 10.0) <= 0.5);
  }
}

TEST_CASE("reactive agent stops for an ego blocking its path")
{
  const auto log = testing::constant_track(1, {0.0, 0.0, 0.0}, 10.0, 200);
  sim::ReactiveAgent agent(log, 0.0);
  const OrientedBox ego{{22.25, 0.0}, kPi / 2, 4.5, 1.9};
  for (int i = 0; i < 150; ++i) {
    agent.advance(0.1 * i, 0.1, ego, 0.0, {agent.snapshot()}, sim::IdmParams{});
    CHECK_FALSE(boxes_intersect(agent.snapshot().box, ego));
  }
  CHECK(agent.speed() == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(box_distance(agent.snapshot().box, ego) > 0.0);
}

TEST_CASE("reactive agent ignores an ego on a disjoint path")
{
  const auto log = testing::constant_track(1, {0.0, -20.0, 0.0}, 8.0, 200);
  sim::ReactiveAgent agent(log, 0.0);
  const OrientedBox ego{{50.0, 0.0}, 0.0, 4.5, 1.9};
  for (int i = 0; i < 100; ++i) {
    agent.advance(0.1 * i, 0.1, ego, 3.0, {agent.snapshot()}, sim::IdmParams{});
    CHECK(agent.speed() == doctest::Approx(8.0));
  }
}

TEST_CASE("log replay trace has no events")
{
  const Scene scene = testing::straight_scene("log", 10.0, 100);
  sim::SimTrace t;
  t.scene_id = scene.id;
  t.ego = scene.ego_states;
  t.agents.assign(t.ego.size(), {});
  CHECK(sim::detect_events(t, scene, {}).empty());
}

TEST_CASE("close call and discomfort examples")
{
  const Scene scene = testing::straight_scene("near", 10.0, 10);
  sim::SimTrace t;
  t.scene_id = scene.id;
  t.ego = {scene.ego_states[0], scene.ego_states[1]};
  const double cx = t.ego[1].x + scene.ego_size.rear_axle_offset;
  const sim::AgentSnapshot side{1, OrientedBox{{cx, 0.95 + 0.20 + 0.95}, kPi, 4.5, 1.9}, 3.0};
  t.agents = {{side}, {side}};
  auto ev = sim::detect_events(t, scene, {});
  CHECK(has(ev, EventKind::kCloseCall));
  CHECK_FALSE(has(ev, EventKind::kCollision));

  t.agents = {{}, {}};
  t.ego[1].j = -6.0;
  ev = sim::detect_events(t, scene, {});
  CHECK(has(ev, EventKind::kDiscomfortBraking));
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].tick == 1);
}

TEST_CASE("event thresholds just above and just below")
{
  for (const auto & c : testing::event_boundary_cases()) {
    CHECK_MESSAGE(c.expected == c.observed, c.name);
  }
  CHECK(testing::event_boundary_cases().size() == 14);
}

TEST_CASE("collision suppresses close calls in the same scene")
{
  const Scene scene = testing::straight_scene("c", 10.0, 10);
  sim::SimTrace t;
  t.ego = {scene.ego_states[0], scene.ego_states[1], scene.ego_states[2]};
  const double cx = t.ego[1].x + scene.ego_size.rear_axle_offset;
  const sim::AgentSnapshot near{1, OrientedBox{{cx, 2.0}, kPi, 4.5, 1.9}, 0.0};
  const sim::AgentSnapshot hit{1, OrientedBox{{cx + 1.0, 1.5}, kPi, 4.5, 1.9}, 0.0};
  t.agents = {{near}, {near}, {hit}};
  const auto ev = sim::detect_events(t, scene, {});
  CHECK(has(ev, EventKind::kCollision));
  CHECK_FALSE(has(ev, EventKind::kCloseCall));
}

TEST_CASE("fallback is a no-op when the plan is always feasible")
{
  const Scene scene = testing::straight_scene("noop", 8.0, 200);
  sim::SimConfig on, off;
  off.fallback_enabled = false;
  const auto a = sim::run_scene(scene, StraightPlanner{}, on);
  const auto b = sim::run_scene(scene, StraightPlanner{}, off);
  CHECK(a.trace.ego == b.trace.ego);
  CHECK(a.ml_ticks == a.ticks);
}

TEST_CASE("fallback stops a policy that ignores a red light")
{
  Scene scene = testing::straight_scene("red", 10.0, 150);
  scene.map.stop_lines.push_back({1, {60.0, -1.75}, {60.0, 1.75}, 0.0, StopControl::kLight, 7});
  scene.map.lights.push_back({7, 1});
  scene.map.finalize();
  scene.light_schedule = {{0.0, 7, LightState::kRed}};
  auto crossed = [&](const sim::SceneResult & r) {
    for (const auto & s : r.trace.ego) {
      if (footprint(s, scene.ego_size).center.x + 0.5 * scene.ego_size.length > 60.0) return true;
    }
    return false;
  };
  sim::SimConfig on, off;
  off.fallback_enabled = false;
  const auto enabled = sim::run_scene(scene, StraightPlanner{}, on);
  const auto disabled = sim::run_scene(scene, StraightPlanner{}, off);
  CHECK(crossed(disabled));
  CHECK_FALSE(crossed(enabled));
  CHECK(enabled.triggers[static_cast<std::size_t>(fallback::Cause::kRedLight)] > 0);
  std::size_t hist = 0;
  for (const auto n : enabled.triggers) hist += n;
  CHECK(hist == enabled.candidate_ticks + enabled.emergency_ticks);
}

TEST_CASE("suite results are independent of the worker count")
{
  scenario::ScenarioConfig sc;
  sc.counts.fill(1);
  sc.seed = 21;
  std::vector<std::shared_ptr<const Scene>> scenes;
  for (auto & s : scenario::generate_suite(sc)) scenes.push_back(std::make_shared<const Scene>(std::move(s)));
  sim::SimConfig cfg;
  cfg.noise_j = 1.0;
  cfg.noise_k = 0.02;
  policy::NetworkShape shape;
  shape.hidden = 8;
  const sim::NetworkPlanner planner(policy::PolicyParams::random(shape, 2), {}, {});
  const auto one = sim::run_suite(scenes, planner, cfg, 1);
  const auto three = sim::run_suite(scenes, planner, cfg, 3);
  REQUIRE(one.size() == three.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].scene_id == scenes[i]->id);
    CHECK(one[i].trace == three[i].trace);
    CHECK(one[i].events == three[i].events);
  }
}

TEST_CASE("planner failure aborts the scene")
{
  class Throwing : public StraightPlanner
  {
  public:
    Trajectory plan(const SceneFrame & f, const policy::ControlNoise * n) const override
    {
      if (f.timestamp > 1.0) throw std::runtime_error("boom");
      return StraightPlanner::plan(f, n);
    }
  };
  const auto r = sim::run_scene(testing::straight_scene("abort", 5.0, 100), Throwing{}, sim::SimConfig{});
  CHECK(r.aborted);
  CHECK(r.abort_reason == "boom");
  CHECK(r.ticks < 100);
}

TEST_CASE("sim config validation")
{
  sim::SimConfig c;
  CHECK_NOTHROW(c.validate());
  c.noise_j = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
