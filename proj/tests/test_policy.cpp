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
#include "hybridplan/network.hpp"
#include "hybridplan/scenario.hpp"
#include "hybridplan/training.hpp"
#include "properties.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace hybridplan;
using policy::LossWeights;
using policy::NetworkShape;
using policy::PolicyParams;

namespace
{

std::filesystem::path temp_file(const std::string & name)
{
  return std::filesystem::temp_directory_path() / ("hybridplan_test_" + name);
}

std::vector<std::shared_ptr<const Scene>> small_suite(std::uint64_t seed, int per_template)
{
  scenario::ScenarioConfig cfg;
  cfg.counts.fill(per_template);
  cfg.seed = seed;
  std::vector<std::shared_ptr<const Scene>> out;
  for (auto & s : scenario::generate_suite(cfg)) out.push_back(std::make_shared<const Scene>(std::move(s)));
  return out;
}

Trajectory local_line(std::size_t steps, double v, double k = 0.0)
{
  Trajectory t;
  for (std::size_t i = 0; i <= steps; ++i) {
    TrajState s;
    s.x = v * 0.1 * static_cast<double>(i);
    s.v = v;
    s.k = i > 0 ? k : 0.0;
    t.states.push_back(s);
  }
  return t;
}

std::vector<Pose2> poses_of(const Trajectory & t)
{
  std::vector<Pose2> out;
  for (std::size_t i = 1; i < t.size(); ++i) out.push_back(t[i].pose());
  return out;
}

}  // namespace

TEST_CASE("zero network drives straight at constant speed")
{
  NetworkShape shape;
  shape.hidden = 16;
  const PolicyParams zero(shape);
  SceneFrame f;
  f.ego.x = 4.0;
  f.ego.y = 2.0;
  f.ego.theta = 0.3;
  f.ego.v = 7.0;
  f.ego_history = {f.ego};
  const auto out = policy::forward(zero, policy::encode_scene(f), f.ego, kinematics::KinematicLimits{});
  REQUIRE(out.world.size() == static_cast<std::size_t>(shape.steps) + 1);
  CHECK(out.world.dt == shape.dt);
  for (const auto & c : out.raw.controls) {
    CHECK(c.j == 0.0);
    CHECK(c.k == 0.0);
  }
  for (std::size_t i = 0; i < out.world.size(); ++i) {
    const double d = f.ego.v * 0.1 * static_cast<double>(i);
    CHECK(out.world[i].x == doctest::Approx(4.0 + d * std::cos(0.3)));
    CHECK(out.world[i].y == doctest::Approx(2.0 + d * std::sin(0.3)));
    CHECK(out.world[i].v == doctest::Approx(7.0));
  }
  CHECK(out.world[0].x == f.ego.x);
}

TEST_CASE("forward output is dynamically feasible for random weights")
{
  const auto suite = small_suite(8, 1);
  NetworkShape shape;
  shape.hidden = 8;
  const kinematics::KinematicLimits lim;
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto p = PolicyParams::random(shape, static_cast<std::uint64_t>(trial));
    p.values() *= 1.0 + static_cast<double>(trial % 7) * 5.0;  // push raw controls past the limits
    const Scene & sc = *suite[static_cast<std::size_t>(trial) % suite.size()];
    const auto frame = policy::frame_at(sc, static_cast<std::size_t>(20 + trial % 150), 10, false);
    const auto out = policy::forward(p, policy::encode_scene(frame), frame.ego, lim);
    checked += fallback::check_dynamics(out.local, lim, 1).feasible();
  }
  CHECK(checked == 1000);
}

TEST_CASE("imitation loss evaluations")
{
  const auto line = local_line(3, 2.0);
  CHECK(policy::imitation_loss(line, poses_of(line), LossWeights{0.0, 0.0, 1.0}) == 0.0);

  auto one = local_line(1, 0.0);
  std::vector<Pose2> target{{-1.0, 0.0, 0.0}};
  CHECK(policy::imitation_loss(one, target, LossWeights{0.0, 0.0, 1.0}) == doctest::Approx(1.0));

  const auto curved = local_line(2, 0.0, 0.1);
  CHECK(policy::imitation_loss(curved, poses_of(curved), LossWeights{1.0, 0.0, 1.0}) == doctest::Approx(0.2));

  CHECK_THROWS_AS(policy::imitation_loss(line, {}, LossWeights{}), std::invalid_argument);
}

TEST_CASE("perturbation")
{
  const auto suite = small_suite(2, 1);
  policy::DatasetConfig dc;
  const auto samples = policy::build_dataset(suite, dc);
  REQUIRE_FALSE(samples.empty());
  const auto & s = samples[3];

  const auto same = policy::shift_sample(s, 0.0, 0.0);
  CHECK(same.targets == s.targets);
  CHECK(same.frame.ego == s.frame.ego);

  const auto shifted = policy::shift_sample(s, 0.5, 0.0);
  for (std::size_t i = 0; i < s.targets.size(); ++i) {
    CHECK(shifted.targets[i].y == doctest::Approx(s.targets[i].y - 0.5));
    CHECK(shifted.targets[i].x == doctest::Approx(s.targets[i].x));
  }

  policy::PerturbationConfig off;
  off.probability = 0.0;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto p = policy::perturb_sample(s, off, rng);
    CHECK(p.targets == s.targets);
    CHECK(p.frame.ego == s.frame.ego);
  }
}

TEST_CASE("zero loss at rest has zero gradient")
{
  NetworkShape shape;
  shape.hidden = 8;
  shape.steps = 5;
  const PolicyParams zero(shape);
  SceneFrame f;
  f.ego.v = 3.0;
  f.ego_history = {f.ego};
  const auto el = policy::encode_scene(f);
  const auto out = policy::forward(zero, el, f.ego, kinematics::KinematicLimits{});
  Eigen::VectorXd g = Eigen::VectorXd::Zero(zero.size());
  const double loss = policy::loss_and_gradient(zero, el, f.ego, poses_of(out.local), LossWeights{}, {}, &g);
  CHECK(loss == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic gradient matches finite differences")
{
  const auto res = testing::gradient_property(2);
  CHECK_MESSAGE(res.pass(), res.detail);
}

TEST_CASE("batch gradient is a mean")
{
  const auto suite = small_suite(4, 1);
  policy::DatasetConfig dc;
  dc.steps = 10;
  const auto samples = policy::build_dataset(suite, dc);
  policy::TrainingConfig cfg;
  cfg.shape.hidden = 8;
  cfg.shape.steps = 10;
  const auto p = PolicyParams::random(cfg.shape, 3);
  std::vector<const policy::TrainingSample *> batch{&samples[0], &samples[5], &samples[9]};
  std::vector<const policy::TrainingSample *> doubled = batch;
  doubled.insert(doubled.end(), batch.begin(), batch.end());
  Eigen::VectorXd g1 = Eigen::VectorXd::Zero(p.size()), g2 = Eigen::VectorXd::Zero(p.size());
  const double l1 = policy::batch_loss(p, batch, cfg, {}, &g1);
  const double l2 = policy::batch_loss(p, doubled, cfg, {}, &g2);
  CHECK(l1 == doctest::Approx(l2));
  CHECK((g1 - g2).cwiseAbs().maxCoeff() < 1e-12);

  cfg.workers = 3;
  Eigen::VectorXd g3 = Eigen::VectorXd::Zero(p.size());
  CHECK(policy::batch_loss(p, batch, cfg, {}, &g3) == l1);
  CHECK(g3 == g1);
}

TEST_CASE("training overfits one sample and is deterministic")
{
  const auto suite = small_suite(5, 1);
  policy::DatasetConfig dc;
  dc.steps = 20;
  const auto all = policy::build_dataset(suite, dc);
  const std::vector<policy::TrainingSample> one{all[7]};
  policy::TrainingConfig cfg;
  cfg.shape.hidden = 16;
  cfg.shape.steps = 20;
  cfg.epochs = 200;
  cfg.batch_size = 1;
  cfg.perturbation.probability = 0.0;
  cfg.seed = 9;
  const auto r = policy::train(one, cfg);
  REQUIRE(r.epoch_loss.size() == 200);
  CHECK(r.epoch_loss.back() < 0.1 * r.epoch_loss.front());

  cfg.epochs = 5;
  const std::vector<policy::TrainingSample> few(all.begin(), all.begin() + 12);
  const auto a = policy::train(few, cfg);
  cfg.workers = 2;
  const auto b = policy::train(few, cfg);
  CHECK(a.epoch_loss == b.epoch_loss);
  CHECK(a.params == b.params);
}

TEST_CASE("jerk penalty reduces planned jerk")
{
  const auto train_set = policy::build_dataset(small_suite(6, 2), policy::DatasetConfig{20, 10, 10, 0});
  const auto held_out = policy::build_dataset(small_suite(7, 1), policy::DatasetConfig{20, 10, 10, 0});
  policy::TrainingConfig cfg;
  cfg.shape.hidden = 16;
  cfg.shape.steps = 20;
  cfg.epochs = 6;
  cfg.seed = 2;
  auto mean_jerk = [&](const PolicyParams & p) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto & s : held_out) {
      const auto out = policy::forward(p, policy::encode_scene(s.frame), s.frame.ego, {});
      for (std::size_t i = 1; i < out.local.size(); ++i, ++n) sum += std::abs(out.local[i].j);
    }
    return sum / static_cast<double>(n);
  };
  cfg.loss.alpha = 0.0;
  cfg.loss.beta = 0.0;
  const double free = mean_jerk(policy::train(train_set, cfg).params);
  cfg.loss.beta = 2.0;
  const double penalized = mean_jerk(policy::train(train_set, cfg).params);
  CHECK(penalized < free);
}

TEST_CASE("ADE of perfect and offset predictions")
{
  const auto suite = small_suite(3, 1);
  policy::DatasetConfig dc;
  auto samples = policy::build_dataset(suite, dc);
  samples.resize(10);
  NetworkShape shape;
  shape.hidden = 8;
  const auto p = PolicyParams::random(shape, 1);
  const std::vector<double> horizons{1.0, 2.0, 3.0, 4.0};
  auto offset = samples;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto out = policy::forward(p, policy::encode_scene(samples[i].frame), samples[i].frame.ego, {});
    samples[i].targets = poses_of(out.local);
    offset[i].targets = samples[i].targets;
    for (auto & t : offset[i].targets) {
      t.x -= std::sin(t.theta);
      t.y += std::cos(t.theta);
    }
  }
  for (const double a : policy::evaluate_ade(p, samples, horizons)) CHECK(a == doctest::Approx(0.0));
  for (const double a : policy::evaluate_ade(p, offset, horizons)) CHECK(a == doctest::Approx(1.0));
  CHECK_THROWS_AS(policy::evaluate_ade(p, samples, {5.0}), std::invalid_argument);
}

TEST_CASE("subsets are nested")
{
  const auto samples = policy::build_dataset(small_suite(1, 1), policy::DatasetConfig{});
  const auto small = policy::subset(samples, 0.1, 4);
  const auto large = policy::subset(samples, 0.5, 4);
  REQUIRE(small.size() == static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(samples.size()))));
  for (std::size_t i = 0; i < small.size(); ++i) {
    CHECK(small[i].scene == large[i].scene);
    CHECK(small[i].tick == large[i].tick);
  }
  CHECK(policy::subset(samples, 1.0, 4).size() == samples.size());
}

TEST_CASE("weights round trip and malformed files")
{
  NetworkShape shape;
  shape.hidden = 8;
  shape.steps = 12;
  const auto p = PolicyParams::random(shape, 77);
  const auto path = temp_file("weights.bin");
  p.save(path);
  CHECK(PolicyParams::load(path) == p);

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto cut = temp_file("weights_cut.bin");
  {
    std::ofstream out(cut, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(PolicyParams::load(cut), ParseError);

  std::string bad_version = bytes;
  bad_version[4] = 99;
  const auto ver = temp_file("weights_ver.bin");
  {
    std::ofstream out(ver, std::ios::binary);
    out.write(bad_version.data(), static_cast<std::streamsize>(bad_version.size()));
  }
  CHECK_THROWS_AS(PolicyParams::load(ver), VersionError);
  CHECK_THROWS_AS(PolicyParams::load(temp_file("missing.bin")), IoError);
  std::filesystem::remove(path);
  std::filesystem::remove(cut);
  std::filesystem::remove(ver);
}
