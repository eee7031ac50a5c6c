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


#include "hybridplan/training.hpp"

#include "hybridplan/scenario.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace hybridplan::policy
{

void TrainingConfig::validate() const
{
  if (loss.alpha < 0.0 || loss.beta < 0.0 || loss.theta_weight < 0.0) {
    throw std::invalid_argument("loss weights must be non-negative");
  }
  if (!(perturbation.probability >= 0.0 && perturbation.probability <= 1.0)) {
    throw std::invalid_argument("perturbation probability must be in [0, 1]");
  }
  if (perturbation.max_lateral < 0.0 || perturbation.max_heading < 0.0) {
    throw std::invalid_argument("perturbation magnitudes must be non-negative");
  }
  if (!(learning_rate > 0.0) || batch_size <= 0 || epochs < 0 || workers <= 0) {
    throw std::invalid_argument("learning rate, batch size and workers must be positive");
  }
  if (shape.hidden <= 0 || shape.steps <= 0 || !(shape.dt > 0.0)) {
    throw std::invalid_argument("network shape must be positive");
  }
}

std::vector<TrainingSample> build_dataset(
  const std::vector<std::shared_ptr<const Scene>> & scenes, const DatasetConfig & cfg)
{
  if (cfg.steps <= 0 || cfg.stride == 0) {
    throw std::invalid_argument("dataset steps and stride must be positive");
  }
  const auto T = static_cast<std::size_t>(cfg.steps);
  std::vector<TrainingSample> out;
  for (const auto & scene : scenes) {
    for (std::size_t tick = 0; tick + T < scene->ego_states.size(); tick += cfg.stride) {
      if (cfg.max_samples != 0 && out.size() >= cfg.max_samples) return out;
      TrainingSample s;
      s.scene = scene;
      s.tick = tick;
      s.frame = frame_at(*scene, tick, cfg.history_ticks, false);
      const Pose2 ref = s.frame.ego.pose();
      for (std::size_t t = 1; t <= T; ++t) {
        s.targets.push_back(to_ego_frame(scene->ego_states[tick + t].pose(), ref));
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<TrainingSample> subset(
  const std::vector<TrainingSample> & samples, double fraction, std::uint64_t seed)
{
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("data fraction must be in (0, 1]");
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(samples.size()) - 1e-9));
  std::vector<TrainingSample> out;
  for (std::size_t i = 0; i < std::min(n, order.size()); ++i) out.push_back(samples[order[i]]);
  return out;
}

TrainingSample shift_sample(const TrainingSample & sample, double lateral, double heading)
{
  if (lateral == 0.0 && heading == 0.0) return sample;
  TrainingSample out = sample;
  const Pose2 old_ref = sample.frame.ego.pose();
  const Pose2 new_ref = from_ego_frame({0.0, lateral, heading}, old_ref);
  out.frame.ego.x = new_ref.x;
  out.frame.ego.y = new_ref.y;
  out.frame.ego.theta = new_ref.theta;
  if (!out.frame.ego_history.empty()) out.frame.ego_history.back() = out.frame.ego;
  for (std::size_t t = 0; t < out.targets.size(); ++t) {
    out.targets[t] = to_ego_frame(from_ego_frame(sample.targets[t], old_ref), new_ref);
  }
  return out;
}

TrainingSample perturb_sample(
  const TrainingSample & sample, const PerturbationConfig & cfg, std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  const double lat = (2.0 * unit(rng) - 1.0) * cfg.max_lateral;
  const double head = (2.0 * unit(rng) - 1.0) * cfg.max_heading;
  if (!(u < cfg.probability) || (lat == 0.0 && head == 0.0)) return sample;
  return shift_sample(sample, lat, head);
}

double batch_loss(
  const PolicyParams & params, const std::vector<const TrainingSample *> & batch,
  const TrainingConfig & cfg, const kinematics::KinematicLimits & limits, Eigen::VectorXd * grad)
{
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const double scale = 1.0 / static_cast<double>(batch.size());
  const std::size_t workers =
    std::min<std::size_t>(static_cast<std::size_t>(std::max(1, cfg.workers)), batch.size());
  std::vector<double> losses(batch.size(), 0.0);
  std::vector<Eigen::VectorXd> grads(grad != nullptr ? batch.size() : 0);
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < batch.size(); i += workers) {
      const TrainingSample & s = *batch[i];
      Eigen::VectorXd * g = nullptr;
      if (grad != nullptr) {
        grads[i] = Eigen::VectorXd::Zero(params.size());
        g = &grads[i];
      }
      losses[i] = loss_and_gradient(
        params, encode_scene(s.frame, cfg.encoder), s.frame.ego, s.targets, cfg.loss, limits, g, scale);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto & t : pool) t.join();
  }
  double total = 0.0;
  for (const double l : losses) total += l;
  if (grad != nullptr) {
    grad->setZero(params.size());
    for (const auto & g : grads) *grad += g;
  }
  return total * scale;
}

TrainingResult train(
  const std::vector<TrainingSample> & samples, const TrainingConfig & cfg,
  const kinematics::KinematicLimits & limits)
{
  cfg.validate();
  if (samples.empty()) throw std::invalid_argument("training set is empty");
  for (const auto & s : samples) {
    if (s.targets.size() != static_cast<std::size_t>(cfg.shape.steps)) {
      throw std::invalid_argument("sample target length does not match the network steps");
    }
  }
  TrainingResult result;
  result.params = PolicyParams::random(cfg.shape, cfg.seed);
  Eigen::VectorXd & theta = result.params.values();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd grad(theta.size());
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(scenario::scene_seed(cfg.seed, 0x5348));
  long step = 0;
  const auto B = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += B) {
      const std::size_t end = std::min(order.size(), start + B);
      std::vector<TrainingSample> batch;
      batch.reserve(end - start);
      std::vector<const TrainingSample *> ptrs;
      for (std::size_t i = start; i < end; ++i) {
        std::mt19937_64 rng(scenario::scene_seed(cfg.seed ^ (static_cast<std::uint64_t>(epoch) << 32), order[i]));
        batch.push_back(perturb_sample(samples[order[i]], cfg.perturbation, rng));
      }
      for (const auto & b : batch) ptrs.push_back(&b);
      const double loss = batch_loss(result.params, ptrs, cfg, limits, &grad);
      epoch_total += loss * static_cast<double>(batch.size());
      ++step;
      m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
      v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad.cwiseAbs2();
      const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
      theta.array() -= cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.adam_epsilon);
    }
    result.epoch_loss.push_back(epoch_total / static_cast<double>(samples.size()));
  }
  if (!result.params.finite()) throw std::runtime_error("training diverged to non-finite weights");
  return result;
}

std::vector<double> evaluate_ade(
  const PolicyParams & params, const std::vector<TrainingSample> & samples,
  const std::vector<double> & horizons, const EncoderConfig & encoder,
  const kinematics::KinematicLimits & limits)
{
  const int T = params.shape().steps;
  std::vector<int> upto;
  for (const double h : horizons) {
    const int n = static_cast<int>(std::lround(h / params.shape().dt));
    if (n <= 0 || n > T) throw std::invalid_argument("ADE horizon outside the planning horizon");
    upto.push_back(n);
  }
  std::vector<double> ade(horizons.size(), 0.0);
  if (samples.empty()) return ade;
  for (const auto & s : samples) {
    const PolicyOutput out = forward(params, encode_scene(s.frame, encoder), s.frame.ego, limits);
    std::vector<double> err(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      const auto & p = out.local[static_cast<std::size_t>(t) + 1];
      const auto & g = s.targets[static_cast<std::size_t>(t)];
      err[static_cast<std::size_t>(t)] = std::hypot(p.x - g.x, p.y - g.y);
    }
    for (std::size_t h = 0; h < upto.size(); ++h) {
      double sum = 0.0;
      for (int t = 0; t < upto[h]; ++t) sum += err[static_cast<std::size_t>(t)];
      ade[h] += sum / upto[h];
    }
  }
  for (double & a : ade) a /= static_cast<double>(samples.size());
  return ade;
}

void write_loss_csv(const std::filesystem::path & path, const std::vector<double> & epoch_loss)
{
  std::string out = "epoch,mean_loss\n";
  char buf[64];
  for (std::size_t i = 0; i < epoch_loss.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", i + 1, epoch_loss[i]);
    out += buf;
  }
  detail::write_file(path, out);
}

}  // namespace hybridplan::policy
