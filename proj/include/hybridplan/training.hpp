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


#ifndef HYBRIDPLAN__TRAINING_HPP_
#define HYBRIDPLAN__TRAINING_HPP_

#include "hybridplan/features.hpp"
#include "hybridplan/kinematics.hpp"
#include "hybridplan/network.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <vector>

namespace hybridplan::policy
{

struct PerturbationConfig
{
  double probability{0.5};
  double max_lateral{1.0};  // m
  double max_heading{0.15};  // rad
  bool operator==(const PerturbationConfig &) const = default;
};

struct TrainingConfig
{
  NetworkShape shape;
  EncoderConfig encoder;
  LossWeights loss;
  PerturbationConfig perturbation;
  double learning_rate{1e-3};
  double adam_beta1{0.9};
  double adam_beta2{0.999};
  double adam_epsilon{1e-8};
  int batch_size{32};
  int epochs{20};
  std::uint64_t seed{0};
  int workers{1};

  /// Throws std::invalid_argument on negative weights, a probability outside [0, 1] or
  /// non-positive sizes.
  void validate() const;
};

/// One imitation example: the planner input at a logged tick and the next T logged poses in the
/// frame of the ego pose at that tick.
struct TrainingSample
{
  std::shared_ptr<const Scene> scene;  // keeps frame.map alive
  std::size_t tick{0};
  SceneFrame frame;
  std::vector<Pose2> targets;
};

struct DatasetConfig
{
  int steps{40};
  std::size_t stride{10};          // ticks between samples of one scene
  std::size_t history_ticks{10};
  std::size_t max_samples{0};      // 0 keeps all
  bool operator==(const DatasetConfig &) const = default;
};

/// Samples at ticks 0, stride, 2 stride, ... while T future states exist, scenes in order.
std::vector<TrainingSample> build_dataset(
  const std::vector<std::shared_ptr<const Scene>> & scenes, const DatasetConfig & cfg);

/// First ceil(fraction * n) samples of a seeded permutation. Subsets of one seed are nested.
std::vector<TrainingSample> subset(
  const std::vector<TrainingSample> & samples, double fraction, std::uint64_t seed);

/// With the configured probability, shifts the current ego pose sideways and rotates it; targets
/// are re-expressed in the shifted frame and otherwise kept.
TrainingSample perturb_sample(
  const TrainingSample & sample, const PerturbationConfig & cfg, std::mt19937_64 & rng);

/// Same as perturb_sample with explicit offsets.
TrainingSample shift_sample(const TrainingSample & sample, double lateral, double heading);

/// Mean loss over the batch; `grad` (optional) receives the gradient of that mean.
double batch_loss(
  const PolicyParams & params, const std::vector<const TrainingSample *> & batch,
  const TrainingConfig & cfg, const kinematics::KinematicLimits & limits, Eigen::VectorXd * grad);

struct TrainingResult
{
  PolicyParams params;
  std::vector<double> epoch_loss;  // mean loss per epoch
};

/// Adam on mini-batches with per-sample perturbation. Deterministic for a given seed and any
/// worker count.
TrainingResult train(
  const std::vector<TrainingSample> & samples, const TrainingConfig & cfg,
  const kinematics::KinematicLimits & limits = {});

/// Mean position error over steps up to each horizon (s), averaged over samples.
std::vector<double> evaluate_ade(
  const PolicyParams & params, const std::vector<TrainingSample> & samples,
  const std::vector<double> & horizons, const EncoderConfig & encoder = {},
  const kinematics::KinematicLimits & limits = {});

/// `epoch,mean_loss` rows.
void write_loss_csv(const std::filesystem::path & path, const std::vector<double> & epoch_loss);

}  // namespace hybridplan::policy

#endif  // HYBRIDPLAN__TRAINING_HPP_
