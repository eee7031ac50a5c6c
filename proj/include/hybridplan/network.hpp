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


#ifndef HYBRIDPLAN__NETWORK_HPP_
#define HYBRIDPLAN__NETWORK_HPP_

#include "hybridplan/features.hpp"
#include "hybridplan/kinematics.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hybridplan::policy
{

struct NetworkShape
{
  int hidden{64};
  int steps{40};
  double dt{0.1};
  double j_scale{2.0};   // raw jerk per unit network output
  double k_scale{0.05};  // raw curvature per unit network output
  bool operator==(const NetworkShape &) const = default;
};

/// Flat parameter vector plus its block layout:
/// enc1.W (H x 19), enc1.b, enc2.W (H x H), enc2.b, attn.Wq, attn.Wk, attn.Wv (H x H),
/// dec1.W (H x (2H + 3)), dec1.b, dec2.W (H x H), dec2.b, dec3.W (2T x H), dec3.b.
class PolicyParams
{
public:
  struct Block
  {
    std::string name;
    int rows{0};
    int cols{0};
    Eigen::Index offset{0};
  };

  PolicyParams() = default;
  /// All-zero weights.
  explicit PolicyParams(const NetworkShape & shape);
  /// He-style Gaussian weights, zero biases, small output layer.
  static PolicyParams random(const NetworkShape & shape, std::uint64_t seed);

  const NetworkShape & shape() const { return shape_; }
  const std::vector<Block> & blocks() const { return blocks_; }
  Eigen::VectorXd & values() { return values_; }
  const Eigen::VectorXd & values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }
  bool finite() const { return values_.allFinite(); }

  /// Little-endian binary: magic, version, shape, block table, row-major f64 weights.
  void save(const std::filesystem::path & path) const;
  /// Throws ParseError on a malformed file and VersionError on an unknown version.
  static PolicyParams load(const std::filesystem::path & path);

  bool operator==(const PolicyParams & o) const { return shape_ == o.shape_ && values_ == o.values_; }

private:
  void layout();

  NetworkShape shape_;
  std::vector<Block> blocks_;
  Eigen::VectorXd values_;
};

/// Additive perturbation of the raw controls, one entry per step.
struct ControlNoise
{
  std::vector<double> j;
  std::vector<double> k;
};

struct PolicyOutput
{
  Trajectory local;  // ego frame, state 0 at the origin
  Trajectory world;  // state 0 equals the ego state
  kinematics::ControlSequence raw;
  kinematics::ControlSequence controls;  // after clipping
};

/// Runs the network on encoded elements (ego element first) and decodes the controls through the
/// kinematic model. Throws std::invalid_argument on shape mismatch.
PolicyOutput forward(
  const PolicyParams & params, const std::vector<FeatureElement> & elements, const TrajState & ego,
  const kinematics::KinematicLimits & limits, const ControlNoise * noise = nullptr);

struct LossWeights
{
  double alpha{0.01};        // |k| penalty
  double beta{0.01};         // |j| penalty
  double theta_weight{1.0};  // m per rad in the pose L1
};

/// Imitation loss of a local (ego-frame) trajectory against ego-frame targets p_1..p_T.
/// Throws std::invalid_argument when target length differs from the number of steps.
double imitation_loss(const Trajectory & local, const std::vector<Pose2> & targets, const LossWeights & w);

/// Loss of one sample and, when `grad` is non-null, adds `scale` times its gradient to `grad`.
double loss_and_gradient(
  const PolicyParams & params, const std::vector<FeatureElement> & elements, const TrajState & ego,
  const std::vector<Pose2> & targets, const LossWeights & w, const kinematics::KinematicLimits & limits,
  Eigen::VectorXd * grad, double scale = 1.0);

}  // namespace hybridplan::policy

#endif  // HYBRIDPLAN__NETWORK_HPP_
