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


#include "hybridplan/network.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

namespace hybridplan::policy
{

namespace
{

using MatR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatR>;
using MapCM = Eigen::Map<const MatR>;
using MapV = Eigen::Map<Eigen::VectorXd>;
using MapCV = Eigen::Map<const Eigen::VectorXd>;

constexpr std::array<char, 4> kMagic{'H', 'P', 'W', 'T'};
constexpr std::uint32_t kWeightsVersion = 1;
constexpr int kStateFeatures = 3;

enum BlockId { kEnc1W, kEnc1B, kEnc2W, kEnc2B, kWq, kWk, kWv, kDec1W, kDec1B, kDec2W, kDec2B, kDec3W, kDec3B };

// Views of one flat vector laid out as in PolicyParams.
template <typename M, typename V, typename Ptr>
struct Views
{
  M enc1_w, enc2_w, wq, wk, wv, dec1_w, dec2_w, dec3_w;
  V enc1_b, enc2_b, dec1_b, dec2_b, dec3_b;

  Views(Ptr base, const std::vector<PolicyParams::Block> & b)
  : enc1_w(base + b[kEnc1W].offset, b[kEnc1W].rows, b[kEnc1W].cols),
    enc2_w(base + b[kEnc2W].offset, b[kEnc2W].rows, b[kEnc2W].cols),
    wq(base + b[kWq].offset, b[kWq].rows, b[kWq].cols),
    wk(base + b[kWk].offset, b[kWk].rows, b[kWk].cols),
    wv(base + b[kWv].offset, b[kWv].rows, b[kWv].cols),
    dec1_w(base + b[kDec1W].offset, b[kDec1W].rows, b[kDec1W].cols),
    dec2_w(base + b[kDec2W].offset, b[kDec2W].rows, b[kDec2W].cols),
    dec3_w(base + b[kDec3W].offset, b[kDec3W].rows, b[kDec3W].cols),
    enc1_b(base + b[kEnc1B].offset, b[kEnc1B].rows),
    enc2_b(base + b[kEnc2B].offset, b[kEnc2B].rows),
    dec1_b(base + b[kDec1B].offset, b[kDec1B].rows),
    dec2_b(base + b[kDec2B].offset, b[kDec2B].rows),
    dec3_b(base + b[kDec3B].offset, b[kDec3B].rows)
  {
  }
};
using ConstViews = Views<MapCM, MapCV, const double *>;
using GradViews = Views<MapM, MapV, double *>;

struct Cache
{
  std::vector<MatR> a1;  // encoder pre-activations per element
  std::vector<Eigen::VectorXi> argmax;
  MatR emb;
  Eigen::VectorXd q;
  MatR keys;
  MatR vals;
  Eigen::VectorXd alpha;
  Eigen::VectorXd u, a1d, h1, a2d, h2, o;
};

Eigen::VectorXd relu(const Eigen::VectorXd & x) { return x.cwiseMax(0.0); }

void run_network(
  const PolicyParams & params, const std::vector<FeatureElement> & elements, const TrajState & ego,
  Cache & c)
{
  const int H = params.shape().hidden;
  if (elements.empty() || elements.front().kind != ElementKind::kEgo) {
    throw std::invalid_argument("policy input must start with the ego element");
  }
  const ConstViews w(params.values().data(), params.blocks());
  const auto n = static_cast<Eigen::Index>(elements.size());
  c.a1.resize(elements.size());
  c.argmax.resize(elements.size());
  c.emb.resize(n, H);
  for (Eigen::Index e = 0; e < n; ++e) {
    const auto & rows = elements[static_cast<std::size_t>(e)].rows;
    if (rows.rows() == 0) throw std::invalid_argument("feature element without rows");
    MatR & a1 = c.a1[static_cast<std::size_t>(e)];
    a1 = (rows * w.enc1_w.transpose()).rowwise() + w.enc1_b.transpose();
    const MatR z2 = (a1.cwiseMax(0.0) * w.enc2_w.transpose()).rowwise() + w.enc2_b.transpose();
    Eigen::VectorXi & am = c.argmax[static_cast<std::size_t>(e)];
    am.resize(H);
    for (int h = 0; h < H; ++h) {
      Eigen::Index r = 0;
      c.emb(e, h) = z2.col(h).maxCoeff(&r);
      am[h] = static_cast<int>(r);
    }
  }
  const Eigen::VectorXd e0 = c.emb.row(0).transpose();
  c.q = w.wq * e0;
  c.keys = c.emb * w.wk.transpose();
  c.vals = c.emb * w.wv.transpose();
  Eigen::VectorXd scores = (c.keys * c.q) / std::sqrt(static_cast<double>(H));
  scores.array() -= scores.maxCoeff();
  c.alpha = scores.array().exp();
  c.alpha /= c.alpha.sum();
  const Eigen::VectorXd ctx = c.vals.transpose() * c.alpha;

  c.u.resize(2 * H + kStateFeatures);
  c.u << e0, ctx, ego.v / 10.0, ego.a / 3.0, ego.k / 0.1;
  c.a1d = w.dec1_w * c.u + w.dec1_b;
  c.h1 = relu(c.a1d);
  c.a2d = w.dec2_w * c.h1 + w.dec2_b;
  c.h2 = relu(c.a2d);
  c.o = w.dec3_w * c.h2 + w.dec3_b;
}

void backprop(
  const PolicyParams & params, const std::vector<FeatureElement> & elements, const Cache & c,
  const Eigen::VectorXd & d_o, Eigen::VectorXd & grad, double scale)
{
  const int H = params.shape().hidden;
  const ConstViews w(params.values().data(), params.blocks());
  GradViews g(grad.data(), params.blocks());
  const Eigen::VectorXd dout = d_o * scale;

  g.dec3_w.noalias() += dout * c.h2.transpose();
  g.dec3_b += dout;
  const Eigen::VectorXd da2 = (w.dec3_w.transpose() * dout).cwiseProduct(
    (c.a2d.array() > 0.0).cast<double>().matrix());
  g.dec2_w.noalias() += da2 * c.h1.transpose();
  g.dec2_b += da2;
  const Eigen::VectorXd da1 = (w.dec2_w.transpose() * da2).cwiseProduct(
    (c.a1d.array() > 0.0).cast<double>().matrix());
  g.dec1_w.noalias() += da1 * c.u.transpose();
  g.dec1_b += da1;
  const Eigen::VectorXd du = w.dec1_w.transpose() * da1;
  const Eigen::VectorXd d_e0 = du.head(H);
  const Eigen::VectorXd d_ctx = du.segment(H, H);

  const auto n = c.emb.rows();
  MatR d_emb = MatR::Zero(n, H);
  // ctx = V^T alpha
  const MatR d_vals = c.alpha * d_ctx.transpose();
  const Eigen::VectorXd d_alpha = c.vals * d_ctx;
  const double mean = c.alpha.dot(d_alpha);
  const Eigen::VectorXd d_scores = c.alpha.cwiseProduct(d_alpha.array().matrix() - Eigen::VectorXd::Constant(n, mean));
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(H));
  const MatR d_keys = d_scores * c.q.transpose() * inv_sqrt;
  const Eigen::VectorXd d_q = c.keys.transpose() * d_scores * inv_sqrt;
  g.wv.noalias() += d_vals.transpose() * c.emb;
  g.wk.noalias() += d_keys.transpose() * c.emb;
  g.wq.noalias() += d_q * c.emb.row(0);
  d_emb.noalias() += d_vals * w.wv + d_keys * w.wk;
  d_emb.row(0) += (d_e0 + w.wq.transpose() * d_q).transpose();

  for (Eigen::Index e = 0; e < n; ++e) {
    const auto & rows = elements[static_cast<std::size_t>(e)].rows;
    const MatR & a1 = c.a1[static_cast<std::size_t>(e)];
    const Eigen::VectorXi & am = c.argmax[static_cast<std::size_t>(e)];
    MatR d_z2 = MatR::Zero(a1.rows(), H);
    for (int h = 0; h < H; ++h) d_z2(am[h], h) = d_emb(e, h);
    const MatR z1 = a1.cwiseMax(0.0);
    g.enc2_w.noalias() += d_z2.transpose() * z1;
    g.enc2_b += d_z2.colwise().sum().transpose();
    const MatR d_a1 = (d_z2 * w.enc2_w).cwiseProduct((a1.array() > 0.0).cast<double>().matrix());
    g.enc1_w.noalias() += d_a1.transpose() * rows;
    g.enc1_b += d_a1.colwise().sum().transpose();
  }
}

TrajState local_start(const TrajState & ego)
{
  TrajState s = ego;
  s.x = 0.0;
  s.y = 0.0;
  s.theta = 0.0;
  return s;
}

void split_raw(
  const PolicyParams & params, const Eigen::VectorXd & o, const ControlNoise * noise,
  std::vector<double> & raw_j, std::vector<double> & raw_k)
{
  const auto T = static_cast<std::size_t>(params.shape().steps);
  raw_j.resize(T);
  raw_k.resize(T);
  if (noise != nullptr && (noise->j.size() != T || noise->k.size() != T)) {
    throw std::invalid_argument("control noise length must equal the number of steps");
  }
  for (std::size_t t = 0; t < T; ++t) {
    raw_j[t] = params.shape().j_scale * o[static_cast<Eigen::Index>(t)];
    raw_k[t] = params.shape().k_scale * o[static_cast<Eigen::Index>(T + t)];
    if (noise != nullptr) {
      raw_j[t] += noise->j[t];
      raw_k[t] += noise->k[t];
    }
  }
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void put_u32(std::string & out, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string & out, double d)
{
  std::uint64_t v = 0;
  std::memcpy(&v, &d, sizeof(v));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader
{
public:
  explicit ByteReader(const std::string & data) : data_(data) {}
  std::uint32_t u32(const char * what)
  {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
  }
  double f64(const char * what)
  {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    double d = 0.0;
    std::memcpy(&d, &v, sizeof(d));
    return d;
  }
  bool done() const { return pos_ == data_.size(); }

private:
  void need(std::size_t n, const char * what) const
  {
    if (pos_ + n > data_.size()) throw ParseError(std::string("weights: truncated at ") + what);
  }
  const std::string & data_;
  std::size_t pos_{4};
};

}  // namespace

PolicyParams::PolicyParams(const NetworkShape & shape) : shape_(shape)
{
  if (shape.hidden <= 0 || shape.steps <= 0 || !(shape.dt > 0.0)) {
    throw std::invalid_argument("network shape must be positive");
  }
  layout();
  values_ = Eigen::VectorXd::Zero(blocks_.back().offset + blocks_.back().rows * blocks_.back().cols);
}

void PolicyParams::layout()
{
  const int H = shape_.hidden;
  const int T2 = 2 * shape_.steps;
  const std::vector<std::tuple<const char *, int, int>> spec{
    {"enc1.W", H, kFeatureWidth}, {"enc1.b", H, 1}, {"enc2.W", H, H}, {"enc2.b", H, 1},
    {"attn.Wq", H, H},            {"attn.Wk", H, H}, {"attn.Wv", H, H},
    {"dec1.W", H, 2 * H + kStateFeatures}, {"dec1.b", H, 1}, {"dec2.W", H, H}, {"dec2.b", H, 1},
    {"dec3.W", T2, H},            {"dec3.b", T2, 1}};
  blocks_.clear();
  Eigen::Index off = 0;
  for (const auto & [name, r, c] : spec) {
    blocks_.push_back({name, r, c, off});
    off += static_cast<Eigen::Index>(r) * c;
  }
}

PolicyParams PolicyParams::random(const NetworkShape & shape, std::uint64_t seed)
{
  PolicyParams p(shape);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto & b : p.blocks_) {
    if (b.cols == 1) continue;
    double sd = std::sqrt(2.0 / static_cast<double>(b.cols));
    if (b.name == "dec3.W") sd *= 0.1;
    if (b.name.rfind("attn.", 0) == 0) sd = std::sqrt(1.0 / static_cast<double>(b.cols));
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(b.rows) * b.cols; ++i) {
      p.values_[b.offset + i] = sd * normal(gen);
    }
  }
  return p;
}

void PolicyParams::save(const std::filesystem::path & path) const
{
  std::string out(kMagic.begin(), kMagic.end());
  put_u32(out, kWeightsVersion);
  put_u32(out, static_cast<std::uint32_t>(shape_.hidden));
  put_u32(out, static_cast<std::uint32_t>(shape_.steps));
  put_f64(out, shape_.dt);
  put_f64(out, shape_.j_scale);
  put_f64(out, shape_.k_scale);
  put_u32(out, static_cast<std::uint32_t>(blocks_.size()));
  for (const auto & b : blocks_) {
    put_u32(out, static_cast<std::uint32_t>(b.rows));
    put_u32(out, static_cast<std::uint32_t>(b.cols));
  }
  for (Eigen::Index i = 0; i < values_.size(); ++i) put_f64(out, values_[i]);
  detail::write_file(path, out);
}

PolicyParams PolicyParams::load(const std::filesystem::path & path)
{
  const std::string data = detail::read_file(path);
  if (data.size() < 4 || !std::equal(kMagic.begin(), kMagic.end(), data.begin())) {
    throw ParseError("weights: bad magic in " + path.string());
  }
  ByteReader r(data);
  const std::uint32_t version = r.u32("version");
  if (version != kWeightsVersion) {
    throw VersionError("weights: unsupported version " + std::to_string(version));
  }
  NetworkShape shape;
  shape.hidden = static_cast<int>(r.u32("hidden"));
  shape.steps = static_cast<int>(r.u32("steps"));
  shape.dt = r.f64("dt");
  shape.j_scale = r.f64("j_scale");
  shape.k_scale = r.f64("k_scale");
  if (shape.hidden <= 0 || shape.hidden > 4096 || shape.steps <= 0 || shape.steps > 10000 ||
      !(shape.dt > 0.0)) {
    throw ParseError("weights: invalid shape header");
  }
  PolicyParams p(shape);
  const std::uint32_t nblocks = r.u32("block count");
  if (nblocks != p.blocks_.size()) throw ParseError("weights: block count mismatch");
  for (const auto & b : p.blocks_) {
    const auto rows = r.u32("block table");
    const auto cols = r.u32("block table");
    if (rows != static_cast<std::uint32_t>(b.rows) || cols != static_cast<std::uint32_t>(b.cols)) {
      throw ParseError("weights: shape mismatch for block " + b.name);
    }
  }
  for (Eigen::Index i = 0; i < p.values_.size(); ++i) p.values_[i] = r.f64("weights");
  if (!r.done()) throw ParseError("weights: trailing bytes");
  if (!p.finite()) throw ParseError("weights: non-finite values");
  return p;
}

PolicyOutput forward(
  const PolicyParams & params, const std::vector<FeatureElement> & elements, const TrajState & ego,
  const kinematics::KinematicLimits & limits, const ControlNoise * noise)
{
  Cache c;
  run_network(params, elements, ego, c);
  std::vector<double> raw_j;
  std::vector<double> raw_k;
  split_raw(params, c.o, noise, raw_j, raw_k);
  kinematics::DifferentiableRollout roll(local_start(ego), limits, params.shape().dt);
  PolicyOutput out;
  out.local = roll.forward(raw_j, raw_k);
  out.raw.dt = params.shape().dt;
  out.controls.dt = params.shape().dt;
  for (std::size_t t = 0; t < raw_j.size(); ++t) {
    out.raw.controls.push_back({raw_j[t], raw_k[t]});
    out.controls.controls.push_back({out.local[t + 1].j, out.local[t + 1].k});
  }
  out.world = out.local;
  const Pose2 ref = ego.pose();
  for (std::size_t i = 1; i < out.world.size(); ++i) {
    const Pose2 p = from_ego_frame(out.local[i].pose(), ref);
    out.world[i].x = p.x;
    out.world[i].y = p.y;
    out.world[i].theta = p.theta;
  }
  out.world[0] = ego;
  return out;
}

double imitation_loss(const Trajectory & local, const std::vector<Pose2> & targets, const LossWeights & w)
{
  if (local.size() != targets.size() + 1) {
    throw std::invalid_argument("target length must equal the number of trajectory steps");
  }
  double loss = 0.0;
  for (std::size_t t = 1; t < local.size(); ++t) {
    const TrajState & s = local[t];
    const Pose2 & p = targets[t - 1];
    loss += std::abs(s.x - p.x) + std::abs(s.y - p.y) +
            w.theta_weight * std::abs(angle_diff(s.theta, p.theta)) + w.alpha * std::abs(s.k) +
            w.beta * std::abs(s.j);
  }
  return loss;
}

double loss_and_gradient(
  const PolicyParams & params, const std::vector<FeatureElement> & elements, const TrajState & ego,
  const std::vector<Pose2> & targets, const LossWeights & w, const kinematics::KinematicLimits & limits,
  Eigen::VectorXd * grad, double scale)
{
  const auto T = static_cast<std::size_t>(params.shape().steps);
  if (targets.size() != T) {
    throw std::invalid_argument("target length must equal the number of steps");
  }
  Cache c;
  run_network(params, elements, ego, c);
  std::vector<double> raw_j;
  std::vector<double> raw_k;
  split_raw(params, c.o, nullptr, raw_j, raw_k);
  kinematics::DifferentiableRollout roll(local_start(ego), limits, params.shape().dt);
  const Trajectory & traj = roll.forward(raw_j, raw_k);
  const double loss = imitation_loss(traj, targets, w);
  if (grad == nullptr) return loss;
  if (grad->size() != params.size()) throw std::invalid_argument("gradient size mismatch");

  std::vector<double> gx(T), gy(T), gth(T), gk(T), gj(T), dj(T), dk(T);
  for (std::size_t t = 0; t < T; ++t) {
    const TrajState & s = traj[t + 1];
    gx[t] = sgn(s.x - targets[t].x);
    gy[t] = sgn(s.y - targets[t].y);
    gth[t] = w.theta_weight * sgn(angle_diff(s.theta, targets[t].theta));
    gk[t] = w.alpha * sgn(s.k);
    gj[t] = w.beta * sgn(s.j);
  }
  roll.backward(gx, gy, gth, gk, gj, dj, dk);
  Eigen::VectorXd d_o(2 * static_cast<Eigen::Index>(T));
  for (std::size_t t = 0; t < T; ++t) {
    d_o[static_cast<Eigen::Index>(t)] = params.shape().j_scale * dj[t];
    d_o[static_cast<Eigen::Index>(T + t)] = params.shape().k_scale * dk[t];
  }
  backprop(params, elements, c, d_o, *grad, scale);
  return loss;
}

}  // namespace hybridplan::policy
