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


#include "hybridplan/simulator.hpp"

#include "hybridplan/prediction.hpp"
#include "hybridplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace hybridplan::sim
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxAgentDecel = 9.0;  // m/s^2
constexpr double kAgentLookahead = 100.0;  // m
constexpr double kMinAgentGap = 0.1;  // m

std::uint64_t fnv1a(const std::string & s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// 5 x 3 grid over the box, corners included.
std::array<Vec2, 15> box_samples(const OrientedBox & b)
{
  std::array<Vec2, 15> out{};
  const Vec2 u = unit_vector(b.heading);
  const Vec2 n{-u.y, u.x};
  std::size_t k = 0;
  for (int i = 0; i < 5; ++i) {
    const double fl = (static_cast<double>(i) / 4.0 - 0.5) * b.length;
    for (int j = 0; j < 3; ++j) {
      const double fw = (static_cast<double>(j) / 2.0 - 0.5) * b.width;
      out[k++] = b.center + u * fl + n * fw;
    }
  }
  return out;
}

double interpolate(const std::vector<double> & times, const std::vector<double> & values, double t)
{
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto i = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return values[i - 1] + w * (values[i] - values[i - 1]);
}

Pose2 interpolate_pose(const AgentTrack & a, double t)
{
  if (t <= a.times.front()) return a.poses.front();
  if (t >= a.times.back()) return a.poses.back();
  const auto it = std::upper_bound(a.times.begin(), a.times.end(), t);
  const auto i = static_cast<std::size_t>(it - a.times.begin());
  const double w = (t - a.times[i - 1]) / (a.times[i] - a.times[i - 1]);
  const Pose2 & p = a.poses[i - 1];
  const Pose2 & q = a.poses[i];
  return {p.x + w * (q.x - p.x), p.y + w * (q.y - p.y), normalize_angle(p.theta + w * angle_diff(q.theta, p.theta))};
}

double road_boundary_distance(const MapModel & map, const OrientedBox & box)
{
  if (map.drivable.empty()) return kInf;
  for (const auto & c : box.corners()) {
    if (!map.in_drivable(c)) return 0.0;
  }
  double best = kInf;
  const auto edges = box.edges();
  for (const auto & poly : map.drivable) {
    if (poly.contains(box.center)) best = std::min(best, poly.boundary_distance_to_segments(edges));
  }
  return std::isfinite(best) ? best : 0.0;
}

struct AgentHistory
{
  std::deque<double> times;
  std::deque<Pose2> poses;
  std::deque<double> speeds;
};

}  // namespace

NetworkPlanner::NetworkPlanner(
  policy::PolicyParams params, policy::EncoderConfig encoder, kinematics::KinematicLimits limits)
: params_(std::move(params)), encoder_(encoder), limits_(limits)
{
}

Trajectory NetworkPlanner::plan(const SceneFrame & frame, const policy::ControlNoise * noise) const
{
  return policy::forward(params_, policy::encode_scene(frame, encoder_), frame.ego, limits_, noise).world;
}

void SimConfig::validate() const
{
  fallback.validate();
  if (noise_j < 0.0 || noise_k < 0.0) throw std::invalid_argument("noise must be non-negative");
  if (ade_stride == 0) throw std::invalid_argument("ade_stride must be positive");
  for (const double h : ade_horizons) {
    if (!(h > 0.0)) throw std::invalid_argument("ADE horizons must be positive");
  }
}

const char * to_string(EventKind k)
{
  switch (k) {
    case EventKind::kCollision: return "collision";
    case EventKind::kCloseCall: return "close-call";
    case EventKind::kDiscomfortBraking: return "discomfort-braking";
    case EventKind::kPassiveness: return "passiveness";
    case EventKind::kOffRoad: return "off-road";
  }
  return "unknown";
}

std::vector<double> AdeTable::values() const
{
  std::vector<double> out(sums.size(), 0.0);
  if (samples == 0) return out;
  for (std::size_t i = 0; i < sums.size(); ++i) out[i] = sums[i] / static_cast<double>(samples);
  return out;
}

ReactiveAgent::ReactiveAgent(const AgentTrack & log, double t0) : log_(&log), t_(t0)
{
  log.validate();
  if (log.times.empty()) throw std::invalid_argument("agent track without samples");
  std::vector<Vec2> pts{log.poses.front().position()};
  for (const auto & p : log.poses) {
    if ((p.position() - pts.back()).norm() > 0.05) pts.push_back(p.position());
  }
  double length = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) length += (pts[i] - pts[i - 1]).norm();
  if (pts.size() >= 2 && length >= 0.5) {
    path_.emplace(std::move(pts));
    double prev = 0.0;
    for (const auto & p : log.poses) {
      const auto pr = path_->project(p.position(), prev - 1.0, prev + 5.0 + 1.0);
      prev = std::max(prev, pr.s);
      sample_s_.push_back(prev);
    }
  }
  s_ = path_ ? logged_s(t0) : 0.0;
  v_ = logged_v(t0);
}

double ReactiveAgent::logged_s(double t) const { return interpolate(log_->times, sample_s_, t); }

double ReactiveAgent::logged_v(double t) const { return interpolate(log_->times, log_->speeds, t); }

Pose2 ReactiveAgent::pose() const
{
  if (!path_) return interpolate_pose(*log_, t_);
  const Vec2 p = path_->point_at(s_);
  return {p.x, p.y, path_->heading_at(s_)};
}

AgentSnapshot ReactiveAgent::snapshot() const
{
  const Pose2 p = pose();
  return {log_->id, {p.position(), p.theta, log_->length, log_->width}, v_};
}

void ReactiveAgent::advance(
  double t, double dt, const OrientedBox & ego_box, double ego_v,
  const std::vector<AgentSnapshot> & others, const IdmParams & idm)
{
  t_ = t + dt;
  if (!path_) {
    v_ = logged_v(t_);
    return;
  }
  const double half_corridor = 0.5 * log_->width + idm.corridor_margin;
  double gap = kInf;
  double lead_v = 0.0;
  auto consider = [&](const OrientedBox & box, double v) {
    double s_min = kInf;
    for (const auto & p : box_samples(box)) {
      const auto pr = path_->project(p, s_ - 5.0, s_ + kAgentLookahead);
      if (pr.s > s_ && std::abs(pr.d) < half_corridor && pr.s < s_min) s_min = pr.s;
    }
    if (!std::isfinite(s_min)) return;
    const double g = s_min - s_ - 0.5 * log_->length;
    if (g < gap) {
      gap = g;
      lead_v = std::max(0.0, v * std::cos(angle_diff(box.heading, path_->heading_at(std::min(s_min, path_->length())))));
    }
  };
  consider(ego_box, ego_v);
  for (const auto & o : others) {
    if (o.id != log_->id) consider(o.box, o.v);
  }

  const double behind = std::max(0.0, logged_s(t) - s_);
  const double v_des = std::max(0.1, logged_v(t) + std::min(idm.max_catch_up, idm.catch_up_gain * behind));
  double acc = idm.max_accel * (1.0 - std::pow(v_ / v_des, idm.exponent));
  if (std::isfinite(gap)) {
    if (gap <= kMinAgentGap) {
      acc = -kMaxAgentDecel;
    } else {
      const double s_star = idm.standstill_gap + v_ * idm.time_headway +
                            v_ * (v_ - lead_v) / (2.0 * std::sqrt(idm.max_accel * idm.comfort_decel));
      acc -= idm.max_accel * std::pow(std::max(0.0, s_star) / gap, 2.0);
    }
  }
  acc = std::max(acc, -kMaxAgentDecel);
  double v_new = std::max(0.0, v_ + acc * dt);
  double ds = 0.5 * (v_ + v_new) * dt;
  if (v_new == 0.0 && acc < 0.0) ds = std::min(ds, v_ * v_ / (2.0 * -acc));
  if (std::isfinite(gap)) ds = std::min(ds, std::max(0.0, gap - kMinAgentGap));
  const double s_log = logged_s(t_);
  if (s_ + ds >= s_log) {
    ds = std::max(0.0, s_log - s_);
    v_new = logged_v(t_);
    if (std::isfinite(gap)) v_new = std::min(v_new, ds / dt);
  }
  s_ += ds;
  v_ = v_new;
}

std::vector<EventRecord> detect_events(
  const SimTrace & trace, const Scene & scene, const EventThresholds & th)
{
  std::array<std::optional<EventRecord>, kNumEventKinds> first{};
  auto fire = [&](EventKind k, std::size_t tick, double measured) {
    auto & slot = first[static_cast<std::size_t>(k)];
    if (!slot) slot = EventRecord{k, trace.scene_id, tick, measured};
  };
  const Polyline & route = scene.map.route_centerline;
  const bool has_route = !route.empty();
  fallback::LeadParams lead_params{th.path_margin, th.headway_min_speed};

  for (std::size_t i = 1; i < trace.ego.size(); ++i) {
    const TrajState & s = trace.ego[i];
    const OrientedBox box = footprint(s, scene.ego_size);
    std::vector<fallback::PathObject> objects;
    double d_obj = kInf;
    if (i < trace.agents.size()) {
      for (const auto & a : trace.agents[i]) {
        d_obj = std::min(d_obj, box_distance(box, a.box));
        objects.push_back({a.box, a.v});
      }
    }
    for (const auto & o : scene.static_obstacles) {
      d_obj = std::min(d_obj, box_distance(box, o));
      objects.push_back({o, 0.0});
    }
    const double d_road = road_boundary_distance(scene.map, box);
    const double d_min = std::min(d_obj, d_road);
    if (d_min < th.collision_distance) fire(EventKind::kCollision, i, d_min);

    if (d_obj < th.close_call_distance) {
      fire(EventKind::kCloseCall, i, d_obj);
    } else if (has_route) {
      const auto lead = fallback::lead_metrics(route, box, s.v, objects, lead_params);
      if (lead.has_lead && lead.ttc < th.ttc) {
        fire(EventKind::kCloseCall, i, lead.ttc);
      } else if (lead.has_lead && lead.headway < th.headway) {
        fire(EventKind::kCloseCall, i, lead.headway);
      }
    }

    if (s.j < th.jerk) fire(EventKind::kDiscomfortBraking, i, s.j);

    if (has_route) {
      const auto pr = route.project(s.position());
      if (std::abs(pr.d) > th.off_road) fire(EventKind::kOffRoad, i, std::abs(pr.d));
      if (i < scene.ego_states.size()) {
        const TrajState & logged = scene.ego_states[i];
        const double dv = s.v - logged.v;
        if (dv < th.passiveness_speed && pr.s < route.project(logged.position()).s) {
          fire(EventKind::kPassiveness, i, dv);
        }
      }
    }
  }
  if (first[static_cast<std::size_t>(EventKind::kCollision)]) {
    first[static_cast<std::size_t>(EventKind::kCloseCall)].reset();
  }
  std::vector<EventRecord> out;
  for (const auto & e : first) {
    if (e) out.push_back(*e);
  }
  return out;
}

SceneResult run_scene(const Scene & scene, const Planner & planner, const SimConfig & cfg)
{
  cfg.validate();
  if (scene.ego_states.empty()) throw std::invalid_argument("scene without ego states");
  if (std::abs(planner.dt() - scene.dt) > 1e-12 || std::abs(cfg.fallback.dt - scene.dt) > 1e-12) {
    throw std::invalid_argument("planner, fallback and scene dt differ");
  }
  const double dt = scene.dt;
  const std::size_t n_ticks = scene.ticks();
  const auto T = static_cast<std::size_t>(planner.steps());
  const MapModel & map = scene.map;

  SceneResult res;
  res.scene_id = scene.id;
  res.trace.scene_id = scene.id;
  res.trace.dt = dt;
  res.ade.horizons = cfg.ade_horizons;
  res.ade.sums.assign(cfg.ade_horizons.size(), 0.0);

  TrajState ego = scene.ego_states.front();
  std::deque<TrajState> ego_hist(cfg.history_ticks + 1, ego);
  std::vector<ReactiveAgent> agents;
  std::vector<AgentHistory> hist(scene.agents.size());
  agents.reserve(scene.agents.size());
  for (std::size_t a = 0; a < scene.agents.size(); ++a) {
    agents.emplace_back(scene.agents[a], 0.0);
    hist[a].times.push_back(0.0);
    hist[a].poses.push_back(agents[a].pose());
    hist[a].speeds.push_back(agents[a].speed());
  }
  auto snapshots = [&]() {
    std::vector<AgentSnapshot> out;
    out.reserve(agents.size());
    for (const auto & a : agents) out.push_back(a.snapshot());
    return out;
  };
  std::vector<int> cleared;
  std::mt19937_64 rng(scenario::scene_seed(cfg.seed, fnv1a(scene.id)));
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool noisy = cfg.noise_j > 0.0 || cfg.noise_k > 0.0;

  res.trace.ego.push_back(ego);
  res.trace.agents.push_back(snapshots());

  for (std::size_t tick = 0; tick < n_ticks; ++tick) {
    const double t = static_cast<double>(tick) * dt;
    SceneFrame frame;
    frame.timestamp = t;
    frame.dt = dt;
    frame.ego = ego;
    frame.ego_size = scene.ego_size;
    frame.ego_history.assign(ego_hist.begin(), ego_hist.end());
    frame.static_obstacles = scene.static_obstacles;
    frame.lights = scene.lights_at(t);
    frame.map = &map;
    for (std::size_t a = 0; a < agents.size(); ++a) {
      const AgentTrack & log = scene.agents[a];
      AgentTrack tr;
      tr.id = log.id;
      tr.type = log.type;
      tr.length = log.length;
      tr.width = log.width;
      tr.lane_id = log.lane_id;
      tr.times.assign(hist[a].times.begin(), hist[a].times.end());
      tr.poses.assign(hist[a].poses.begin(), hist[a].poses.end());
      tr.speeds.assign(hist[a].speeds.begin(), hist[a].speeds.end());
      if (cfg.fallback.prediction_mode == prediction::Mode::kLogReplay) {
        for (std::size_t k = 0; k < log.times.size(); ++k) {
          if (log.times[k] > t + 1e-9) {
            tr.times.push_back(log.times[k]);
            tr.poses.push_back(log.poses[k]);
            tr.speeds.push_back(log.speeds[k]);
          }
        }
      }
      frame.agents.push_back(std::move(tr));
    }

    policy::ControlNoise noise;
    if (noisy) {
      for (std::size_t k = 0; k < T; ++k) noise.j.push_back(cfg.noise_j * normal(rng));
      for (std::size_t k = 0; k < T; ++k) noise.k.push_back(cfg.noise_k * normal(rng));
    }

    Trajectory ml;
    try {
      ml = planner.plan(frame, noisy ? &noise : nullptr);
      if (ml.size() != T + 1) throw std::runtime_error("planner returned a trajectory of the wrong length");
      for (const auto & s : ml.states) {
        if (!s.finite()) throw std::runtime_error("planner returned non-finite states");
      }
    } catch (const std::exception & e) {
      res.aborted = true;
      res.abort_reason = e.what();
      break;
    }

    Trajectory chosen;
    fallback::Source source = fallback::Source::kML;
    if (cfg.fallback_enabled) {
      const auto preds = prediction::predict(
        frame.agents, t, cfg.fallback.horizon, cfg.fallback.dt, cfg.fallback.prediction_mode);
      fallback::World world;
      world.map = &map;
      world.ego_size = scene.ego_size;
      world.predictions = &preds;
      world.static_obstacles = scene.static_obstacles;
      world.lights = frame.lights;
      world.cleared_stop_lines = cleared;
      fallback::FallbackDecision d = fallback::select_trajectory(ml, world, cfg.fallback);
      source = d.source;
      if (source != fallback::Source::kML) {
        if (const auto p = d.ml_report.primary()) ++res.triggers[static_cast<std::size_t>(p->cause)];
      }
      if (cfg.record_decisions) res.decision_log.push_back(fallback::decision_log_line(t, d));
      chosen = std::move(d.chosen);
    } else {
      chosen = std::move(ml);
    }
    switch (source) {
      case fallback::Source::kML: ++res.ml_ticks; break;
      case fallback::Source::kCandidate: ++res.candidate_ticks; break;
      case fallback::Source::kEmergencyStop: ++res.emergency_ticks; break;
    }

    const TrajState next = kinematics::step(ego, chosen[1].j, chosen[1].k, dt);
    res.meters += std::hypot(next.x - ego.x, next.y - ego.y);
    ego = next;
    ego_hist.pop_front();
    ego_hist.push_back(ego);
    ++res.ticks;

    const OrientedBox ego_box = footprint(ego, scene.ego_size);
    if (cfg.reactive_agents) {
      const auto current = snapshots();
      for (auto & a : agents) a.advance(t, dt, ego_box, ego.v, current, cfg.idm);
    } else {
      for (std::size_t a = 0; a < agents.size(); ++a) {
        agents[a] = ReactiveAgent(scene.agents[a], t + dt);
      }
    }
    for (std::size_t a = 0; a < agents.size(); ++a) {
      hist[a].times.push_back(t + dt);
      hist[a].poses.push_back(agents[a].pose());
      hist[a].speeds.push_back(agents[a].speed());
      if (hist[a].times.size() > cfg.history_ticks + 1) {
        hist[a].times.pop_front();
        hist[a].poses.pop_front();
        hist[a].speeds.pop_front();
      }
    }

    const Vec2 front = ego_box.center + unit_vector(ego_box.heading) * (0.5 * scene.ego_size.length);
    for (const auto & line : map.stop_lines) {
      if (line.control != StopControl::kStopSign) continue;
      if (std::find(cleared.begin(), cleared.end(), line.id) != cleared.end()) continue;
      const Vec2 mid = (line.a + line.b) * 0.5;
      const Vec2 u = unit_vector(line.heading);
      const double f = (front - mid).dot(u);
      const double lat = std::abs((front - mid).dot(Vec2{-u.y, u.x}));
      if (ego.v < cfg.fallback.stop_speed && f <= 0.0 && f >= -cfg.fallback.stop_distance &&
          lat <= 0.5 * (line.b - line.a).norm()) {
        cleared.push_back(line.id);
      }
    }

    res.trace.ego.push_back(ego);
    res.trace.agents.push_back(snapshots());
    res.trace.sources.push_back(source);
  }

  res.events = detect_events(res.trace, scene, cfg.events);

  std::vector<std::size_t> upto;
  for (const double h : cfg.ade_horizons) {
    upto.push_back(std::min<std::size_t>(T, static_cast<std::size_t>(std::lround(h / dt))));
  }
  for (std::size_t tick = 0; tick + T <= n_ticks; tick += cfg.ade_stride) {
    const SceneFrame frame = policy::frame_at(scene, tick, cfg.history_ticks, false);
    Trajectory plan;
    try {
      plan = planner.plan(frame, nullptr);
    } catch (const std::exception &) {
      continue;
    }
    if (plan.size() != T + 1) continue;
    for (std::size_t h = 0; h < upto.size(); ++h) {
      double sum = 0.0;
      for (std::size_t k = 1; k <= upto[h]; ++k) {
        const TrajState & g = scene.ego_states[tick + k];
        sum += std::hypot(plan[k].x - g.x, plan[k].y - g.y);
      }
      res.ade.sums[h] += upto[h] > 0 ? sum / static_cast<double>(upto[h]) : 0.0;
    }
    ++res.ade.samples;
  }
  return res;
}

std::vector<SceneResult> run_suite(
  const std::vector<std::shared_ptr<const Scene>> & scenes, const Planner & planner,
  const SimConfig & cfg, int workers)
{
  cfg.validate();
  std::vector<SceneResult> out(scenes.size());
  const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), 1, std::max<std::size_t>(1, scenes.size()));
  std::vector<std::exception_ptr> errors(w);
  auto run = [&](std::size_t k) {
    try {
      for (std::size_t i = k; i < scenes.size(); i += w) out[i] = run_scene(*scenes[i], planner, cfg);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (w == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < w; ++k) pool.emplace_back(run, k);
    for (auto & th : pool) th.join();
  }
  for (const auto & e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string trace_csv(const SimTrace & trace)
{
  std::string out = "tick,x,y,theta,v,a,k,j,source\n";
  char buf[256];
  for (std::size_t i = 0; i < trace.ego.size(); ++i) {
    const TrajState & s = trace.ego[i];
    const char * src = i < trace.sources.size() ? fallback::to_string(trace.sources[i]) : "-";
    std::snprintf(
      buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s\n", i, s.x, s.y, s.theta, s.v, s.a,
      s.k, s.j, src);
    out += buf;
  }
  return out;
}

}  // namespace hybridplan::sim
