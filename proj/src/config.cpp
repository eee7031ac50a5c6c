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


#include "hybridplan/config.hpp"

#include "json_util.hpp"

#include <stdexcept>

namespace hybridplan
{

using json = nlohmann::json;
using detail::Reader;

namespace
{

template <typename F>
void opt(const Reader & r, const char * key, F && f)
{
  if (r.has(key)) f(r[key]);
}

void read_number(const Reader & r, const char * key, double & out)
{
  opt(r, key, [&](const Reader & v) { out = v.number(); });
}

void read_int(const Reader & r, const char * key, int & out)
{
  opt(r, key, [&](const Reader & v) { out = v.integer(); });
}

void read_size(const Reader & r, const char * key, std::size_t & out)
{
  opt(r, key, [&](const Reader & v) { out = static_cast<std::size_t>(v.unsigned_integer()); });
}

void read_u64(const Reader & r, const char * key, std::uint64_t & out)
{
  opt(r, key, [&](const Reader & v) { out = v.unsigned_integer(); });
}

void read_bool(const Reader & r, const char * key, bool & out)
{
  opt(r, key, [&](const Reader & v) { out = v.boolean(); });
}

void read_numbers(const Reader & r, const char * key, std::vector<double> & out)
{
  opt(r, key, [&](const Reader & v) {
    out.clear();
    for (const auto & e : v.array()) out.push_back(e.number());
  });
}

void read_range(const Reader & r, const char * key, scenario::Range & out)
{
  opt(r, key, [&](const Reader & v) {
    const auto a = v.array(2, 2);
    out = {a[0].number(), a[1].number()};
  });
}

json range_json(const scenario::Range & r) { return json::array({r.lo, r.hi}); }

void read_scenario(const Reader & r, scenario::ScenarioConfig & c)
{
  r.keys({"counts", "seed", "duration", "dt", "lane_width", "ego_speed", "lead_gap", "brake_time",
          "brake_decel", "road_curvature", "intersection_distance", "red_duration", "pedestrian_speed",
          "parked_distance"});
  opt(r, "counts", [&](const Reader & v) {
    if (!v.raw().is_object()) throw ParseError(v.path() + ": expected an object");
    c.counts.fill(0);
    for (const auto & [name, n] : v.raw().items()) {
      const auto t = scenario::template_from_string(name);
      c.counts[static_cast<std::size_t>(t)] = Reader(n, v.path() + "." + name).integer();
    }
  });
  read_u64(r, "seed", c.seed);
  read_number(r, "duration", c.duration);
  read_number(r, "dt", c.dt);
  read_number(r, "lane_width", c.lane_width);
  read_range(r, "ego_speed", c.ego_speed);
  read_range(r, "lead_gap", c.lead_gap);
  read_range(r, "brake_time", c.brake_time);
  read_range(r, "brake_decel", c.brake_decel);
  read_range(r, "road_curvature", c.road_curvature);
  read_range(r, "intersection_distance", c.intersection_distance);
  read_range(r, "red_duration", c.red_duration);
  read_range(r, "pedestrian_speed", c.pedestrian_speed);
  read_range(r, "parked_distance", c.parked_distance);
}

json scenario_json(const scenario::ScenarioConfig & c)
{
  json counts = json::object();
  for (std::size_t t = 0; t < scenario::kNumTemplates; ++t) {
    counts[scenario::to_string(static_cast<scenario::Template>(t))] = c.counts[t];
  }
  return {{"counts", counts},
          {"seed", c.seed},
          {"duration", c.duration},
          {"dt", c.dt},
          {"lane_width", c.lane_width},
          {"ego_speed", range_json(c.ego_speed)},
          {"lead_gap", range_json(c.lead_gap)},
          {"brake_time", range_json(c.brake_time)},
          {"brake_decel", range_json(c.brake_decel)},
          {"road_curvature", range_json(c.road_curvature)},
          {"intersection_distance", range_json(c.intersection_distance)},
          {"red_duration", range_json(c.red_duration)},
          {"pedestrian_speed", range_json(c.pedestrian_speed)},
          {"parked_distance", range_json(c.parked_distance)}};
}

void read_limits(const Reader & r, kinematics::KinematicLimits & l)
{
  r.keys({"max_jerk", "max_accel", "min_accel", "max_curvature", "max_steering_angle", "wheelbase",
          "max_lateral_accel", "max_curvature_rate", "max_steering_jerk", "comfort_max_jerk",
          "comfort_max_accel", "comfort_min_accel", "comfort_max_lateral_accel"});
  read_number(r, "max_jerk", l.max_jerk);
  read_number(r, "max_accel", l.max_accel);
  read_number(r, "min_accel", l.min_accel);
  read_number(r, "max_curvature", l.max_curvature);
  read_number(r, "max_steering_angle", l.max_steering_angle);
  read_number(r, "wheelbase", l.wheelbase);
  read_number(r, "max_lateral_accel", l.max_lateral_accel);
  read_number(r, "max_curvature_rate", l.max_curvature_rate);
  read_number(r, "max_steering_jerk", l.max_steering_jerk);
  read_number(r, "comfort_max_jerk", l.comfort_max_jerk);
  read_number(r, "comfort_max_accel", l.comfort_max_accel);
  read_number(r, "comfort_min_accel", l.comfort_min_accel);
  read_number(r, "comfort_max_lateral_accel", l.comfort_max_lateral_accel);
}

json limits_json(const kinematics::KinematicLimits & l)
{
  return {{"max_jerk", l.max_jerk},
          {"max_accel", l.max_accel},
          {"min_accel", l.min_accel},
          {"max_curvature", l.max_curvature},
          {"max_steering_angle", l.max_steering_angle},
          {"wheelbase", l.wheelbase},
          {"max_lateral_accel", l.max_lateral_accel},
          {"max_curvature_rate", l.max_curvature_rate},
          {"max_steering_jerk", l.max_steering_jerk},
          {"comfort_max_jerk", l.comfort_max_jerk},
          {"comfort_max_accel", l.comfort_max_accel},
          {"comfort_min_accel", l.comfort_min_accel},
          {"comfort_max_lateral_accel", l.comfort_max_lateral_accel}};
}

void read_fallback(const Reader & r, fallback::FallbackConfig & f, bool & enabled)
{
  r.keys({"enabled", "comfort_checks", "grid_resolution", "min_gap", "ttc", "headway",
          "headway_min_speed", "path_margin", "stop_speed", "stop_distance", "row_time_buffer",
          "horizon", "prediction_mode", "limits", "candidates"});
  read_bool(r, "enabled", enabled);
  read_bool(r, "comfort_checks", f.comfort_checks);
  read_number(r, "grid_resolution", f.grid_resolution);
  read_number(r, "min_gap", f.min_gap);
  read_number(r, "ttc", f.ttc_threshold);
  read_number(r, "headway", f.headway_threshold);
  read_number(r, "headway_min_speed", f.headway_min_speed);
  read_number(r, "path_margin", f.path_margin);
  read_number(r, "stop_speed", f.stop_speed);
  read_number(r, "stop_distance", f.stop_distance);
  read_number(r, "row_time_buffer", f.row_time_buffer);
  read_number(r, "horizon", f.horizon);
  opt(r, "prediction_mode", [&](const Reader & v) { f.prediction_mode = prediction::mode_from_string(v.string()); });
  opt(r, "limits", [&](const Reader & v) { read_limits(v, f.limits); });
  opt(r, "candidates", [&](const Reader & v) {
    v.keys({"speed_deltas", "time_gaps", "standstill_gap", "stop_decel", "min_lateral_distance",
            "lateral_distance_per_speed", "max_projection_offset"});
    auto & c = f.candidates;
    read_numbers(v, "speed_deltas", c.speed_deltas);
    read_numbers(v, "time_gaps", c.time_gaps);
    read_number(v, "standstill_gap", c.standstill_gap);
    read_number(v, "stop_decel", c.stop_decel);
    read_number(v, "min_lateral_distance", c.min_lateral_distance);
    read_number(v, "lateral_distance_per_speed", c.lateral_distance_per_speed);
    read_number(v, "max_projection_offset", c.max_projection_offset);
  });
}

json fallback_json(const fallback::FallbackConfig & f, bool enabled)
{
  const auto & c = f.candidates;
  return {{"enabled", enabled},
          {"comfort_checks", f.comfort_checks},
          {"grid_resolution", f.grid_resolution},
          {"min_gap", f.min_gap},
          {"ttc", f.ttc_threshold},
          {"headway", f.headway_threshold},
          {"headway_min_speed", f.headway_min_speed},
          {"path_margin", f.path_margin},
          {"stop_speed", f.stop_speed},
          {"stop_distance", f.stop_distance},
          {"row_time_buffer", f.row_time_buffer},
          {"horizon", f.horizon},
          {"prediction_mode", prediction::to_string(f.prediction_mode)},
          {"limits", limits_json(f.limits)},
          {"candidates",
           {{"speed_deltas", c.speed_deltas},
            {"time_gaps", c.time_gaps},
            {"standstill_gap", c.standstill_gap},
            {"stop_decel", c.stop_decel},
            {"min_lateral_distance", c.min_lateral_distance},
            {"lateral_distance_per_speed", c.lateral_distance_per_speed},
            {"max_projection_offset", c.max_projection_offset}}}};
}

void read_training(const Reader & r, RunConfig & cfg)
{
  r.keys({"hidden", "j_scale", "k_scale", "learning_rate", "batch_size", "epochs", "seed", "alpha",
          "beta", "theta_weight", "perturbation", "data_fraction", "subset_seed", "encoder"});
  auto & t = cfg.training;
  read_int(r, "hidden", t.shape.hidden);
  read_number(r, "j_scale", t.shape.j_scale);
  read_number(r, "k_scale", t.shape.k_scale);
  read_number(r, "learning_rate", t.learning_rate);
  read_int(r, "batch_size", t.batch_size);
  read_int(r, "epochs", t.epochs);
  read_u64(r, "seed", t.seed);
  read_number(r, "alpha", t.loss.alpha);
  read_number(r, "beta", t.loss.beta);
  read_number(r, "theta_weight", t.loss.theta_weight);
  opt(r, "perturbation", [&](const Reader & v) {
    v.keys({"probability", "max_lateral", "max_heading"});
    read_number(v, "probability", t.perturbation.probability);
    read_number(v, "max_lateral", t.perturbation.max_lateral);
    read_number(v, "max_heading", t.perturbation.max_heading);
  });
  read_number(r, "data_fraction", cfg.data_fraction);
  read_u64(r, "subset_seed", cfg.subset_seed);
  opt(r, "encoder", [&](const Reader & v) {
    v.keys({"history_depth", "history_step", "max_agents", "max_lanes", "max_crosswalks",
            "max_stop_lines", "range"});
    auto & e = t.encoder;
    read_int(v, "history_depth", e.history_depth);
    read_number(v, "history_step", e.history_step);
    read_int(v, "max_agents", e.max_agents);
    read_int(v, "max_lanes", e.max_lanes);
    read_int(v, "max_crosswalks", e.max_crosswalks);
    read_int(v, "max_stop_lines", e.max_stop_lines);
    read_number(v, "range", e.range);
  });
}

void read_simulator(const Reader & r, sim::SimConfig & s)
{
  r.keys({"noise_j", "noise_k", "seed", "reactive_agents", "record_decisions", "ade_horizons",
          "ade_stride", "idm", "events"});
  read_number(r, "noise_j", s.noise_j);
  read_number(r, "noise_k", s.noise_k);
  read_u64(r, "seed", s.seed);
  read_bool(r, "reactive_agents", s.reactive_agents);
  read_bool(r, "record_decisions", s.record_decisions);
  read_numbers(r, "ade_horizons", s.ade_horizons);
  read_size(r, "ade_stride", s.ade_stride);
  opt(r, "idm", [&](const Reader & v) {
    v.keys({"max_accel", "comfort_decel", "standstill_gap", "time_headway", "exponent",
            "corridor_margin", "catch_up_gain", "max_catch_up"});
    auto & i = s.idm;
    read_number(v, "max_accel", i.max_accel);
    read_number(v, "comfort_decel", i.comfort_decel);
    read_number(v, "standstill_gap", i.standstill_gap);
    read_number(v, "time_headway", i.time_headway);
    read_number(v, "exponent", i.exponent);
    read_number(v, "corridor_margin", i.corridor_margin);
    read_number(v, "catch_up_gain", i.catch_up_gain);
    read_number(v, "max_catch_up", i.max_catch_up);
  });
  opt(r, "events", [&](const Reader & v) {
    v.keys({"collision_distance", "close_call_distance", "ttc", "headway", "headway_min_speed",
            "path_margin", "jerk", "passiveness_speed", "off_road"});
    auto & e = s.events;
    read_number(v, "collision_distance", e.collision_distance);
    read_number(v, "close_call_distance", e.close_call_distance);
    read_number(v, "ttc", e.ttc);
    read_number(v, "headway", e.headway);
    read_number(v, "headway_min_speed", e.headway_min_speed);
    read_number(v, "path_margin", e.path_margin);
    read_number(v, "jerk", e.jerk);
    read_number(v, "passiveness_speed", e.passiveness_speed);
    read_number(v, "off_road", e.off_road);
  });
}

}  // namespace

void RunConfig::finalize()
{
  training.shape.steps = dataset.steps;
  training.shape.dt = scenario.dt;
  training.workers = workers;
  sim.fallback.dt = scenario.dt;
  sim.history_ticks = dataset.history_ticks;
  scenario.validate();
  training.validate();
  sim.validate();
  if (!(data_fraction > 0.0 && data_fraction <= 1.0)) {
    throw std::invalid_argument("data_fraction must be in (0, 1]");
  }
  if (workers <= 0) throw std::invalid_argument("workers must be positive");
  if (dataset.steps <= 0 || dataset.stride == 0) {
    throw std::invalid_argument("dataset steps and stride must be positive");
  }
}

RunConfig run_config_from_json(const std::string & text)
{
  const json doc = detail::parse_document(text, "config");
  const Reader r(doc, "config");
  if (!doc.is_object()) throw ParseError("config: expected an object");
  if (r.has("version") && r["version"].integer() != kConfigVersion) {
    throw VersionError("config: unsupported version " + std::to_string(r["version"].integer()));
  }
  r.keys({"version", "scenario", "dataset", "training", "fallback", "simulator", "workers", "out"});
  RunConfig cfg;
  opt(r, "scenario", [&](const Reader & v) { read_scenario(v, cfg.scenario); });
  opt(r, "dataset", [&](const Reader & v) {
    v.keys({"steps", "stride", "history_ticks", "max_samples"});
    read_int(v, "steps", cfg.dataset.steps);
    read_size(v, "stride", cfg.dataset.stride);
    read_size(v, "history_ticks", cfg.dataset.history_ticks);
    read_size(v, "max_samples", cfg.dataset.max_samples);
  });
  opt(r, "training", [&](const Reader & v) { read_training(v, cfg); });
  opt(r, "fallback", [&](const Reader & v) { read_fallback(v, cfg.sim.fallback, cfg.sim.fallback_enabled); });
  opt(r, "simulator", [&](const Reader & v) { read_simulator(v, cfg.sim); });
  read_int(r, "workers", cfg.workers);
  opt(r, "out", [&](const Reader & v) { cfg.out = v.string(); });
  cfg.finalize();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path & path)
{
  return run_config_from_json(detail::read_file(path));
}

std::string to_json(const RunConfig & cfg)
{
  const auto & t = cfg.training;
  const auto & e = t.encoder;
  const auto & s = cfg.sim;
  json doc = {
    {"version", kConfigVersion},
    {"scenario", scenario_json(cfg.scenario)},
    {"dataset",
     {{"steps", cfg.dataset.steps},
      {"stride", cfg.dataset.stride},
      {"history_ticks", cfg.dataset.history_ticks},
      {"max_samples", cfg.dataset.max_samples}}},
    {"training",
     {{"hidden", t.shape.hidden},
      {"j_scale", t.shape.j_scale},
      {"k_scale", t.shape.k_scale},
      {"learning_rate", t.learning_rate},
      {"batch_size", t.batch_size},
      {"epochs", t.epochs},
      {"seed", t.seed},
      {"alpha", t.loss.alpha},
      {"beta", t.loss.beta},
      {"theta_weight", t.loss.theta_weight},
      {"perturbation",
       {{"probability", t.perturbation.probability},
        {"max_lateral", t.perturbation.max_lateral},
        {"max_heading", t.perturbation.max_heading}}},
      {"data_fraction", cfg.data_fraction},
      {"subset_seed", cfg.subset_seed},
      {"encoder",
       {{"history_depth", e.history_depth},
        {"history_step", e.history_step},
        {"max_agents", e.max_agents},
        {"max_lanes", e.max_lanes},
        {"max_crosswalks", e.max_crosswalks},
        {"max_stop_lines", e.max_stop_lines},
        {"range", e.range}}}}},
    {"fallback", fallback_json(s.fallback, s.fallback_enabled)},
    {"simulator",
     {{"noise_j", s.noise_j},
      {"noise_k", s.noise_k},
      {"seed", s.seed},
      {"reactive_agents", s.reactive_agents},
      {"record_decisions", s.record_decisions},
      {"ade_horizons", s.ade_horizons},
      {"ade_stride", s.ade_stride},
      {"idm",
       {{"max_accel", s.idm.max_accel},
        {"comfort_decel", s.idm.comfort_decel},
        {"standstill_gap", s.idm.standstill_gap},
        {"time_headway", s.idm.time_headway},
        {"exponent", s.idm.exponent},
        {"corridor_margin", s.idm.corridor_margin},
        {"catch_up_gain", s.idm.catch_up_gain},
        {"max_catch_up", s.idm.max_catch_up}}},
      {"events",
       {{"collision_distance", s.events.collision_distance},
        {"close_call_distance", s.events.close_call_distance},
        {"ttc", s.events.ttc},
        {"headway", s.events.headway},
        {"headway_min_speed", s.events.headway_min_speed},
        {"path_margin", s.events.path_margin},
        {"jerk", s.events.jerk},
        {"passiveness_speed", s.events.passiveness_speed},
        {"off_road", s.events.off_road}}}}},
    {"workers", cfg.workers},
    {"out", cfg.out},
  };
  return doc.dump(2) + "\n";
}

}  // namespace hybridplan
