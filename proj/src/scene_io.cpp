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


#include "hybridplan/scene_io.hpp"

#include "json_util.hpp"

#include <cstdio>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hybridplan::scene_io
{

using json = nlohmann::json;
using detail::Reader;

namespace
{

json vec2(const Vec2 & p) { return json::array({p.x, p.y}); }

json points(const std::vector<Vec2> & pts)
{
  json out = json::array();
  for (const auto & p : pts) out.push_back(vec2(p));
  return out;
}

json size_json(const VehicleSize & s)
{
  return {{"length", s.length}, {"width", s.width}, {"rear_axle_offset", s.rear_axle_offset}};
}

const char * control_name(StopControl c) { return c == StopControl::kLight ? "light" : "stop_sign"; }

json map_json(const MapModel & m)
{
  json lanes = json::array();
  for (const auto & l : m.lanes) {
    lanes.push_back({{"id", l.id}, {"centerline", points(l.centerline.points())}, {"width", l.width},
                     {"successors", l.successors}});
  }
  json crosswalks = json::array();
  for (const auto & c : m.crosswalks) {
    crosswalks.push_back({{"id", c.id}, {"polygon", points(c.area.vertices())}});
  }
  json lines = json::array();
  for (const auto & s : m.stop_lines) {
    lines.push_back({{"id", s.id}, {"a", vec2(s.a)}, {"b", vec2(s.b)}, {"heading", s.heading},
                     {"control", control_name(s.control)}, {"light_id", s.light_id}});
  }
  json lights = json::array();
  for (const auto & l : m.lights) lights.push_back({{"id", l.id}, {"stop_line_id", l.stop_line_id}});
  json drivable = json::array();
  for (const auto & p : m.drivable) drivable.push_back(points(p.vertices()));
  json zones = json::array();
  for (const auto & z : m.conflict_zones) {
    zones.push_back({{"id", z.id}, {"polygon", points(z.area.vertices())},
                     {"priority_lanes", z.priority_lanes}, {"pedestrian_priority", z.pedestrian_priority}});
  }
  return {{"lanes", lanes},
          {"crosswalks", crosswalks},
          {"stop_lines", lines},
          {"lights", lights},
          {"drivable", drivable},
          {"conflict_zones", zones},
          {"route", m.route},
          {"route_centerline", m.route_centerline.empty() ? json::array() : points(m.route_centerline.points())}};
}

Vec2 read_vec2(const Reader & r)
{
  const auto a = r.array(2, 2);
  return {a[0].number(), a[1].number()};
}

std::vector<Vec2> read_points(const Reader & r, std::size_t min_count)
{
  std::vector<Vec2> out;
  for (const auto & e : r.array(min_count)) out.push_back(read_vec2(e));
  return out;
}

Polyline read_polyline(const Reader & r)
{
  try {
    return Polyline(read_points(r, 2));
  } catch (const std::invalid_argument & e) {
    throw ParseError(r.path() + ": " + e.what());
  }
}

Polygon read_polygon(const Reader & r) { return Polygon(read_points(r, 3)); }

std::vector<int> read_ints(const Reader & r)
{
  std::vector<int> out;
  for (const auto & e : r.array()) out.push_back(e.integer());
  return out;
}

MapModel read_map(const Reader & r)
{
  r.keys({"lanes", "crosswalks", "stop_lines", "lights", "drivable", "conflict_zones", "route",
          "route_centerline"});
  MapModel m;
  for (const auto & l : r["lanes"].array()) {
    l.keys({"id", "centerline", "width", "successors"});
    Lane lane;
    lane.id = l["id"].integer();
    lane.centerline = read_polyline(l["centerline"]);
    lane.width = l["width"].positive();
    lane.successors = read_ints(l["successors"]);
    m.lanes.push_back(std::move(lane));
  }
  for (const auto & c : r["crosswalks"].array()) {
    c.keys({"id", "polygon"});
    m.crosswalks.push_back({c["id"].integer(), read_polygon(c["polygon"])});
  }
  for (const auto & s : r["stop_lines"].array()) {
    s.keys({"id", "a", "b", "heading", "control", "light_id"});
    StopLine line;
    line.id = s["id"].integer();
    line.a = read_vec2(s["a"]);
    line.b = read_vec2(s["b"]);
    line.heading = s["heading"].number();
    const std::string ctl = s["control"].string();
    if (ctl == "light") {
      line.control = StopControl::kLight;
    } else if (ctl == "stop_sign") {
      line.control = StopControl::kStopSign;
    } else {
      throw ParseError(s["control"].path() + ": expected \"light\" or \"stop_sign\"");
    }
    line.light_id = s["light_id"].integer();
    m.stop_lines.push_back(line);
  }
  for (const auto & l : r["lights"].array()) {
    l.keys({"id", "stop_line_id"});
    m.lights.push_back({l["id"].integer(), l["stop_line_id"].integer()});
  }
  for (const auto & d : r["drivable"].array()) m.drivable.push_back(read_polygon(d));
  for (const auto & z : r["conflict_zones"].array()) {
    z.keys({"id", "polygon", "priority_lanes", "pedestrian_priority"});
    ConflictZone zone;
    zone.id = z["id"].integer();
    zone.area = read_polygon(z["polygon"]);
    zone.priority_lanes = read_ints(z["priority_lanes"]);
    zone.pedestrian_priority = z["pedestrian_priority"].boolean();
    m.conflict_zones.push_back(std::move(zone));
  }
  m.route = read_ints(r["route"]);
  if (!r["route_centerline"].array().empty()) {
    m.route_centerline = read_polyline(r["route_centerline"]);
  }
  try {
    m.finalize();
  } catch (const std::invalid_argument & e) {
    throw ParseError(r.path() + ": " + e.what());
  }
  return m;
}

}  // namespace

std::string to_json(const Scene & scene)
{
  json ego_states = json::array();
  for (const auto & s : scene.ego_states) {
    ego_states.push_back(json::array({s.x, s.y, s.theta, s.v, s.a, s.k, s.j}));
  }
  json agents = json::array();
  for (const auto & a : scene.agents) {
    json states = json::array();
    for (std::size_t i = 0; i < a.times.size(); ++i) {
      states.push_back(
        json::array({a.times[i], a.poses[i].x, a.poses[i].y, a.poses[i].theta, a.speeds[i]}));
    }
    agents.push_back({{"id", a.id},
                      {"type", to_string(a.type)},
                      {"size", {{"length", a.length}, {"width", a.width}}},
                      {"lane_id", a.lane_id},
                      {"states", states}});
  }
  json obstacles = json::array();
  for (const auto & o : scene.static_obstacles) {
    obstacles.push_back(
      {{"center", vec2(o.center)}, {"heading", o.heading}, {"length", o.length}, {"width", o.width}});
  }
  json schedule = json::array();
  for (const auto & e : scene.light_schedule) {
    schedule.push_back({{"time", e.time}, {"light_id", e.light_id}, {"state", to_string(e.state)}});
  }
  const json doc = {
    {"version", kSceneVersion},
    {"units", detail::units_json()},
    {"id", scene.id},
    {"dt", scene.dt},
    {"map", map_json(scene.map)},
    {"ego", {{"size", size_json(scene.ego_size)}, {"states", ego_states}}},
    {"agents", agents},
    {"static_obstacles", obstacles},
    {"lights_schedule", schedule}};
  return doc.dump(1);
}

Scene from_json(const std::string & text)
{
  const json doc = detail::parse_document(text, "scene");
  const Reader r(doc, "scene");
  if (!doc.is_object()) throw ParseError("scene: expected an object");
  const int version = r["version"].integer();
  if (version != kSceneVersion) {
    throw VersionError(
      "scene: unsupported version " + std::to_string(version) + " (expected " +
      std::to_string(kSceneVersion) + ")");
  }
  r.keys({"version", "units", "id", "dt", "map", "ego", "agents", "static_obstacles", "lights_schedule"});
  detail::check_units(r["units"]);
  Scene s;
  s.id = r["id"].string();
  s.dt = r["dt"].positive();
  s.map = read_map(r["map"]);

  const Reader ego = r["ego"];
  ego.keys({"size", "states"});
  const Reader size = ego["size"];
  size.keys({"length", "width", "rear_axle_offset"});
  s.ego_size = {size["length"].positive(), size["width"].positive(), size["rear_axle_offset"].number()};
  for (const auto & e : ego["states"].array()) {
    const auto v = e.array(7, 7);
    TrajState st{v[0].number(), v[1].number(), v[2].number(), v[3].number(),
                 v[4].number(), v[5].number(), v[6].number()};
    if (st.v < 0.0) throw ParseError(v[3].path() + ": speed must be non-negative");
    s.ego_states.push_back(st);
  }

  for (const auto & a : r["agents"].array()) {
    a.keys({"id", "type", "size", "lane_id", "states"});
    AgentTrack t;
    t.id = a["id"].integer();
    try {
      t.type = agent_type_from_string(a["type"].string());
    } catch (const ParseError & e) {
      throw ParseError(a["type"].path() + ": " + e.what());
    }
    const Reader as = a["size"];
    as.keys({"length", "width"});
    t.length = as["length"].positive();
    t.width = as["width"].positive();
    t.lane_id = a["lane_id"].integer();
    for (const auto & e : a["states"].array()) {
      const auto v = e.array(5, 5);
      t.times.push_back(v[0].number());
      t.poses.push_back({v[1].number(), v[2].number(), v[3].number()});
      t.speeds.push_back(v[4].number());
    }
    try {
      t.validate();
    } catch (const std::invalid_argument & e) {
      throw ParseError(a.path() + ": " + e.what());
    }
    s.agents.push_back(std::move(t));
  }
  for (const auto & o : r["static_obstacles"].array()) {
    o.keys({"center", "heading", "length", "width"});
    s.static_obstacles.push_back(
      {read_vec2(o["center"]), o["heading"].number(), o["length"].positive(), o["width"].positive()});
  }
  for (const auto & e : r["lights_schedule"].array()) {
    e.keys({"time", "light_id", "state"});
    LightEvent ev;
    ev.time = e["time"].number();
    ev.light_id = e["light_id"].integer();
    try {
      ev.state = light_state_from_string(e["state"].string());
    } catch (const ParseError & err) {
      throw ParseError(e["state"].path() + ": " + err.what());
    }
    s.light_schedule.push_back(ev);
  }
  return s;
}

void save_scene(const Scene & scene, const std::filesystem::path & path)
{
  detail::write_file(path, to_json(scene) + "\n");
}

Scene load_scene(const std::filesystem::path & path)
{
  return from_json(detail::read_file(path));
}

void save_suite(const std::vector<Scene> & scenes, const std::filesystem::path & dir)
{
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04zu.json", i);
    save_scene(scenes[i], dir / name);
  }
}

std::vector<Scene> load_dir(const std::filesystem::path & dir)
{
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("scene directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto & e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Scene> out;
  out.reserve(files.size());
  for (const auto & f : files) {
    try {
      out.push_back(load_scene(f));
    } catch (const ParseError & e) {
      throw ParseError(f.filename().string() + ": " + e.what());
    } catch (const VersionError & e) {
      throw VersionError(f.filename().string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace hybridplan::scene_io
