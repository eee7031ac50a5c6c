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


// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 unless --strict is given
// and some criterion fails.

#include "hybridplan/hybridplan.h"
#include "properties.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace
{

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Line
{
  std::string id;
  bool pass{false};
  std::string detail;
};

void check(hp_status st, const char * what)
{
  if (st != HP_OK) {
    throw std::runtime_error(std::string(what) + ": " + hp_status_string(st) + ": " + hp_last_error());
  }
}

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_bytes(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(const char * f, double a = 0, double b = 0, double c = 0, double d = 0)
{
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

/// Owning wrappers over the C handles.
struct Config
{
  hp_config * p{nullptr};
  explicit Config(const std::string & json) { check(hp_config_from_json(json.c_str(), &p), "config"); }
  ~Config() { hp_config_free(p); }
};
struct Scenes
{
  hp_scene_set * p{nullptr};
  explicit Scenes(const Config & c) { check(hp_scenes_generate(c.p, &p), "gen"); }
  ~Scenes() { hp_scene_set_free(p); }
};
struct Model
{
  hp_model * p{nullptr};
  Model(const Config & c, const Scenes & s) { check(hp_model_train(c.p, s.p, &p), "train"); }
  ~Model() { hp_model_free(p); }
};

// 13 scenes per template at 22 samples per scene, capped at 2000.
std::string training_config(double fraction)
{
  return R"({
    "scenario": {"counts": {"straight-follow": 13, "lead-braking": 13, "signalized-intersection": 13,
                            "stop-sign": 13, "pedestrian-crossing": 13, "parked-car-nudge": 13,
                            "oncoming-traffic": 13}, "seed": 1},
    "dataset": {"max_samples": 2000},
    "training": {"hidden": 64, "epochs": 30, "seed": 3, "data_fraction": )" +
         fmt("%.4f", fraction) + R"(, "subset_seed": 17}
  })";
}

std::string ablation_config(bool fallback, int workers, const std::string & counts)
{
  return R"({
    "scenario": {"counts": )" + counts + R"(, "seed": 99},
    "training": {"hidden": 64},
    "fallback": {"enabled": )" + std::string(fallback ? "true" : "false") + R"(},
    "simulator": {"noise_j": 1.0, "noise_k": 0.02, "seed": 5},
    "workers": )" + std::to_string(workers) + "}";
}

const char * kSuite200 =
  R"({"straight-follow": 29, "lead-braking": 29, "signalized-intersection": 29, "stop-sign": 29,
      "pedestrian-crossing": 28, "parked-car-nudge": 28, "oncoming-traffic": 28})";
const char * kSuite14 =
  R"({"straight-follow": 2, "lead-braking": 2, "signalized-intersection": 2, "stop-sign": 2,
      "pedestrian-crossing": 2, "parked-car-nudge": 2, "oncoming-traffic": 2})";

nlohmann::json simulate(const std::string & cfg_json, const Model & model, const fs::path & dir)
{
  Config cfg(cfg_json);
  Scenes scenes(cfg);
  check(hp_simulate(cfg.p, scenes.p, model.p, dir.c_str(), 0, nullptr), "sim");
  return nlohmann::json::parse(read_bytes(dir / "report.json"));
}

double reduction(double off, double on)
{
  return off > 0.0 ? (off - on) / off : 0.0;
}

struct Ablation
{
  nlohmann::json off, on;
  double seconds{0.0};
};

Ablation run_ablation(const fs::path & work)
{
  const auto t0 = Clock::now();
  Config train_cfg(training_config(0.01));
  Scenes train_scenes(train_cfg);
  Model model(train_cfg, train_scenes);
  Ablation a;
  a.off = simulate(ablation_config(false, 1, kSuite200), model, work / "ac1_off");
  a.on = simulate(ablation_config(true, 1, kSuite200), model, work / "ac1_on");
  a.seconds = seconds_since(t0);
  return a;
}

Line ac1(const Ablation & a)
{
  const auto & off = a.off["rates_per_1000_miles"];
  const auto & on = a.on["rates_per_1000_miles"];
  const double c_off = off["collision"], c_on = on["collision"];
  const double d_off = off["discomfort-braking"], d_on = on["discomfort-braking"];
  const double p_off = off["passiveness"], p_on = on["passiveness"];
  const bool collisions = c_off > 0.0 && reduction(c_off, c_on) >= 0.8;
  const bool discomfort = d_off > 0.0 && reduction(d_off, d_on) >= 0.5;
  const bool passive = p_on >= p_off;
  const bool fast = a.seconds <= 300.0;
  Line l{"AC1", collisions && discomfort && passive && fast, ""};
  l.detail = fmt("collisions/1k mi %.1f -> %.1f (%.0f%%)", c_off, c_on, 100.0 * reduction(c_off, c_on)) +
             fmt("; discomfort %.1f -> %.1f", d_off, d_on) +
             (d_off > 0.0 ? fmt(" (%.0f%%)", 100.0 * reduction(d_off, d_on)) : std::string(" (no baseline events)")) +
             fmt("; passiveness %.1f -> %.1f", p_off, p_on) + fmt("; %.0f s", a.seconds) +
             fmt("; events off/on %.0f/%.0f collisions", a.off["events"]["collision"].get<double>(),
                 a.on["events"]["collision"].get<double>());
  return l;
}

Line ac2()
{
  const auto t0 = Clock::now();
  Config held_cfg(R"({
    "scenario": {"counts": {"straight-follow": 3, "lead-braking": 3, "signalized-intersection": 3,
                            "stop-sign": 3, "pedestrian-crossing": 3, "parked-car-nudge": 3,
                            "oncoming-traffic": 3}, "seed": 2}
  })");
  Scenes held(held_cfg);
  std::vector<double> ade4;
  for (const double f : {0.01, 0.1, 1.0}) {
    Config cfg(training_config(f));
    Scenes scenes(cfg);
    Model model(cfg, scenes);
    double ade[4] = {};
    check(hp_model_evaluate_ade(model.p, cfg.p, held.p, ade, 4), "ade");
    ade4.push_back(ade[3]);
  }
  const double secs = seconds_since(t0);
  const bool ok = ade4[0] > ade4[1] && ade4[1] > ade4[2] && secs <= 600.0;
  return {"AC2", ok, fmt("ADE@4s 1%%/10%%/100%% = %.3f / %.3f / %.3f m; %.0f s", ade4[0], ade4[1], ade4[2], secs)};
}

Line from_property(const std::string & id, const hybridplan::testing::PropertyResult & r)
{
  return {id, r.pass(), r.detail + fmt(" (%.0f cases)", static_cast<double>(r.cases))};
}

Line ac8(const fs::path & work)
{
  Config train_cfg(training_config(0.01));
  Scenes train_scenes(train_cfg);
  Model model(train_cfg, train_scenes);
  simulate(ablation_config(true, 1, kSuite14), model, work / "ac8_w1");
  simulate(ablation_config(true, 3, kSuite14), model, work / "ac8_w3");
  bool same = true;
  std::string which;
  for (const char * f : {"report.json", "events.csv", "decisions.log"}) {
    const bool eq = read_bytes(work / "ac8_w1" / f) == read_bytes(work / "ac8_w3" / f);
    same = same && eq;
    which += std::string(f) + (eq ? " identical; " : " differs; ");
  }
  return {"AC8", same, which + "workers 1 vs 3"};
}

Line ac9(const nlohmann::json & on)
{
  const bool has_usage = on.contains("fallback_usage") && on["fallback_usage"].is_number();
  std::size_t hist = 0;
  for (const auto & [cause, n] : on["trigger_histogram"].items()) hist += n.get<std::size_t>();
  const auto & ticks = on["ticks"];
  const std::size_t total = ticks["total"], ml = ticks["ml"];
  const std::size_t non_ml = ticks["candidate"].get<std::size_t>() + ticks["emergency_stop"].get<std::size_t>();
  const double usage = has_usage ? on["fallback_usage"].get<double>() : -1.0;
  const bool ok = has_usage && hist == non_ml && total == ml + non_ml &&
                  std::abs(usage - static_cast<double>(non_ml) / static_cast<double>(total)) < 1e-12;
  return {"AC9", ok, fmt("fallback usage %.4f; histogram total %.0f; non-ML ticks %.0f", usage,
                         static_cast<double>(hist), static_cast<double>(non_ml))};
}

}  // namespace

int main(int argc, char ** argv)
{
  bool strict = false;
  std::vector<std::string> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) {
      strict = true;
    } else {
      only.emplace_back(argv[i]);
    }
  }
  auto wanted = [&](const std::string & id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
  };
  const fs::path work = fs::temp_directory_path() / "hybridplan_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  int failures = 0;
  auto emit = [&](const std::function<Line()> & f, const std::string & id) {
    if (!wanted(id)) return;
    Line l;
    const auto t0 = Clock::now();
    try {
      l = f();
    } catch (const std::exception & e) {
      l = {id, false, std::string("error: ") + e.what()};
    }
    failures += l.pass ? 0 : 1;
    std::printf("%s %s: %s [%.1f s]\n", l.id.c_str(), l.pass ? "PASS" : "FAIL", l.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  };

  Ablation ablation;
  bool have_ablation = false;
  auto get_ablation = [&]() -> const Ablation & {
    if (!have_ablation) {
      ablation = run_ablation(work);
      have_ablation = true;
    }
    return ablation;
  };

  emit([&] { return ac1(get_ablation()); }, "AC1");
  emit([] { return ac2(); }, "AC2");
  emit([] { return from_property("AC3", hybridplan::testing::gradient_property(10)); }, "AC3");
  emit([] { return from_property("AC4", hybridplan::testing::clip_feasibility_property(1000)); }, "AC4");
  emit([] { return from_property("AC5", hybridplan::testing::selection_property(1000)); }, "AC5");
  emit([] { return from_property("AC6", hybridplan::testing::raster_property(1000)); }, "AC6");
  emit([] { return from_property("AC7", hybridplan::testing::event_boundary_property()); }, "AC7");
  emit([&] { return ac8(work); }, "AC8");
  emit([&] { return ac9(get_ablation().on); }, "AC9");

  fs::remove_all(work);
  return strict && failures > 0 ? 1 : 0;
}
