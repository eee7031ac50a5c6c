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


// Exercises the shared library through its C header only.

#include "hybridplan/hybridplan.h"

#include <doctest.h>

#include <filesystem>
#include <string>

namespace
{

const char * kSmallConfig = R"({
  "scenario": {"counts": {"lead-braking": 1, "stop-sign": 1}, "seed": 4},
  "training": {"hidden": 8, "epochs": 1},
  "simulator": {"noise_j": 1.0, "noise_k": 0.02}
})";

std::filesystem::path temp_dir(const std::string & name)
{
  const auto p = std::filesystem::temp_directory_path() / ("hybridplan_capi_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("null arguments and error strings")
{
  CHECK(hp_config_default(nullptr) == HP_ERR_NULL_ARGUMENT);
  CHECK(std::string(hp_last_error()).find("null") != std::string::npos);
  CHECK(hp_scenes_count(nullptr, nullptr) == HP_ERR_NULL_ARGUMENT);
  CHECK(std::string(hp_status_string(HP_ERR_PARSE)) == "parse error");
  CHECK(std::string(hp_version()).size() > 0);
  hp_config_free(nullptr);
  hp_report_free(nullptr);
}

TEST_CASE("config errors map to status codes")
{
  hp_config * cfg = nullptr;
  CHECK(hp_config_from_json("{", &cfg) == HP_ERR_PARSE);
  CHECK(cfg == nullptr);
  CHECK(std::string(hp_last_error()).size() > 0);
  CHECK(hp_config_from_json(R"({"unknown": 1})", &cfg) == HP_ERR_PARSE);
  CHECK(hp_config_from_json(R"({"version": 9})", &cfg) == HP_ERR_VERSION);
  CHECK(hp_config_load("/nonexistent/config.json", &cfg) == HP_ERR_IO);

  REQUIRE(hp_config_default(&cfg) == HP_OK);
  CHECK(std::string(hp_last_error()).empty());
  CHECK(hp_config_set_data_fraction(cfg, 2.0) == HP_ERR_INVALID_ARGUMENT);
  CHECK(hp_config_set_workers(cfg, 0) == HP_ERR_INVALID_ARGUMENT);
  CHECK(hp_config_set_prediction_mode(cfg, "psychic") == HP_ERR_PARSE);
  CHECK(hp_config_set_prediction_mode(cfg, "log-replay") == HP_OK);
  CHECK(hp_config_set_out(cfg, "elsewhere") == HP_OK);
  char * out = nullptr;
  REQUIRE(hp_config_get_out(cfg, &out) == HP_OK);
  CHECK(std::string(out) == "elsewhere");
  hp_string_free(out);
  char * json = nullptr;
  REQUIRE(hp_config_to_json(cfg, &json) == HP_OK);
  CHECK(std::string(json).find("log-replay") != std::string::npos);
  hp_string_free(json);
  hp_config_free(cfg);
}

TEST_CASE("generate, train, simulate and report")
{
  hp_config * cfg = nullptr;
  REQUIRE(hp_config_from_json(kSmallConfig, &cfg) == HP_OK);
  hp_scene_set * scenes = nullptr;
  REQUIRE(hp_scenes_generate(cfg, &scenes) == HP_OK);
  size_t n = 0;
  REQUIRE(hp_scenes_count(scenes, &n) == HP_OK);
  CHECK(n == 2);

  const auto dir = temp_dir("run");
  REQUIRE(hp_scenes_save_dir(scenes, (dir / "scenes").c_str()) == HP_OK);
  hp_scene_set * loaded = nullptr;
  REQUIRE(hp_scenes_load_dir((dir / "scenes").c_str(), &loaded) == HP_OK);
  REQUIRE(hp_scenes_count(loaded, &n) == HP_OK);
  CHECK(n == 2);

  hp_model * model = nullptr;
  REQUIRE(hp_model_train(cfg, loaded, &model) == HP_OK);
  REQUIRE(hp_model_save(model, (dir / "w.bin").c_str()) == HP_OK);
  REQUIRE(hp_model_write_loss_csv(model, (dir / "loss.csv").c_str()) == HP_OK);
  hp_model * reloaded = nullptr;
  REQUIRE(hp_model_load((dir / "w.bin").c_str(), &reloaded) == HP_OK);
  CHECK(hp_model_write_loss_csv(reloaded, (dir / "x.csv").c_str()) == HP_ERR_INVALID_ARGUMENT);
  double ade[4] = {};
  REQUIRE(hp_model_evaluate_ade(reloaded, cfg, loaded, ade, 4) == HP_OK);
  CHECK(ade[3] >= ade[0]);

  hp_report * rep = nullptr;
  REQUIRE(hp_simulate(cfg, loaded, reloaded, (dir / "sim").c_str(), 1, &rep) == HP_OK);
  CHECK(std::filesystem::exists(dir / "sim" / "report.json"));
  CHECK(std::filesystem::exists(dir / "sim" / "events.csv"));
  CHECK(std::filesystem::exists(dir / "sim" / "decisions.log"));
  CHECK(std::filesystem::is_directory(dir / "sim" / "traces"));

  double usage = -1.0;
  size_t non_ml = 0, total = 0, collisions = 0;
  REQUIRE(hp_report_fallback_usage(rep, &usage) == HP_OK);
  REQUIRE(hp_report_non_ml_ticks(rep, &non_ml) == HP_OK);
  REQUIRE(hp_report_trigger_total(rep, &total) == HP_OK);
  CHECK(usage >= 0.0);
  CHECK(usage <= 1.0);
  CHECK(total == non_ml);
  CHECK(hp_report_event_count(rep, "collision", &collisions) == HP_OK);
  CHECK(hp_report_event_count(rep, "explosion", &collisions) == HP_ERR_INVALID_ARGUMENT);
  double rate = -1.0;
  CHECK(hp_report_rate(rep, "off-road", &rate) == HP_OK);
  CHECK(rate >= 0.0);

  hp_report * loaded_rep = nullptr;
  REQUIRE(hp_report_load((dir / "sim" / "report.json").c_str(), &loaded_rep) == HP_OK);
  char * a = nullptr;
  char * b = nullptr;
  REQUIRE(hp_report_to_json(rep, &a) == HP_OK);
  REQUIRE(hp_report_to_json(loaded_rep, &b) == HP_OK);
  CHECK(std::string(a) == std::string(b));
  hp_string_free(a);
  hp_string_free(b);

  const hp_report * both[] = {rep, loaded_rep};
  hp_report * merged = nullptr;
  REQUIRE(hp_report_merge(both, 2, "merged", &merged) == HP_OK);
  char * table = nullptr;
  REQUIRE(hp_report_compare(both, 2, &table) == HP_OK);
  CHECK(std::string(table).find("trigger histogram") != std::string::npos);
  hp_string_free(table);

  CHECK(hp_report_load((dir / "missing.json").c_str(), &loaded_rep) == HP_ERR_IO);

  hp_report_free(merged);
  hp_report_free(loaded_rep);
  hp_report_free(rep);
  hp_model_free(reloaded);
  hp_model_free(model);
  hp_scene_set_free(loaded);
  hp_scene_set_free(scenes);
  hp_config_free(cfg);
  std::filesystem::remove_all(dir);
}

TEST_CASE("mismatched model shape is rejected")
{
  hp_config * cfg = nullptr;
  REQUIRE(hp_config_from_json(kSmallConfig, &cfg) == HP_OK);
  hp_config * other = nullptr;
  REQUIRE(hp_config_from_json(R"({"scenario": {"counts": {"stop-sign": 1}}, "dataset": {"steps": 20},
                                  "training": {"hidden": 8, "epochs": 1}})", &other) == HP_OK);
  hp_scene_set * scenes = nullptr;
  REQUIRE(hp_scenes_generate(other, &scenes) == HP_OK);
  hp_model * model = nullptr;
  REQUIRE(hp_model_train(other, scenes, &model) == HP_OK);
  const auto dir = temp_dir("mismatch");
  CHECK(hp_simulate(cfg, scenes, model, dir.c_str(), 0, nullptr) == HP_ERR_INVALID_ARGUMENT);
  hp_model_free(model);
  hp_scene_set_free(scenes);
  hp_config_free(other);
  hp_config_free(cfg);
  std::filesystem::remove_all(dir);
}
