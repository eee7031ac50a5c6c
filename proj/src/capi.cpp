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


#include "hybridplan/hybridplan.h"

#include "hybridplan/config.hpp"
#include "hybridplan/report.hpp"
#include "hybridplan/scene_io.hpp"
#include "hybridplan/simulator.hpp"
#include "hybridplan/training.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace hp = hybridplan;

struct hp_config
{
  hp::RunConfig cfg;
};

struct hp_scene_set
{
  std::vector<std::shared_ptr<const hp::Scene>> scenes;
};

struct hp_model
{
  hp::policy::PolicyParams params;
  std::vector<double> epoch_loss;
  bool trained{false};
};

struct hp_report
{
  hp::report::SimReport report;
};

namespace
{

thread_local std::string g_last_error;

template <class F>
hp_status guarded(F && f)
{
  try {
    f();
    g_last_error.clear();
    return HP_OK;
  } catch (const hp::ParseError & e) {
    g_last_error = e.what();
    return HP_ERR_PARSE;
  } catch (const hp::VersionError & e) {
    g_last_error = e.what();
    return HP_ERR_VERSION;
  } catch (const hp::IoError & e) {
    g_last_error = e.what();
    return HP_ERR_IO;
  } catch (const std::invalid_argument & e) {
    g_last_error = e.what();
    return HP_ERR_INVALID_ARGUMENT;
  } catch (const std::exception & e) {
    g_last_error = e.what();
    return HP_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return HP_ERR_RUNTIME;
  }
}

template <class... Ptrs>
hp_status require(const char * fn, Ptrs... ptrs)
{
  if (((ptrs == nullptr) || ...)) {
    g_last_error = std::string(fn) + ": null argument";
    return HP_ERR_NULL_ARGUMENT;
  }
  return HP_OK;
}

char * dup_string(const std::string & s)
{
  char * out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) {
    throw std::bad_alloc();
  }
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

hp::sim::EventKind kind_from_string(const char * kind)
{
  for (std::size_t k = 0; k < hp::sim::kNumEventKinds; ++k) {
    const auto e = static_cast<hp::sim::EventKind>(k);
    if (std::strcmp(hp::sim::to_string(e), kind) == 0) {
      return e;
    }
  }
  throw std::invalid_argument(std::string("unknown event kind: ") + kind);
}

void write_text(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) {
    throw hp::IoError("cannot write " + path.string());
  }
}

std::vector<hp::policy::TrainingSample> dataset_of(const hp::RunConfig & cfg, const hp_scene_set & s)
{
  return hp::policy::build_dataset(s.scenes, cfg.dataset);
}

}  // namespace

#define HP_REQUIRE(...) \
  if (hp_status st = require(__func__, __VA_ARGS__); st != HP_OK) return st

extern "C" {

const char * hp_version(void)
{
  return "0.1.0";
}

const char * hp_last_error(void)
{
  return g_last_error.c_str();
}

const char * hp_status_string(hp_status status)
{
  switch (status) {
    case HP_OK: return "ok";
    case HP_ERR_NULL_ARGUMENT: return "null argument";
    case HP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HP_ERR_PARSE: return "parse error";
    case HP_ERR_VERSION: return "version error";
    case HP_ERR_IO: return "io error";
    case HP_ERR_RUNTIME: return "runtime error";
  }
  return "unknown status";
}

void hp_string_free(char * s)
{
  std::free(s);
}

hp_status hp_config_default(hp_config ** out)
{
  HP_REQUIRE(out);
  return guarded([&] {
    auto c = std::make_unique<hp_config>();
    c->cfg.finalize();
    *out = c.release();
  });
}

hp_status hp_config_from_json(const char * text, hp_config ** out)
{
  HP_REQUIRE(text, out);
  return guarded([&] { *out = new hp_config{hp::run_config_from_json(text)}; });
}

hp_status hp_config_load(const char * path, hp_config ** out)
{
  HP_REQUIRE(path, out);
  return guarded([&] { *out = new hp_config{hp::load_run_config(path)}; });
}

hp_status hp_config_to_json(const hp_config * cfg, char ** out)
{
  HP_REQUIRE(cfg, out);
  return guarded([&] { *out = dup_string(hp::to_json(cfg->cfg)); });
}

hp_status hp_config_set_seed(hp_config * cfg, uint64_t seed)
{
  HP_REQUIRE(cfg);
  return guarded([&] {
    cfg->cfg.scenario.seed = seed;
    cfg->cfg.subset_seed = seed;
    cfg->cfg.training.seed = seed;
    cfg->cfg.sim.seed = seed;
  });
}

hp_status hp_config_set_out(hp_config * cfg, const char * dir)
{
  HP_REQUIRE(cfg, dir);
  return guarded([&] { cfg->cfg.out = dir; });
}

hp_status hp_config_set_fallback(hp_config * cfg, int enabled)
{
  HP_REQUIRE(cfg);
  return guarded([&] { cfg->cfg.sim.fallback_enabled = enabled != 0; });
}

hp_status hp_config_set_data_fraction(hp_config * cfg, double fraction)
{
  HP_REQUIRE(cfg);
  return guarded([&] {
    hp::RunConfig next = cfg->cfg;
    next.data_fraction = fraction;
    next.finalize();
    cfg->cfg = next;
  });
}

hp_status hp_config_set_workers(hp_config * cfg, int workers)
{
  HP_REQUIRE(cfg);
  return guarded([&] {
    hp::RunConfig next = cfg->cfg;
    next.workers = workers;
    next.finalize();
    cfg->cfg = next;
  });
}

hp_status hp_config_set_prediction_mode(hp_config * cfg, const char * mode)
{
  HP_REQUIRE(cfg, mode);
  return guarded([&] {
    const auto m = hp::prediction::mode_from_string(mode);
    cfg->cfg.sim.fallback.prediction_mode = m;
  });
}

hp_status hp_config_get_out(const hp_config * cfg, char ** out)
{
  HP_REQUIRE(cfg, out);
  return guarded([&] { *out = dup_string(cfg->cfg.out); });
}

void hp_config_free(hp_config * cfg)
{
  delete cfg;
}

hp_status hp_scenes_generate(const hp_config * cfg, hp_scene_set ** out)
{
  HP_REQUIRE(cfg, out);
  return guarded([&] {
    auto set = std::make_unique<hp_scene_set>();
    for (auto & s : hp::scenario::generate_suite(cfg->cfg.scenario, cfg->cfg.workers)) {
      set->scenes.push_back(std::make_shared<const hp::Scene>(std::move(s)));
    }
    *out = set.release();
  });
}

hp_status hp_scenes_load_dir(const char * dir, hp_scene_set ** out)
{
  HP_REQUIRE(dir, out);
  return guarded([&] {
    auto set = std::make_unique<hp_scene_set>();
    for (auto & s : hp::scene_io::load_dir(dir)) {
      set->scenes.push_back(std::make_shared<const hp::Scene>(std::move(s)));
    }
    *out = set.release();
  });
}

hp_status hp_scenes_save_dir(const hp_scene_set * scenes, const char * dir)
{
  HP_REQUIRE(scenes, dir);
  return guarded([&] {
    std::vector<hp::Scene> copy;
    copy.reserve(scenes->scenes.size());
    for (const auto & s : scenes->scenes) {
      copy.push_back(*s);
    }
    hp::scene_io::save_suite(copy, dir);
  });
}

hp_status hp_scenes_count(const hp_scene_set * scenes, size_t * out)
{
  HP_REQUIRE(scenes, out);
  *out = scenes->scenes.size();
  g_last_error.clear();
  return HP_OK;
}

void hp_scene_set_free(hp_scene_set * scenes)
{
  delete scenes;
}

hp_status hp_model_train(const hp_config * cfg, const hp_scene_set * scenes, hp_model ** out)
{
  HP_REQUIRE(cfg, scenes, out);
  return guarded([&] {
    const auto & c = cfg->cfg;
    const auto all = dataset_of(c, *scenes);
    const auto samples = hp::policy::subset(all, c.data_fraction, c.subset_seed);
    if (samples.empty()) {
      throw std::invalid_argument("training set is empty");
    }
    auto result = hp::policy::train(samples, c.training, c.sim.fallback.limits);
    *out = new hp_model{std::move(result.params), std::move(result.epoch_loss), true};
  });
}

hp_status hp_model_load(const char * path, hp_model ** out)
{
  HP_REQUIRE(path, out);
  return guarded([&] { *out = new hp_model{hp::policy::PolicyParams::load(path), {}, false}; });
}

hp_status hp_model_save(const hp_model * model, const char * path)
{
  HP_REQUIRE(model, path);
  return guarded([&] { model->params.save(path); });
}

hp_status hp_model_write_loss_csv(const hp_model * model, const char * path)
{
  HP_REQUIRE(model, path);
  return guarded([&] {
    if (!model->trained) {
      throw std::invalid_argument("model has no training history");
    }
    hp::policy::write_loss_csv(path, model->epoch_loss);
  });
}

hp_status hp_model_evaluate_ade(
  const hp_model * model, const hp_config * cfg, const hp_scene_set * scenes, double * out, size_t n)
{
  HP_REQUIRE(model, cfg, scenes, out);
  return guarded([&] {
    std::vector<double> horizons;
    for (size_t i = 1; i <= n; ++i) {
      horizons.push_back(static_cast<double>(i));
    }
    const auto samples = dataset_of(cfg->cfg, *scenes);
    const auto ade = hp::policy::evaluate_ade(
      model->params, samples, horizons, cfg->cfg.training.encoder, cfg->cfg.sim.fallback.limits);
    std::copy(ade.begin(), ade.end(), out);
  });
}

void hp_model_free(hp_model * model)
{
  delete model;
}

hp_status hp_simulate(
  const hp_config * cfg, const hp_scene_set * scenes, const hp_model * model, const char * out_dir,
  int write_traces, hp_report ** out)
{
  HP_REQUIRE(cfg, scenes, model, out_dir);
  return guarded([&] {
    const auto & c = cfg->cfg;
    const auto & shape = model->params.shape();
    if (shape.steps != c.dataset.steps || shape.dt != c.scenario.dt) {
      throw std::invalid_argument("model steps or dt do not match the configuration");
    }
    const hp::sim::NetworkPlanner planner(model->params, c.training.encoder, c.sim.fallback.limits);
    const auto results = hp::sim::run_suite(scenes->scenes, planner, c.sim, c.workers);
    auto rep = hp::report::aggregate(
      results, c.sim.fallback_enabled ? "fallback-on" : "fallback-off");

    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw hp::IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    hp::report::save(rep, dir / "report.json");
    write_text(dir / "events.csv", hp::report::events_csv(results));
    std::string log;
    for (const auto & r : results) {
      for (const auto & line : r.decision_log) {
        log += r.scene_id + " " + line + "\n";
      }
    }
    write_text(dir / "decisions.log", log);
    if (write_traces != 0) {
      std::filesystem::create_directories(dir / "traces", ec);
      if (ec) {
        throw hp::IoError("cannot create traces directory: " + ec.message());
      }
      for (const auto & r : results) {
        write_text(dir / "traces" / (r.scene_id + ".csv"), hp::sim::trace_csv(r.trace));
      }
    }
    if (out != nullptr) {
      *out = new hp_report{std::move(rep)};
    }
  });
}

hp_status hp_report_load(const char * path, hp_report ** out)
{
  HP_REQUIRE(path, out);
  return guarded([&] { *out = new hp_report{hp::report::load(path)}; });
}

hp_status hp_report_save(const hp_report * report, const char * path)
{
  HP_REQUIRE(report, path);
  return guarded([&] { hp::report::save(report->report, path); });
}

hp_status hp_report_to_json(const hp_report * report, char ** out)
{
  HP_REQUIRE(report, out);
  return guarded([&] { *out = dup_string(hp::report::to_json(report->report)); });
}

hp_status hp_report_merge(const hp_report * const * reports, size_t n, const char * label, hp_report ** out)
{
  HP_REQUIRE(reports, out);
  return guarded([&] {
    std::vector<hp::report::SimReport> list;
    for (size_t i = 0; i < n; ++i) {
      if (reports[i] == nullptr) {
        throw std::invalid_argument("null report in list");
      }
      list.push_back(reports[i]->report);
    }
    *out = new hp_report{hp::report::merge(list, label != nullptr ? label : "")};
  });
}

hp_status hp_report_compare(const hp_report * const * reports, size_t n, char ** out)
{
  HP_REQUIRE(reports, out);
  return guarded([&] {
    std::vector<hp::report::SimReport> list;
    for (size_t i = 0; i < n; ++i) {
      if (reports[i] == nullptr) {
        throw std::invalid_argument("null report in list");
      }
      list.push_back(reports[i]->report);
    }
    *out = dup_string(hp::report::comparison_table(list));
  });
}

hp_status hp_report_event_count(const hp_report * report, const char * kind, size_t * out)
{
  HP_REQUIRE(report, kind, out);
  return guarded([&] {
    *out = report->report.event_counts[static_cast<std::size_t>(kind_from_string(kind))];
  });
}

hp_status hp_report_rate(const hp_report * report, const char * kind, double * out)
{
  HP_REQUIRE(report, kind, out);
  return guarded([&] { *out = report->report.rate(kind_from_string(kind)); });
}

hp_status hp_report_fallback_usage(const hp_report * report, double * out)
{
  HP_REQUIRE(report, out);
  return guarded([&] { *out = report->report.fallback_usage(); });
}

hp_status hp_report_non_ml_ticks(const hp_report * report, size_t * out)
{
  HP_REQUIRE(report, out);
  return guarded([&] { *out = report->report.non_ml_ticks(); });
}

hp_status hp_report_trigger_total(const hp_report * report, size_t * out)
{
  HP_REQUIRE(report, out);
  return guarded([&] { *out = report->report.trigger_total(); });
}

void hp_report_free(hp_report * report)
{
  delete report;
}

}  // extern "C"
