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


// hybridplan: gen, train, sim and report over the C API.

#include "hybridplan/hybridplan.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

/// Thrown on a failed C API call; carries the library message.
struct ApiFailure
{
  std::string message;
};

void check(hp_status st, const char * what)
{
  if (st != HP_OK) {
    throw ApiFailure{std::string(what) + ": " + hp_status_string(st) + ": " + hp_last_error()};
  }
}

template <class T, void (*Free)(T *)>
struct Deleter
{
  void operator()(T * p) const { Free(p); }
};
using ConfigPtr = std::unique_ptr<hp_config, Deleter<hp_config, hp_config_free>>;
using ScenesPtr = std::unique_ptr<hp_scene_set, Deleter<hp_scene_set, hp_scene_set_free>>;
using ModelPtr = std::unique_ptr<hp_model, Deleter<hp_model, hp_model_free>>;
using ReportPtr = std::unique_ptr<hp_report, Deleter<hp_report, hp_report_free>>;

std::string take(char * s)
{
  std::string out(s);
  hp_string_free(s);
  return out;
}

struct CommonFlags
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> workers;
};

void add_common(CLI::App * cmd, CommonFlags & f)
{
  cmd->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Seed for scenes, subset, training and simulation");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
}

ConfigPtr make_config(const CommonFlags & f)
{
  hp_config * raw = nullptr;
  if (f.config.empty()) {
    check(hp_config_default(&raw), "config");
  } else {
    check(hp_config_load(f.config.c_str(), &raw), "config");
  }
  ConfigPtr cfg(raw);
  if (f.seed) {
    check(hp_config_set_seed(cfg.get(), *f.seed), "--seed");
  }
  if (!f.out.empty()) {
    check(hp_config_set_out(cfg.get(), f.out.c_str()), "--out");
  }
  if (f.workers) {
    check(hp_config_set_workers(cfg.get(), *f.workers), "--workers");
  }
  return cfg;
}

std::string out_dir(const hp_config * cfg)
{
  char * s = nullptr;
  check(hp_config_get_out(cfg, &s), "config");
  return take(s);
}

ScenesPtr load_scenes(const std::string & dir)
{
  hp_scene_set * raw = nullptr;
  check(hp_scenes_load_dir(dir.c_str(), &raw), "scenes");
  return ScenesPtr(raw);
}

ModelPtr train_model(const hp_config * cfg, const hp_scene_set * scenes)
{
  hp_model * raw = nullptr;
  check(hp_model_train(cfg, scenes, &raw), "train");
  return ModelPtr(raw);
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Learned trajectory planner with a rule-based fallback layer"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hp_version());

  CommonFlags gen_f, train_f, sim_f;

  auto * gen = app.add_subcommand("gen", "Generate a scenario suite as scene files");
  add_common(gen, gen_f);

  auto * train = app.add_subcommand("train", "Train policy weights on scene files");
  add_common(train, train_f);
  std::string train_scenes;
  std::optional<double> train_fraction;
  train->add_option("--scenes", train_scenes, "Scene directory")->required()->check(CLI::ExistingDirectory);
  train->add_option("--data-fraction", train_fraction, "Fraction of the dataset to train on")
    ->check(CLI::Range(0.0, 1.0));

  auto * sim = app.add_subcommand("sim", "Closed-loop simulation of a scene suite");
  add_common(sim, sim_f);
  std::string sim_scenes, sim_weights, sim_train_scenes, sim_mode;
  std::optional<double> sim_fraction;
  std::string sim_fallback;
  bool sim_traces = false;
  sim->add_option("--scenes", sim_scenes, "Scene directory")->required()->check(CLI::ExistingDirectory);
  auto * weights_opt = sim->add_option("--weights", sim_weights, "Policy weights")->check(CLI::ExistingFile);
  sim->add_option("--train-scenes", sim_train_scenes, "Train weights on these scenes before simulating")
    ->check(CLI::ExistingDirectory)
    ->excludes(weights_opt);
  sim->add_option("--data-fraction", sim_fraction, "Fraction of the dataset used with --train-scenes")
    ->check(CLI::Range(0.0, 1.0));
  sim->add_option("--fallback", sim_fallback, "Fallback layer on|off")->check(CLI::IsMember({"on", "off"}));
  sim->add_option("--mode", sim_mode, "Agent prediction for the fallback")
    ->check(CLI::IsMember({"constant-velocity", "log-replay"}));
  sim->add_flag("--traces", sim_traces, "Write per-scene trace CSVs");

  auto * report = app.add_subcommand("report", "Merge reports and print a comparison table");
  std::vector<std::string> report_inputs;
  std::string report_out;
  report->add_option("reports", report_inputs, "SimReport files")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Directory for merged.json and comparison.txt");

  if (argc <= 1) {
    std::cerr << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      auto cfg = make_config(gen_f);
      hp_scene_set * raw = nullptr;
      check(hp_scenes_generate(cfg.get(), &raw), "gen");
      ScenesPtr scenes(raw);
      const std::string dir = out_dir(cfg.get());
      check(hp_scenes_save_dir(scenes.get(), dir.c_str()), "gen");
      std::size_t n = 0;
      check(hp_scenes_count(scenes.get(), &n), "gen");
      std::cout << "wrote " << n << " scenes to " << dir << "\n";
    } else if (train->parsed()) {
      auto cfg = make_config(train_f);
      if (train_fraction) {
        check(hp_config_set_data_fraction(cfg.get(), *train_fraction), "--data-fraction");
      }
      auto scenes = load_scenes(train_scenes);
      auto model = train_model(cfg.get(), scenes.get());
      const std::filesystem::path dir = out_dir(cfg.get());
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) {
        throw ApiFailure{"cannot create " + dir.string() + ": " + ec.message()};
      }
      check(hp_model_save(model.get(), (dir / "weights.bin").c_str()), "train");
      check(hp_model_write_loss_csv(model.get(), (dir / "loss.csv").c_str()), "train");
      std::cout << "wrote " << (dir / "weights.bin").string() << " and " << (dir / "loss.csv").string() << "\n";
    } else if (sim->parsed()) {
      if (sim_weights.empty() && sim_train_scenes.empty()) {
        std::cerr << "sim: one of --weights or --train-scenes is required\n";
        return kExitUsage;
      }
      auto cfg = make_config(sim_f);
      if (!sim_fallback.empty()) {
        check(hp_config_set_fallback(cfg.get(), sim_fallback == "on" ? 1 : 0), "--fallback");
      }
      if (!sim_mode.empty()) {
        check(hp_config_set_prediction_mode(cfg.get(), sim_mode.c_str()), "--mode");
      }
      if (sim_fraction) {
        check(hp_config_set_data_fraction(cfg.get(), *sim_fraction), "--data-fraction");
      }
      ModelPtr model;
      if (!sim_weights.empty()) {
        hp_model * raw = nullptr;
        check(hp_model_load(sim_weights.c_str(), &raw), "weights");
        model.reset(raw);
      } else {
        auto train_set = load_scenes(sim_train_scenes);
        model = train_model(cfg.get(), train_set.get());
      }
      auto scenes = load_scenes(sim_scenes);
      const std::string dir = out_dir(cfg.get());
      hp_report * raw = nullptr;
      check(hp_simulate(cfg.get(), scenes.get(), model.get(), dir.c_str(), sim_traces ? 1 : 0, &raw), "sim");
      ReportPtr rep(raw);
      const hp_report * list[] = {rep.get()};
      char * table = nullptr;
      check(hp_report_compare(list, 1, &table), "sim");
      std::cout << take(table);
    } else if (report->parsed()) {
      std::vector<ReportPtr> owned;
      std::vector<const hp_report *> list;
      for (const auto & path : report_inputs) {
        hp_report * raw = nullptr;
        check(hp_report_load(path.c_str(), &raw), path.c_str());
        owned.emplace_back(raw);
        list.push_back(raw);
      }
      char * table = nullptr;
      check(hp_report_compare(list.data(), list.size(), &table), "report");
      const std::string text = take(table);
      std::cout << text;
      if (!report_out.empty()) {
        hp_report * raw = nullptr;
        check(hp_report_merge(list.data(), list.size(), "merged", &raw), "report");
        ReportPtr merged(raw);
        const std::filesystem::path dir = report_out;
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) {
          throw ApiFailure{"cannot create " + dir.string() + ": " + ec.message()};
        }
        check(hp_report_save(merged.get(), (dir / "merged.json").c_str()), "report");
        std::FILE * f = std::fopen((dir / "comparison.txt").c_str(), "wb");
        if (f == nullptr || std::fwrite(text.data(), 1, text.size(), f) != text.size()) {
          if (f != nullptr) {
            std::fclose(f);
          }
          throw ApiFailure{"cannot write " + (dir / "comparison.txt").string()};
        }
        std::fclose(f);
      }
    }
  } catch (const ApiFailure & e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitData;
  }
  return kExitOk;
}
