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


#ifndef HYBRIDPLAN__HYBRIDPLAN_H_
#define HYBRIDPLAN__HYBRIDPLAN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(HP_BUILDING_LIBRARY)
#define HP_API __attribute__((visibility("default")))
#else
#define HP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hp_status {
  HP_OK = 0,
  HP_ERR_NULL_ARGUMENT = 1,
  HP_ERR_INVALID_ARGUMENT = 2,
  HP_ERR_PARSE = 3,
  HP_ERR_VERSION = 4,
  HP_ERR_IO = 5,
  HP_ERR_RUNTIME = 6
} hp_status;

typedef struct hp_config hp_config;
typedef struct hp_scene_set hp_scene_set;
typedef struct hp_model hp_model;
typedef struct hp_report hp_report;

/* Library version string, e.g. "0.1.0". */
HP_API const char * hp_version(void);
/* Message of the last failed call on this thread; empty after a success. */
HP_API const char * hp_last_error(void);
HP_API const char * hp_status_string(hp_status status);
/* Frees strings returned through char ** out-parameters. */
HP_API void hp_string_free(char * s);

/* Run configuration. */
HP_API hp_status hp_config_default(hp_config ** out);
HP_API hp_status hp_config_from_json(const char * text, hp_config ** out);
HP_API hp_status hp_config_load(const char * path, hp_config ** out);
HP_API hp_status hp_config_to_json(const hp_config * cfg, char ** out);
/* Sets the scenario, subset, training and simulator seeds together. */
HP_API hp_status hp_config_set_seed(hp_config * cfg, uint64_t seed);
HP_API hp_status hp_config_set_out(hp_config * cfg, const char * dir);
HP_API hp_status hp_config_set_fallback(hp_config * cfg, int enabled);
HP_API hp_status hp_config_set_data_fraction(hp_config * cfg, double fraction);
HP_API hp_status hp_config_set_workers(hp_config * cfg, int workers);
/* "constant-velocity" or "log-replay". */
HP_API hp_status hp_config_set_prediction_mode(hp_config * cfg, const char * mode);
HP_API hp_status hp_config_get_out(const hp_config * cfg, char ** out);
HP_API void hp_config_free(hp_config * cfg);

/* Scenes. */
HP_API hp_status hp_scenes_generate(const hp_config * cfg, hp_scene_set ** out);
/* Loads every *.json file of a directory in name order. */
HP_API hp_status hp_scenes_load_dir(const char * dir, hp_scene_set ** out);
/* Writes scene_NNNN.json files; creates the directory. */
HP_API hp_status hp_scenes_save_dir(const hp_scene_set * scenes, const char * dir);
HP_API hp_status hp_scenes_count(const hp_scene_set * scenes, size_t * out);
HP_API void hp_scene_set_free(hp_scene_set * scenes);

/* Policy weights. */
/* Builds the dataset from the scenes, keeps the configured data fraction and trains. */
HP_API hp_status hp_model_train(const hp_config * cfg, const hp_scene_set * scenes, hp_model ** out);
HP_API hp_status hp_model_load(const char * path, hp_model ** out);
HP_API hp_status hp_model_save(const hp_model * model, const char * path);
/* Per-epoch mean loss as CSV; fails for models that were loaded rather than trained. */
HP_API hp_status hp_model_write_loss_csv(const hp_model * model, const char * path);
/* Open-loop ADE at horizons 1..n seconds over the scenes' samples; `out` holds n values. */
HP_API hp_status hp_model_evaluate_ade(
  const hp_model * model, const hp_config * cfg, const hp_scene_set * scenes, double * out, size_t n);
HP_API void hp_model_free(hp_model * model);

/* Closed-loop simulation. Writes report.json, events.csv and decisions.log to `out_dir`, plus
 * traces/<scene>.csv when `write_traces` is nonzero. `out` (optional) receives the report. */
HP_API hp_status hp_simulate(
  const hp_config * cfg, const hp_scene_set * scenes, const hp_model * model, const char * out_dir,
  int write_traces, hp_report ** out);

/* Reports. */
HP_API hp_status hp_report_load(const char * path, hp_report ** out);
HP_API hp_status hp_report_save(const hp_report * report, const char * path);
HP_API hp_status hp_report_to_json(const hp_report * report, char ** out);
HP_API hp_status hp_report_merge(const hp_report * const * reports, size_t n, const char * label, hp_report ** out);
/* Table comparing reports side by side. */
HP_API hp_status hp_report_compare(const hp_report * const * reports, size_t n, char ** out);
/* kind: collision, close-call, discomfort-braking, passiveness, off-road. */
HP_API hp_status hp_report_event_count(const hp_report * report, const char * kind, size_t * out);
HP_API hp_status hp_report_rate(const hp_report * report, const char * kind, double * out);
HP_API hp_status hp_report_fallback_usage(const hp_report * report, double * out);
HP_API hp_status hp_report_non_ml_ticks(const hp_report * report, size_t * out);
HP_API hp_status hp_report_trigger_total(const hp_report * report, size_t * out);
HP_API void hp_report_free(hp_report * report);

#ifdef __cplusplus
}
#endif

#endif  /* HYBRIDPLAN__HYBRIDPLAN_H_ */
