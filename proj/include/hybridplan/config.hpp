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


#ifndef HYBRIDPLAN__CONFIG_HPP_
#define HYBRIDPLAN__CONFIG_HPP_

#include "hybridplan/scenario.hpp"
#include "hybridplan/simulator.hpp"
#include "hybridplan/training.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace hybridplan
{

inline constexpr int kConfigVersion = 1;

/// Every setting of a pipeline run. Network steps and dt follow the dataset and scenario
/// sections; the simulator reuses the dataset history length and the training encoder.
/// Two scenes per template.
inline scenario::ScenarioConfig default_suite()
{
  scenario::ScenarioConfig c;
  c.counts.fill(2);
  return c;
}

struct RunConfig
{
  scenario::ScenarioConfig scenario{default_suite()};
  policy::DatasetConfig dataset;
  policy::TrainingConfig training;
  double data_fraction{1.0};
  std::uint64_t subset_seed{0};
  sim::SimConfig sim;
  int workers{1};
  std::string out{"out"};

  /// Copies the shared settings into the sections that consume them, then validates.
  void finalize();
};

/// Parses a JSON document over the defaults and finalizes it. Unknown keys raise ParseError naming
/// the path; inconsistent values raise std::invalid_argument.
RunConfig run_config_from_json(const std::string & text);
RunConfig load_run_config(const std::filesystem::path & path);
/// Full document including defaults.
std::string to_json(const RunConfig & cfg);

}  // namespace hybridplan

#endif  // HYBRIDPLAN__CONFIG_HPP_
