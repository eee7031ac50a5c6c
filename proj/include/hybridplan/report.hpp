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


#ifndef HYBRIDPLAN__REPORT_HPP_
#define HYBRIDPLAN__REPORT_HPP_

#include "hybridplan/fallback.hpp"
#include "hybridplan/simulator.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace hybridplan::report
{

inline constexpr int kReportVersion = 1;
inline constexpr double kMetersPerMile = 1609.344;

/// Aggregated closed-loop results. Rates are events per 1000 miles.
struct SimReport
{
  std::string label;
  std::size_t scenes{0};
  std::size_t aborted{0};
  double meters{0.0};
  std::array<std::size_t, sim::kNumEventKinds> event_counts{};
  std::size_t ticks{0};
  std::size_t ml_ticks{0};
  std::size_t candidate_ticks{0};
  std::size_t emergency_ticks{0};
  std::array<std::size_t, fallback::kNumCauses> triggers{};
  std::vector<double> ade_horizons;
  std::vector<double> ade_sums;
  std::size_t ade_samples{0};

  double miles() const { return meters / kMetersPerMile; }
  /// Throws std::invalid_argument when no distance was driven.
  double rate(sim::EventKind k) const;
  /// Fraction of ticks where the executed trajectory did not come from the ML planner.
  double fallback_usage() const;
  std::size_t non_ml_ticks() const { return candidate_ticks + emergency_ticks; }
  std::size_t trigger_total() const;
  std::vector<double> ade() const;
  bool operator==(const SimReport &) const = default;
};

/// Sums scene results in order. Throws std::invalid_argument when the total distance is zero.
SimReport aggregate(const std::vector<sim::SceneResult> & results, const std::string & label = {});

/// Sums several reports; ADE tables must share horizons.
SimReport merge(const std::vector<SimReport> & reports, const std::string & label = {});

/// Versioned JSON document with sorted keys.
std::string to_json(const SimReport & r);
/// Throws ParseError on malformed input and VersionError on a version mismatch.
SimReport from_json(const std::string & text);

void save(const SimReport & r, const std::filesystem::path & path);
SimReport load(const std::filesystem::path & path);

/// `scene_id,kind,tick,time,measured` rows sorted by scene order then kind.
std::string events_csv(const std::vector<sim::SceneResult> & results);

/// Side-by-side rates, usage and trigger histogram.
std::string comparison_table(const std::vector<SimReport> & reports);

}  // namespace hybridplan::report

#endif  // HYBRIDPLAN__REPORT_HPP_
