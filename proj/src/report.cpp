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


#include "hybridplan/report.hpp"

#include "json_util.hpp"

#include <cstdio>
#include <stdexcept>

namespace hybridplan::report
{

using json = nlohmann::json;
using detail::Reader;

double SimReport::rate(sim::EventKind k) const
{
  if (!(meters > 0.0)) throw std::invalid_argument("report covers zero distance");
  return static_cast<double>(event_counts[static_cast<std::size_t>(k)]) / miles() * 1000.0;
}

double SimReport::fallback_usage() const
{
  return ticks == 0 ? 0.0 : static_cast<double>(non_ml_ticks()) / static_cast<double>(ticks);
}

std::size_t SimReport::trigger_total() const
{
  std::size_t n = 0;
  for (const auto c : triggers) n += c;
  return n;
}

std::vector<double> SimReport::ade() const
{
  std::vector<double> out(ade_sums.size(), 0.0);
  if (ade_samples == 0) return out;
  for (std::size_t i = 0; i < ade_sums.size(); ++i) out[i] = ade_sums[i] / static_cast<double>(ade_samples);
  return out;
}

SimReport aggregate(const std::vector<sim::SceneResult> & results, const std::string & label)
{
  SimReport r;
  r.label = label;
  for (const auto & s : results) {
    ++r.scenes;
    r.aborted += s.aborted ? 1 : 0;
    r.meters += s.meters;
    for (const auto & e : s.events) ++r.event_counts[static_cast<std::size_t>(e.kind)];
    r.ticks += s.ticks;
    r.ml_ticks += s.ml_ticks;
    r.candidate_ticks += s.candidate_ticks;
    r.emergency_ticks += s.emergency_ticks;
    for (std::size_t c = 0; c < r.triggers.size(); ++c) r.triggers[c] += s.triggers[c];
    if (r.ade_horizons.empty()) {
      r.ade_horizons = s.ade.horizons;
      r.ade_sums.assign(s.ade.sums.size(), 0.0);
    } else if (r.ade_horizons != s.ade.horizons) {
      throw std::invalid_argument("scene results use different ADE horizons");
    }
    for (std::size_t i = 0; i < s.ade.sums.size(); ++i) r.ade_sums[i] += s.ade.sums[i];
    r.ade_samples += s.ade.samples;
  }
  if (!(r.meters > 0.0)) throw std::invalid_argument("simulated distance is zero; rates are undefined");
  return r;
}

SimReport merge(const std::vector<SimReport> & reports, const std::string & label)
{
  SimReport r;
  r.label = label;
  for (const auto & o : reports) {
    r.scenes += o.scenes;
    r.aborted += o.aborted;
    r.meters += o.meters;
    for (std::size_t k = 0; k < r.event_counts.size(); ++k) r.event_counts[k] += o.event_counts[k];
    r.ticks += o.ticks;
    r.ml_ticks += o.ml_ticks;
    r.candidate_ticks += o.candidate_ticks;
    r.emergency_ticks += o.emergency_ticks;
    for (std::size_t c = 0; c < r.triggers.size(); ++c) r.triggers[c] += o.triggers[c];
    if (r.ade_horizons.empty()) {
      r.ade_horizons = o.ade_horizons;
      r.ade_sums.assign(o.ade_sums.size(), 0.0);
    } else if (r.ade_horizons != o.ade_horizons) {
      throw std::invalid_argument("reports use different ADE horizons");
    }
    for (std::size_t i = 0; i < o.ade_sums.size(); ++i) r.ade_sums[i] += o.ade_sums[i];
    r.ade_samples += o.ade_samples;
  }
  if (!(r.meters > 0.0)) throw std::invalid_argument("merged distance is zero; rates are undefined");
  return r;
}

std::string to_json(const SimReport & r)
{
  json events = json::object();
  json rates = json::object();
  for (std::size_t k = 0; k < sim::kNumEventKinds; ++k) {
    const auto kind = static_cast<sim::EventKind>(k);
    events[sim::to_string(kind)] = r.event_counts[k];
    rates[sim::to_string(kind)] = r.rate(kind);
  }
  json triggers = json::object();
  for (int c = 0; c < fallback::kNumCauses; ++c) {
    triggers[fallback::to_string(static_cast<fallback::Cause>(c))] = r.triggers[static_cast<std::size_t>(c)];
  }
  json ade = json::array();
  const auto values = r.ade();
  for (std::size_t i = 0; i < r.ade_horizons.size(); ++i) {
    ade.push_back({{"horizon", r.ade_horizons[i]}, {"sum", r.ade_sums[i]}, {"ade", values[i]}});
  }
  json doc = {
    {"version", kReportVersion},
    {"label", r.label},
    {"scenes", r.scenes},
    {"aborted", r.aborted},
    {"meters", r.meters},
    {"miles", r.miles()},
    {"events", events},
    {"rates_per_1000_miles", rates},
    {"ticks", {{"total", r.ticks}, {"ml", r.ml_ticks}, {"candidate", r.candidate_ticks},
               {"emergency_stop", r.emergency_ticks}}},
    {"fallback_usage", r.fallback_usage()},
    {"trigger_histogram", triggers},
    {"ade", {{"samples", r.ade_samples}, {"table", ade}}},
  };
  return doc.dump(2) + "\n";
}

SimReport from_json(const std::string & text)
{
  const json doc = detail::parse_document(text, "report");
  const Reader r(doc, "report");
  if (!doc.is_object()) throw ParseError("report: expected an object");
  const int version = r["version"].integer();
  if (version != kReportVersion) {
    throw VersionError("report: unsupported version " + std::to_string(version));
  }
  r.keys({"version", "label", "scenes", "aborted", "meters", "miles", "events", "rates_per_1000_miles",
          "ticks", "fallback_usage", "trigger_histogram", "ade"});
  SimReport out;
  out.label = r["label"].string();
  out.scenes = r["scenes"].unsigned_integer();
  out.aborted = r["aborted"].unsigned_integer();
  out.meters = r["meters"].number();
  const Reader ev = r["events"];
  for (std::size_t k = 0; k < sim::kNumEventKinds; ++k) {
    out.event_counts[k] = ev[sim::to_string(static_cast<sim::EventKind>(k))].unsigned_integer();
  }
  if (ev.raw().size() != sim::kNumEventKinds) throw ParseError("report.events: unknown event kind");
  const Reader ticks = r["ticks"];
  ticks.keys({"total", "ml", "candidate", "emergency_stop"});
  out.ticks = ticks["total"].unsigned_integer();
  out.ml_ticks = ticks["ml"].unsigned_integer();
  out.candidate_ticks = ticks["candidate"].unsigned_integer();
  out.emergency_ticks = ticks["emergency_stop"].unsigned_integer();
  if (out.ml_ticks + out.candidate_ticks + out.emergency_ticks != out.ticks) {
    throw ParseError("report.ticks: sources do not add up to the total");
  }
  const Reader trig = r["trigger_histogram"];
  for (int c = 0; c < fallback::kNumCauses; ++c) {
    out.triggers[static_cast<std::size_t>(c)] =
      trig[fallback::to_string(static_cast<fallback::Cause>(c))].unsigned_integer();
  }
  if (trig.raw().size() != static_cast<std::size_t>(fallback::kNumCauses)) {
    throw ParseError("report.trigger_histogram: unknown cause");
  }
  const Reader ade = r["ade"];
  ade.keys({"samples", "table"});
  out.ade_samples = ade["samples"].unsigned_integer();
  for (const auto & row : ade["table"].array()) {
    row.keys({"horizon", "sum", "ade"});
    out.ade_horizons.push_back(row["horizon"].positive());
    out.ade_sums.push_back(row["sum"].number());
  }
  if (!(out.meters > 0.0)) throw ParseError("report.meters: expected a positive number");
  return out;
}

void save(const SimReport & r, const std::filesystem::path & path) { detail::write_file(path, to_json(r)); }

SimReport load(const std::filesystem::path & path) { return from_json(detail::read_file(path)); }

std::string events_csv(const std::vector<sim::SceneResult> & results)
{
  std::string out = "scene_id,kind,tick,time,measured\n";
  char buf[256];
  for (const auto & s : results) {
    for (const auto & e : s.events) {
      std::snprintf(
        buf, sizeof(buf), "%s,%s,%zu,%.2f,%.9g\n", e.scene_id.c_str(), sim::to_string(e.kind), e.tick,
        static_cast<double>(e.tick) * s.trace.dt, e.measured);
      out += buf;
    }
  }
  return out;
}

std::string comparison_table(const std::vector<SimReport> & reports)
{
  std::string out;
  char buf[256];
  auto row = [&](const std::string & name, auto && cell) {
    std::snprintf(buf, sizeof(buf), "%-26s", name.c_str());
    out += buf;
    for (const auto & r : reports) {
      out += " | ";
      out += cell(r);
    }
    out += "\n";
  };
  auto fmt = [&](const char * f, double v) {
    std::snprintf(buf, sizeof(buf), f, v);
    return std::string(buf);
  };
  auto text = [&](const std::string & v) {
    std::snprintf(buf, sizeof(buf), "%14s", v.substr(0, 14).c_str());
    return std::string(buf);
  };
  row("metric", [&](const SimReport & r) { return text(r.label); });
  row("miles", [&](const SimReport & r) { return fmt("%14.3f", r.miles()); });
  for (std::size_t k = 0; k < sim::kNumEventKinds; ++k) {
    const auto kind = static_cast<sim::EventKind>(k);
    row(std::string(sim::to_string(kind)) + " /1k mi", [&](const SimReport & r) { return fmt("%14.1f", r.rate(kind)); });
  }
  row("fallback usage", [&](const SimReport & r) { return fmt("%14.4f", r.fallback_usage()); });
  for (std::size_t h = 0; h < (reports.empty() ? 0 : reports.front().ade_horizons.size()); ++h) {
    const std::string name = "ADE@" + fmt("%g", reports.front().ade_horizons[h]) + "s";
    row(name, [&](const SimReport & r) { return h < r.ade().size() ? fmt("%14.3f", r.ade()[h]) : text("-"); });
  }
  out += "\ntrigger histogram (non-ML ticks by first ML violation)\n";
  for (int c = 0; c < fallback::kNumCauses; ++c) {
    const auto cause = static_cast<fallback::Cause>(c);
    row(fallback::to_string(cause), [&](const SimReport & r) { return fmt("%14.0f", static_cast<double>(r.triggers[static_cast<std::size_t>(c)])); });
  }
  return out;
}

}  // namespace hybridplan::report
