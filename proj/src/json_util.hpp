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


#ifndef HYBRIDPLAN__JSON_UTIL_HPP_
#define HYBRIDPLAN__JSON_UTIL_HPP_

#include "hybridplan/core_types.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace hybridplan::detail
{

/// Read-only view of a JSON value that remembers its path for error messages.
class Reader
{
public:
  Reader(const nlohmann::json & j, std::string path) : j_(&j), path_(std::move(path)) {}

  const std::string & path() const { return path_; }
  const nlohmann::json & raw() const { return *j_; }
  bool has(const char * key) const { return j_->is_object() && j_->contains(key); }

  Reader operator[](const char * key) const
  {
    if (!j_->is_object()) throw ParseError(path_ + ": expected an object");
    const auto it = j_->find(key);
    if (it == j_->end()) throw ParseError(path_ + "." + key + ": missing field");
    return Reader(*it, path_ + "." + key);
  }

  /// Rejects keys outside `allowed`.
  void keys(std::initializer_list<const char *> allowed) const
  {
    if (!j_->is_object()) throw ParseError(path_ + ": expected an object");
    for (const auto & [k, v] : j_->items()) {
      bool ok = false;
      for (const char * a : allowed) ok = ok || k == a;
      if (!ok) throw ParseError(path_ + "." + k + ": unknown field");
    }
  }

  std::vector<Reader> array(
    std::size_t min_count = 0, std::size_t max_count = std::numeric_limits<std::size_t>::max()) const
  {
    if (!j_->is_array()) throw ParseError(path_ + ": expected an array");
    if (j_->size() < min_count || j_->size() > max_count) {
      throw ParseError(path_ + ": wrong number of elements (" + std::to_string(j_->size()) + ")");
    }
    std::vector<Reader> out;
    out.reserve(j_->size());
    for (std::size_t i = 0; i < j_->size(); ++i) {
      out.emplace_back((*j_)[i], path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  double number() const
  {
    if (!j_->is_number()) throw ParseError(path_ + ": expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) throw ParseError(path_ + ": expected a finite number");
    return v;
  }

  double positive() const
  {
    const double v = number();
    if (!(v > 0.0)) throw ParseError(path_ + ": expected a positive number");
    return v;
  }

  int integer() const
  {
    if (!j_->is_number_integer()) throw ParseError(path_ + ": expected an integer");
    return j_->get<int>();
  }

  std::uint64_t unsigned_integer() const
  {
    if (!j_->is_number_unsigned() && !(j_->is_number_integer() && j_->get<long long>() >= 0)) {
      throw ParseError(path_ + ": expected a non-negative integer");
    }
    return j_->get<std::uint64_t>();
  }

  bool boolean() const
  {
    if (!j_->is_boolean()) throw ParseError(path_ + ": expected true or false");
    return j_->get<bool>();
  }

  std::string string() const
  {
    if (!j_->is_string()) throw ParseError(path_ + ": expected a string");
    return j_->get<std::string>();
  }

private:
  const nlohmann::json * j_;
  std::string path_;
};

inline nlohmann::json parse_document(const std::string & text, const std::string & what)
{
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error & e) {
    throw ParseError(what + ": malformed JSON (" + e.what() + ")");
  }
}

inline nlohmann::json units_json()
{
  return {{"length", "m"}, {"angle", "rad"}, {"time", "s"}, {"speed", "m/s"},
          {"acceleration", "m/s^2"}, {"jerk", "m/s^3"}, {"curvature", "1/m"}};
}

inline void check_units(const Reader & r)
{
  if (r.raw() != units_json()) {
    throw ParseError(r.path() + ": unsupported units (expected " + units_json().dump() + ")");
  }
}

inline std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path & path, const std::string & data)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << data;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace hybridplan::detail

#endif  // HYBRIDPLAN__JSON_UTIL_HPP_
