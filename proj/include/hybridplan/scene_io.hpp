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


#ifndef HYBRIDPLAN__SCENE_IO_HPP_
#define HYBRIDPLAN__SCENE_IO_HPP_

#include "hybridplan/core_types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hybridplan::scene_io
{

inline constexpr int kSceneVersion = 1;

/// Scene as a JSON document.
std::string to_json(const Scene & scene);
/// Throws ParseError naming the offending field, VersionError on a version other than 1.
Scene from_json(const std::string & text);

void save_scene(const Scene & scene, const std::filesystem::path & path);
Scene load_scene(const std::filesystem::path & path);

/// Writes scene_0000.json, scene_0001.json, ... into `dir` (created if missing).
void save_suite(const std::vector<Scene> & scenes, const std::filesystem::path & dir);
/// Loads every *.json file in `dir` in lexicographic order.
std::vector<Scene> load_dir(const std::filesystem::path & dir);

}  // namespace hybridplan::scene_io

#endif  // HYBRIDPLAN__SCENE_IO_HPP_
