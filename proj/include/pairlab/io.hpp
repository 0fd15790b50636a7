// Copyright 2026 The Pairlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PAIRLAB_IO_HPP_
#define PAIRLAB_IO_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pairlab/trajectory.hpp"

namespace pairlab {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// One header line, one row per step, values in shortest round-trip form.
void write_trajectory_csv(const GameTrajectory& traj,
                          const std::filesystem::path& path);

nlohmann::json trajectory_to_json(const GameTrajectory& traj);
GameTrajectory trajectory_from_json(const nlohmann::json& j);

/// Parses a file written by write_trajectory_csv.
GameTrajectory read_trajectory_csv(const std::filesystem::path& path);

void write_json_file(const nlohmann::json& j,
                     const std::filesystem::path& path);

/// Per-invocation record: configuration echo, artifact version, wall-clock
/// duration and a pass/fail line per check performed during the run.
struct RunManifest {
  nlohmann::json config;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, bool>> checks;

  nlohmann::json to_json() const;
};

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path);

}  // namespace pairlab

#endif  // PAIRLAB_IO_HPP_
