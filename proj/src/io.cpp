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

#include "pairlab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace pairlab {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("io: malformed number '" + s + "'");
  }
  return v;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::system_error(errno, std::generic_category(),
                            "io: cannot write " + path.string());
  }
  return out;
}

}  // namespace

void write_trajectory_csv(const GameTrajectory& traj,
                          const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  for (std::size_t c = 0; c < traj.columns.size(); ++c) {
    out << (c == 0 ? "" : ",") << traj.columns[c];
  }
  out << "\n";
  for (const auto& row : traj.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c == 0 ? "" : ",") << format_double(row[c]);
    }
    out << "\n";
  }
  if (!out) {
    throw std::system_error(errno, std::generic_category(),
                            "io: write failed for " + path.string());
  }
}

GameTrajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::system_error(errno, std::generic_category(),
                            "io: cannot read " + path.string());
  }
  GameTrajectory traj;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("io: empty csv " + path.string());
  }
  std::stringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) {
    traj.columns.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      row.push_back(parse_double(cell));
    }
    traj.add_row(std::move(row));
  }
  return traj;
}

nlohmann::json trajectory_to_json(const GameTrajectory& traj) {
  nlohmann::json j;
  j["columns"] = traj.columns;
  j["rows"] = traj.rows;
  j["metadata"] = traj.metadata;
  return j;
}

GameTrajectory trajectory_from_json(const nlohmann::json& j) {
  GameTrajectory traj;
  traj.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& row : j.at("rows")) {
    traj.add_row(row.get<std::vector<double>>());
  }
  if (j.contains("metadata")) {
    traj.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  }
  return traj;
}

void write_json_file(const nlohmann::json& j,
                     const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << j.dump(2) << "\n";
  if (!out) {
    throw std::system_error(errno, std::generic_category(),
                            "io: write failed for " + path.string());
  }
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["artifact_version"] = kArtifactVersion;
  j["config"] = config;
  j["wall_seconds"] = wall_seconds;
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& [name, pass] : checks) {
    checks_json.push_back({{"name", name}, {"pass", pass}});
  }
  j["checks"] = checks_json;
  return j;
}

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path) {
  write_json_file(manifest.to_json(), path);
}

}  // namespace pairlab
