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

#ifndef PAIRLAB_TRAJECTORY_HPP_
#define PAIRLAB_TRAJECTORY_HPP_

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pairlab {

/// Time-indexed record of a simulation run: a numeric table with named
/// columns plus string metadata (config echo, seed, flags). A run of n
/// steps holds n + 1 rows, the first being the initial state.
struct GameTrajectory {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> metadata;

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size()) {
      throw std::logic_error("GameTrajectory: row width != column count");
    }
    rows.push_back(std::move(row));
  }

  int column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return static_cast<int>(i);
    }
    throw std::out_of_range("GameTrajectory: no column named " + name);
  }

  /// All values of one column, in step order.
  std::vector<double> column(const std::string& name) const {
    const int idx = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[idx]);
    return out;
  }
};

}  // namespace pairlab

#endif  // PAIRLAB_TRAJECTORY_HPP_
