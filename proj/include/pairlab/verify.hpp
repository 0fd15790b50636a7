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

#ifndef PAIRLAB_VERIFY_HPP_
#define PAIRLAB_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace pairlab {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;   // worst observed error / violation
  double tolerance = 0.0;  // bound the measurement must stay within
  std::string detail;
  double seconds = 0.0;
};

struct VerifyConfig {
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  int k_min = 2;
  int k_max = 8;
  /// Discriminator floors swept by the zero-sum identity check.
  std::vector<double> eps_ladder = {0.5, 0.1, 0.01};
  /// Fault-injection hook for smoke-testing the suite itself. "hessian"
  /// flips the sign of one analytic Hessian entry, which must make the
  /// finite-difference check fail.
  std::string poison;
  /// Worker threads for the check pool; <= 1 runs sequentially.
  int threads = 4;
};

/// Runs every property suite at the configured sizes and seeds. Results
/// come back in a fixed order regardless of scheduling.
std::vector<CheckResult> run_verification(const VerifyConfig& config);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace pairlab

#endif  // PAIRLAB_VERIFY_HPP_
