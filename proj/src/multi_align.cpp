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

#include "pairlab/multi_align.hpp"

#include <cmath>
#include <stdexcept>

namespace pairlab {

DistributionFamily::DistributionFamily(std::vector<DensityVector> members)
    : members_(std::move(members)) {
  if (members_.size() < 2) {
    throw std::invalid_argument("DistributionFamily: needs at least 2 members");
  }
  for (const auto& m : members_) {
    if (m.space() != members_.front().space()) {
      throw std::invalid_argument("DistributionFamily: mixed spaces");
    }
  }
}

double multi_quadratic_loss(const std::vector<Vector>& members,
                            const PairwiseOperator& a) {
  const int n = static_cast<int>(members.size());
  for (const auto& v : members) {
    if (v.size() != a.space().size()) {
      throw std::invalid_argument("multi_quadratic_loss: dimension mismatch");
    }
  }
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vector d = members[i] - members[j];
      loss += d.dot(a.entries() * d);
    }
  }
  return loss;
}

double multi_loss(const DistributionFamily& family,
                  const PairwiseOperator& a) {
  if (family.space() != a.space()) {
    throw std::invalid_argument("multi_loss: dimension mismatch");
  }
  const int n = family.count();
  std::vector<Vector> raw;
  raw.reserve(n);
  for (const auto& m : family.members()) raw.push_back(m.values());

  const double direct = multi_quadratic_loss(raw, a);

  double quad = 0.0;
  double cross = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double form = raw[i].dot(a.entries() * raw[j]);
      if (i == j) {
        quad += form;
      } else {
        cross += form;
      }
    }
  }
  const double rearranged = (n - 1) * quad - cross;
  if (std::abs(direct - rearranged) > 1e-12 * std::max(1.0, std::abs(direct))) {
    throw std::logic_error("multi_loss: rearranged form disagrees");
  }
  return direct;
}

std::vector<Vector> multi_gradients(const std::vector<Vector>& members,
                                    const PairwiseOperator& a) {
  const int n = static_cast<int>(members.size());
  for (const auto& v : members) {
    if (v.size() != a.space().size()) {
      throw std::invalid_argument("multi_gradients: dimension mismatch");
    }
  }
  std::vector<Vector> grads;
  grads.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vector sum_others = Vector::Zero(a.space().size());
    for (int s = 0; s < n; ++s) {
      if (s == i) continue;
      sum_others += a.entries() * members[s];
    }
    grads.push_back(2.0 * (n - 1) * (a.entries() * members[i]) -
                    2.0 * sum_others);
  }
  return grads;
}

std::vector<Vector> multi_gradients(const DistributionFamily& family,
                                    const PairwiseOperator& a) {
  std::vector<Vector> raw;
  raw.reserve(family.count());
  for (const auto& m : family.members()) raw.push_back(m.values());
  return multi_gradients(raw, a);
}

}  // namespace pairlab
