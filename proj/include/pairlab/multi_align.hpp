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

#ifndef PAIRLAB_MULTI_ALIGN_HPP_
#define PAIRLAB_MULTI_ALIGN_HPP_

#include <vector>

#include "pairlab/function_space.hpp"

namespace pairlab {

/// N >= 2 densities over a shared space, to be aligned with one another.
class DistributionFamily {
 public:
  explicit DistributionFamily(std::vector<DensityVector> members);

  const std::vector<DensityVector>& members() const { return members_; }
  const DensityVector& member(int i) const { return members_.at(i); }
  int count() const { return static_cast<int>(members_.size()); }
  const FiniteSpace& space() const { return members_.front().space(); }

 private:
  std::vector<DensityVector> members_;
};

/// sum_{i<j} <v_i - v_j, A (v_i - v_j)> over raw vectors.
double multi_quadratic_loss(const std::vector<Vector>& members,
                            const PairwiseOperator& a);

/// The N-distribution alignment loss. Internally evaluated both as the
/// pairwise-difference sum and as the rearranged form
/// (N-1) sum_i <p_i, A p_i> - sum_{i != j} <p_i, A p_j>; disagreement
/// beyond 1e-12 is a logic error.
double multi_loss(const DistributionFamily& family, const PairwiseOperator& a);

/// Raw gradients w.r.t. each member:
/// 2 (N-1) A p_i - sum_{s != i} 2 A p_s. Not simplex-projected; members of
/// an aligned subset receive identical gradients for every A.
std::vector<Vector> multi_gradients(const std::vector<Vector>& members,
                                    const PairwiseOperator& a);
std::vector<Vector> multi_gradients(const DistributionFamily& family,
                                    const PairwiseOperator& a);

}  // namespace pairlab

#endif  // PAIRLAB_MULTI_ALIGN_HPP_
