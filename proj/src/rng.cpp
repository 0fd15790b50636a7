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

#include "pairlab/rng.hpp"

#include <cmath>

namespace pairlab {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run_index) {
  // splitmix64 finalizer over the combined state.
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (run_index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

DensityVector random_density(Rng& rng, const FiniteSpace& space,
                             double min_mass) {
  const int k = space.size();
  Vector v(k);
  for (int i = 0; i < k; ++i) {
    // Exp(1) variates normalize to a flat Dirichlet sample.
    v[i] = -std::log(1.0 - rng.uniform01());
  }
  v /= v.sum();
  if (min_mass > 0.0) {
    const Vector floor = Vector::Constant(k, min_mass / k);
    v = (1.0 - min_mass) * v + floor;
  }
  return DensityVector(space, std::move(v));
}

PairwiseOperator random_symmetric_operator(Rng& rng, const FiniteSpace& space,
                                           double scale) {
  const int k = space.size();
  Matrix m(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const double v = scale * rng.gaussian();
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return PairwiseOperator(space, std::move(m));
}

PairwiseOperator random_pd_operator(Rng& rng, const FiniteSpace& space,
                                    double ridge) {
  const int k = space.size();
  Matrix r(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      r(i, j) = rng.gaussian();
    }
  }
  Matrix m = r * r.transpose() / k + ridge * Matrix::Identity(k, k);
  // r r^T assembled by Eigen is symmetric only up to rounding; rebuild the
  // upper triangle into the lower one so the operator invariant holds
  // exactly.
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      m(j, i) = m(i, j);
    }
  }
  return PairwiseOperator(space, std::move(m));
}

Vector random_unit_vector(Rng& rng, int n) {
  Vector v(n);
  double norm = 0.0;
  while (norm == 0.0) {
    for (int i = 0; i < n; ++i) {
      v[i] = rng.gaussian();
    }
    norm = v.norm();
  }
  return v / norm;
}

}  // namespace pairlab
