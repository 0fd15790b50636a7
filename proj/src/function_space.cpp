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

#include "pairlab/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pairlab {

namespace {
constexpr double kMassRenormTol = 1e-9;
constexpr double kMassExactTol = 1e-13;
constexpr double kNegativeClipTol = 1e-12;
}  // namespace

FiniteSpace::FiniteSpace(int size, std::vector<std::string> labels)
    : size_(size), labels_(std::move(labels)) {
  if (size < 1) {
    throw std::invalid_argument("FiniteSpace: size must be >= 1");
  }
  if (!labels_.empty() && static_cast<int>(labels_.size()) != size) {
    throw std::invalid_argument("FiniteSpace: label count != size");
  }
}

DensityVector::DensityVector(FiniteSpace space, Vector values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != space_.size()) {
    throw std::invalid_argument("DensityVector: dimension mismatch");
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("DensityVector: non-finite entry");
  }
  for (int i = 0; i < values_.size(); ++i) {
    if (values_[i] < 0.0) {
      if (values_[i] < -kNegativeClipTol) {
        throw std::invalid_argument("DensityVector: negative entry");
      }
      values_[i] = 0.0;
    }
  }
  const double mass = values_.sum();
  if (std::abs(mass - 1.0) > kMassRenormTol) {
    throw std::invalid_argument("DensityVector: mass deviates from 1 by " +
                                std::to_string(mass - 1.0));
  }
  // Renormalize accumulated drift, but leave already-conforming vectors
  // untouched so that aligned states stay bit-identical across steps.
  if (std::abs(mass - 1.0) > kMassExactTol) {
    values_ /= mass;
  }
}

DensityVector DensityVector::uniform(const FiniteSpace& space) {
  return DensityVector(space,
                       Vector::Constant(space.size(), 1.0 / space.size()));
}

DensityVector DensityVector::delta(const FiniteSpace& space, int at) {
  if (at < 0 || at >= space.size()) {
    throw std::invalid_argument("DensityVector::delta: index out of range");
  }
  Vector v = Vector::Zero(space.size());
  v[at] = 1.0;
  return DensityVector(space, std::move(v));
}

Vector all_ones(const FiniteSpace& space) {
  return Vector::Ones(space.size());
}

PairwiseOperator::PairwiseOperator(FiniteSpace space, Matrix entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  if (entries_.rows() != space_.size() || entries_.cols() != space_.size()) {
    throw std::invalid_argument("PairwiseOperator: dimension mismatch");
  }
  for (int i = 0; i < entries_.rows(); ++i) {
    for (int j = i + 1; j < entries_.cols(); ++j) {
      if (entries_(i, j) != entries_(j, i)) {
        throw std::invalid_argument("PairwiseOperator: entries not symmetric");
      }
    }
  }
}

PairwiseOperator PairwiseOperator::from_function(
    const FiniteSpace& space, const std::function<double(int, int)>& fn) {
  const int k = space.size();
  Matrix raw(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      raw(i, j) = fn(i, j);
    }
  }
  bool changed = false;
  Matrix sym(k, k);
  for (int i = 0; i < k; ++i) {
    sym(i, i) = raw(i, i);
    for (int j = i + 1; j < k; ++j) {
      if (raw(i, j) != raw(j, i)) {
        changed = true;
      }
      const double v = 0.5 * (raw(i, j) + raw(j, i));
      sym(i, j) = v;
      sym(j, i) = v;
    }
  }
  PairwiseOperator op(space, std::move(sym));
  op.symmetrized_input_ = changed;
  return op;
}

ActivationTriple ActivationTriple::log_instance() {
  constexpr double kGuard = 1e-15;
  ActivationTriple act;
  act.f1 = {[](double t) { return -std::log(t); },
            [](double t) { return -1.0 / t; },
            [](double t) { return t > 0.0 && t < 1.0; },
            kGuard,
            1.0 - kGuard};
  act.f2 = {[](double t) { return -std::log(1.0 - t); },
            [](double t) { return 1.0 / (1.0 - t); },
            [](double t) { return t > 0.0 && t < 1.0; },
            kGuard,
            1.0 - kGuard};
  act.g = {[](double t) { return std::log(t); },
           [](double t) { return 1.0 / t; },
           [](double t) { return t > 0.0; },
           kGuard,
           std::numeric_limits<double>::infinity()};
  return act;
}

double inner_product(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("inner_product: dimension mismatch");
  }
  return a.dot(b);
}

double bilinear_form(const Vector& p, const PairwiseOperator& a,
                     const Vector& q) {
  if (p.size() != a.space().size() || q.size() != a.space().size()) {
    throw std::invalid_argument("bilinear_form: dimension mismatch");
  }
  return p.dot(a.entries() * q);
}

double bilinear_form(const DensityVector& p, const PairwiseOperator& a,
                     const DensityVector& q) {
  return bilinear_form(p.values(), a, q.values());
}

Vector apply_operator(const PairwiseOperator& a, const Vector& q) {
  if (q.size() != a.space().size()) {
    throw std::invalid_argument("apply_operator: dimension mismatch");
  }
  return a.entries() * q;
}

Vector apply_operator(const PairwiseOperator& a, const DensityVector& q) {
  return apply_operator(a, q.values());
}

DensityVector project_simplex(const FiniteSpace& space, const Vector& v) {
  if (v.size() != space.size()) {
    throw std::invalid_argument("project_simplex: dimension mismatch");
  }
  if (!v.allFinite()) {
    throw std::invalid_argument("project_simplex: non-finite input");
  }
  const int k = v.size();
  // Feasible points are their own projection; return them unchanged so the
  // map is exactly idempotent and fixed points stay bit-stable.
  if (v.minCoeff() >= 0.0 && std::abs(v.sum() - 1.0) <= kMassExactTol) {
    return DensityVector(space, v);
  }
  std::vector<double> sorted(v.data(), v.data() + k);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  // Largest rho with sorted[rho-1] > (cumsum(rho) - 1) / rho; the threshold
  // formula is invariant to how ties are ordered.
  double cumsum = 0.0;
  double theta = 0.0;
  for (int j = 0; j < k; ++j) {
    cumsum += sorted[j];
    const double candidate = (cumsum - 1.0) / (j + 1);
    if (sorted[j] > candidate) {
      theta = candidate;
    }
  }
  Vector w(k);
  for (int i = 0; i < k; ++i) {
    w[i] = std::max(v[i] - theta, 0.0);
  }
  return DensityVector(space, std::move(w));
}

DensityVector project_simplex(const Vector& v) {
  return project_simplex(FiniteSpace(static_cast<int>(v.size())), v);
}

Vector zero_sum_projection(const Vector& v) {
  return v.array() - v.mean();
}

PairwiseOperator rbf_kernel_operator(const FiniteSpace& space,
                                     const std::vector<double>& positions,
                                     double lengthscale) {
  if (static_cast<int>(positions.size()) != space.size()) {
    throw std::invalid_argument("rbf_kernel_operator: position count != k");
  }
  if (!(lengthscale > 0.0)) {
    throw std::invalid_argument("rbf_kernel_operator: lengthscale <= 0");
  }
  return PairwiseOperator::from_function(space, [&](int i, int j) {
    const double d = (positions[i] - positions[j]) / lengthscale;
    return std::exp(-d * d);
  });
}

}  // namespace pairlab
