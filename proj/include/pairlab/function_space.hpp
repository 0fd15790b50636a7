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

#ifndef PAIRLAB_FUNCTION_SPACE_HPP_
#define PAIRLAB_FUNCTION_SPACE_HPP_

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace pairlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A finite object set {x_1, ..., x_k}. Functions over it are plain
/// k-vectors; joint functions over pairs are k-by-k matrices.
class FiniteSpace {
 public:
  explicit FiniteSpace(int size, std::vector<std::string> labels = {});

  int size() const { return size_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Spaces are interchangeable when they have the same cardinality.
  friend bool operator==(const FiniteSpace& a, const FiniteSpace& b) {
    return a.size_ == b.size_;
  }
  friend bool operator!=(const FiniteSpace& a, const FiniteSpace& b) {
    return !(a == b);
  }

 private:
  int size_;
  std::vector<std::string> labels_;
};

/// A point on the probability simplex over a FiniteSpace.
///
/// Construction enforces nonnegative entries and unit mass: deviations of
/// the total mass below 1e-9 are renormalized away, larger ones are
/// rejected. After construction the mass is 1 within 1e-12.
class DensityVector {
 public:
  DensityVector(FiniteSpace space, Vector values);

  const FiniteSpace& space() const { return space_; }
  const Vector& values() const { return values_; }
  int size() const { return space_.size(); }
  double operator[](int i) const { return values_[i]; }

  static DensityVector uniform(const FiniteSpace& space);
  static DensityVector delta(const FiniteSpace& space, int at);

 private:
  FiniteSpace space_;
  Vector values_;
};

/// The all-ones vector e with <p, e> = 1 for every density p.
Vector all_ones(const FiniteSpace& space);

/// A symmetric k-by-k array of reals, i.e. a self-adjoint operator on the
/// function space. Holds f(D(x, y)) for a symmetric discriminator D and an
/// entrywise activation f.
class PairwiseOperator {
 public:
  /// Requires exactly symmetric entries; throws otherwise. Use
  /// from_function() to build from a possibly asymmetric raw function.
  PairwiseOperator(FiniteSpace space, Matrix entries);

  /// Builds the operator from a raw pairwise function, symmetrizing it as
  /// (D(x,y) + D(y,x)) / 2. Whether symmetrization changed any entry is
  /// recorded and queryable via symmetrized_input().
  static PairwiseOperator from_function(
      const FiniteSpace& space, const std::function<double(int, int)>& fn);

  const FiniteSpace& space() const { return space_; }
  const Matrix& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

  /// True iff from_function() had to alter at least one entry.
  bool symmetrized_input() const { return symmetrized_input_; }

 private:
  FiniteSpace space_;
  Matrix entries_;
  bool symmetrized_input_ = false;
};

/// A scalar real -> real map with derivative access. `in_domain` (when
/// set) rejects invalid discriminator values with a domain error; the
/// clamp window keeps admissible values a safe distance from log
/// singularities, and every clamped evaluation is counted by the caller.
struct ScalarFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<bool(double)> in_domain;
  double clamp_lo = -std::numeric_limits<double>::infinity();
  double clamp_hi = std::numeric_limits<double>::infinity();
};

/// The (f1, f2, g) activations of the pairwise game.
struct ActivationTriple {
  ScalarFunction f1;
  ScalarFunction f2;
  ScalarFunction g;

  /// f1(t) = -log t and f2(t) = -log(1 - t) on (0, 1); g(t) = log t on
  /// t > 0, so the zero-sum optimal discriminator value 1 is admissible.
  static ActivationTriple log_instance();
};

/// <a, b> = sum_x a(x) b(x). Throws on dimension mismatch.
double inner_product(const Vector& a, const Vector& b);

/// <p, A q> = sum_{x,y} p(x) A(x,y) q(y).
double bilinear_form(const Vector& p, const PairwiseOperator& a,
                     const Vector& q);
double bilinear_form(const DensityVector& p, const PairwiseOperator& a,
                     const DensityVector& q);

/// (A q)(x) = sum_y A(x, y) q(y).
Vector apply_operator(const PairwiseOperator& a, const Vector& q);
Vector apply_operator(const PairwiseOperator& a, const DensityVector& q);

/// Euclidean projection of v onto the probability simplex, by the
/// sort-then-threshold rule. Idempotent; throws on non-finite input.
DensityVector project_simplex(const FiniteSpace& space, const Vector& v);
DensityVector project_simplex(const Vector& v);

/// Orthogonal projection of v onto the zero-sum subspace {u : <u, e> = 0}.
Vector zero_sum_projection(const Vector& v);

/// Gaussian kernel operator A(x, y) = exp(-(pos_x - pos_y)^2 / lengthscale^2)
/// over labeled point positions. Positive definite for distinct positions.
PairwiseOperator rbf_kernel_operator(const FiniteSpace& space,
                                     const std::vector<double>& positions,
                                     double lengthscale = 1.0);

}  // namespace pairlab

#endif  // PAIRLAB_FUNCTION_SPACE_HPP_
