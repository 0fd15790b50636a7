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

#ifndef PAIRLAB_CONVERGENCE_HPP_
#define PAIRLAB_CONVERGENCE_HPP_

#include <utility>

#include "pairlab/function_space.hpp"
#include "pairlab/trajectory.hpp"

namespace pairlab {

/// A differentiable map theta -> q(. ; theta) onto the simplex, with
/// Jacobian access. Columns of the k-by-n Jacobian sum to zero (mass is
/// conserved along every parameter direction).
class ParametricGenerator {
 public:
  ParametricGenerator(FiniteSpace space, int param_dim)
      : space_(std::move(space)), param_dim_(param_dim) {}
  virtual ~ParametricGenerator() = default;

  const FiniteSpace& space() const { return space_; }
  int param_dim() const { return param_dim_; }

  virtual DensityVector density(const Vector& theta) const = 0;
  /// d q(x) / d theta_i arranged k-by-n.
  virtual Matrix jacobian(const Vector& theta) const = 0;

 private:
  FiniteSpace space_;
  int param_dim_;
};

/// q = softmax(theta), theta in R^k. Overparameterized by the common shift
/// direction, so the reparametrization manifold has a one-dimensional
/// tangent space everywhere.
class SoftmaxGenerator : public ParametricGenerator {
 public:
  explicit SoftmaxGenerator(FiniteSpace space);
  DensityVector density(const Vector& theta) const override;
  Matrix jacobian(const Vector& theta) const override;

  /// Logits reproducing a given positive density (zero-mean convention).
  Vector logits_for(const DensityVector& target) const;
};

/// theta holds the first k-1 probabilities; the last one is 1 - sum.
/// The Jacobian is injective, so the tangent space is trivial.
class FreeSimplexGenerator : public ParametricGenerator {
 public:
  explicit FreeSimplexGenerator(FiniteSpace space);
  DensityVector density(const Vector& theta) const override;
  Matrix jacobian(const Vector& theta) const override;
};

/// Orthonormal split of parameter space at theta*: `tangent` spans the
/// directions with no first-order effect on the density (the tangent of
/// the reparametrization manifold), `complement` spans the rest.
struct TangentBasis {
  Matrix tangent;     // n x (n - r), may have zero columns
  Matrix complement;  // n x r
  int dim_tangent() const { return static_cast<int>(tangent.cols()); }
  int dim_complement() const { return static_cast<int>(complement.cols()); }
};

enum class Sufficiency { kSufficient, kInsufficient };

/// Spectrum of the Hessian restricted to the tangent complement, with the
/// positive-definiteness verdict for the operator that produced it.
struct SufficiencyReport {
  Vector restricted_spectrum;  // ascending
  double min_margin = 0.0;
  double pd_tolerance = 0.0;
  int operator_rank = 0;
  int tangent_dim = 0;
  Sufficiency verdict = Sufficiency::kInsufficient;

  bool sufficient() const { return verdict == Sufficiency::kSufficient; }
};

/// Generator Hessian at an aligned parameter point:
///   H = 2 J^T G J,  J = jacobian(theta_star),  G = g(D(x, y)) entrywise.
/// theta_star must reproduce the target density to within 1e-10; away from
/// alignment the second-derivative terms of q do not cancel and the
/// formula is wrong, so misalignment is an error.
Matrix hessian_at_alignment(const ParametricGenerator& gen,
                            const Vector& theta_star,
                            const DensityVector& target,
                            const PairwiseOperator& g_of_d);

/// Splits R^n into the null space of the Jacobian (tangent) and its
/// orthogonal complement via SVD; singular values below 1e-8 * sigma_max
/// count as zero.
TangentBasis tangent_space(const ParametricGenerator& gen,
                           const Vector& theta_star);

/// Verdict on <eps_u, A eps_u> > 0 over all first-order density
/// perturbations reachable by the generator at theta_star.
SufficiencyReport check_sufficient(const ParametricGenerator& gen,
                                   const Vector& theta_star,
                                   const PairwiseOperator& a);

/// The constructive minimally sufficient pair at theta_star:
///   A*_1 = J J^T,  A*_2 = (D_q J)(D_q J)^T with D_q = diag(1 / q(x)).
/// A*_2 requires a strictly positive density.
std::pair<PairwiseOperator, PairwiseOperator> minimally_sufficient_operators(
    const ParametricGenerator& gen, const Vector& theta_star);

/// Squared norm of the expectation gap of grad_theta q (which = 1) or
/// grad_theta log q (which = 2) between the target and the model.
double l_star_loss(const ParametricGenerator& gen, const Vector& theta,
                   const DensityVector& target, int which);

struct GdRateReport {
  Vector restricted_eigenvalues;  // ascending
  double lambda_max_abs = 0.0;    // max |1 - h mu| over the restriction
  double h_bound = 0.0;           // 2 / mu_max
  bool divergent_mode = false;    // some restricted mu <= 0
  bool contracting = false;       // lambda_max_abs < 1
};

/// Eigenvalue map lambda = 1 - h mu of the gradient-descent update
/// operator, restricted to the tangent complement.
GdRateReport gd_rate_analysis(const Matrix& hessian_matrix,
                              const TangentBasis& basis, double step_size);

/// Plain gradient descent on <p - q(theta), A (p - q(theta))> with a fixed
/// operator A. Records step, ||q - p|| and the loss per step; growth of
/// the distance past 10x its initial value flags divergence in the
/// trajectory metadata (no exception).
GameTrajectory gd_converge_to_manifold(const ParametricGenerator& gen,
                                       const DensityVector& target,
                                       const PairwiseOperator& a_fixed,
                                       const Vector& theta0, double step_size,
                                       int max_steps);

/// Geometric contraction ratio fitted over the tail of a distance series
/// (last `fraction` of the steps, ignoring values at or below `floor`
/// where rounding noise dominates). Returns 0 when fewer than two usable
/// points remain, i.e. the run converged before a tail formed.
double tail_contraction_ratio(const std::vector<double>& distances,
                              double fraction = 0.5, double floor = 1e-11);

struct PerturbationCheck {
  bool admissible = false;      // <eps, e> = 0 and p + eps >= 0
  double quadratic_form = 0.0;  // <eps, A eps>
  bool detected = false;        // admissible and quadratic form > 0
};

/// Checks one caller-supplied density perturbation against the
/// non-parametric positive-definiteness condition for A at p.
PerturbationCheck check_candidate_perturbation(const PairwiseOperator& a,
                                               const DensityVector& p,
                                               const Vector& epsilon);

}  // namespace pairlab

#endif  // PAIRLAB_CONVERGENCE_HPP_
