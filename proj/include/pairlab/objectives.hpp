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

#ifndef PAIRLAB_OBJECTIVES_HPP_
#define PAIRLAB_OBJECTIVES_HPP_

#include <cstdint>

#include "pairlab/function_space.hpp"

namespace pairlab {

/// Joint mixture distributions over pairs:
///   m_plus  = (p x p + q x q) / 2   (same-distribution pairs)
///   m_minus = (p x q + q x p) / 2   (cross-distribution pairs)
///   m       = (m_plus + m_minus) / 2
struct MixtureTriple {
  Matrix m_plus;
  Matrix m_minus;
  Matrix m;
};

/// The lower bound of the discriminator range [eps, 1] in the zero-sum game.
class EpsFloor {
 public:
  explicit EpsFloor(double eps);
  double value() const { return eps_; }

 private:
  double eps_;
};

/// Counts discriminator values that had to be clamped to [1e-15, 1 - 1e-15]
/// before a log was taken.
struct ClampStats {
  std::int64_t clamped = 0;
};

/// Entrywise f(D(x, y)). Values within f's log-safe range pass through
/// unchanged; values closer than 1e-15 to {0, 1} are clamped and counted.
PairwiseOperator apply_activation(const PairwiseOperator& d,
                                  const ScalarFunction& f,
                                  ClampStats* stats = nullptr);

/// Discriminator loss of the non-zero-sum pairwise game:
///   <p, A^f1 p> + <q, A^f1 q> + <p, A^f2 q> + <q, A^f2 p>.
/// All entries of d must lie strictly in (0, 1).
double pairgan_discriminator_loss(const PairwiseOperator& d,
                                  const DensityVector& p,
                                  const DensityVector& q,
                                  const ActivationTriple& act,
                                  ClampStats* stats = nullptr);

/// Generator loss <p - q, A^g (p - q)>. Entries of d must lie in (0, 1].
double pairgan_generator_loss(const PairwiseOperator& d,
                              const DensityVector& p, const DensityVector& q,
                              const ActivationTriple& act,
                              ClampStats* stats = nullptr);

/// Raw generator gradient of the unary game: the vector g2(D(x)).
/// Stationarity at alignment must be judged after projecting onto the
/// admissible (zero-sum, support-restricted) directions.
Vector unary_generator_gradient(const Vector& d_unary,
                                const ScalarFunction& g2);

/// g2(D(x)) centered over the support of p and zeroed off-support: the
/// component of the unary gradient visible to admissible perturbations.
Vector projected_unary_gradient(const Vector& d_unary,
                                const ScalarFunction& g2,
                                const DensityVector& p);

/// Gradient of the pairwise generator loss w.r.t. q: -2 A^g (p - q).
/// Identically zero at q = p for every discriminator.
Vector pairwise_generator_gradient(const PairwiseOperator& d,
                                   const DensityVector& p,
                                   const DensityVector& q,
                                   const ActivationTriple& act);

MixtureTriple mixtures(const DensityVector& p, const DensityVector& q);

/// Pointwise optimal discriminator of the non-zero-sum game,
/// D*(x, y) = m_plus / (2 m), with the 0/0 convention D* = 1/2 where the
/// pair (x, y) carries no mass at all. Values lie in [0, 1].
PairwiseOperator optimal_discriminator_pairgan(const DensityVector& p,
                                               const DensityVector& q);

/// Optimal discriminator of the zero-sum game over [eps, 1]: 1 where
/// F(x,y) = (p-q)(x) (p-q)(y) >= 0 and eps where F < 0.
PairwiseOperator optimal_discriminator_pairgan_z(const DensityVector& p,
                                                 const DensityVector& q,
                                                 EpsFloor eps);

/// KL(a || b) over k-by-k joint densities with the conventions
/// 0 log(0/y) = 0 and x log(x/0) = +infinity for x > 0.
/// When infinite, *finite is set to false and the value is +infinity.
double kl_divergence(const Matrix& a, const Matrix& b, bool* finite = nullptr);

/// L1 mixture distance sum_{x,y} |a - b|. This is the convention under
/// which the optimal zero-sum generator loss equals -log(eps) times the
/// distance exactly (twice the half-sum convention).
double tv_distance(const Matrix& a, const Matrix& b);

struct IdentityCheckResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool finite = true;
};

/// Both sides of the symmetrized-KL identity, computed by independent
/// routes: lhs is the generator loss at the optimal discriminator, rhs is
/// 4 (KL(m_plus || m) + KL(m || m_plus)). A zero of m_plus inside the
/// support of m makes both sides +infinity and clears `finite`.
IdentityCheckResult sym_kl_identity_check(const DensityVector& p,
                                          const DensityVector& q);

/// Both sides of the total-variation identity for the zero-sum game:
/// lhs is the generator loss at the [eps, 1]-optimal discriminator, rhs is
/// -log(eps) * tv_distance(m_plus, m_minus).
IdentityCheckResult tv_identity_check(const DensityVector& p,
                                      const DensityVector& q, EpsFloor eps);

}  // namespace pairlab

#endif  // PAIRLAB_OBJECTIVES_HPP_
