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

#ifndef PAIRLAB_TOY_GAMES_HPP_
#define PAIRLAB_TOY_GAMES_HPP_

#include <array>
#include <vector>

#include "pairlab/function_space.hpp"
#include "pairlab/trajectory.hpp"

namespace pairlab {

/// Which player moves first inside one alternating iteration.
enum class UpdateOrder { kDiscriminatorFirst, kGeneratorFirst };

/// One-point generator state: the fake sample position and the single
/// discriminator parameter. The real sample sits at 0.
struct DiracState {
  double x_fake = 0.0;
  double psi = 0.0;
};

struct DiracPairConfig {
  double gamma = 2.0;
  double lr_gen = 0.1;
  double lr_disc = 0.1;
  int steps = 2000;
  UpdateOrder order = UpdateOrder::kDiscriminatorFirst;

  void validate() const;
};

enum class DiracGame { kSgan, kPairgan };

/// Reduced zero-sum objective of the unary game,
/// L(psi, x) = -log(1 + exp(psi * x)); psi ascends, x descends.
double dirac_sgan_loss(const DiracState& s);

/// Reduced zero-sum objective of the pairwise game,
/// L(psi, x) = -log(1 + exp(psi * |x|^gamma)).
double dirac_pairgan_loss(const DiracState& s, double gamma);

/// One alternating iteration of the unary game.
DiracState dirac_sgan_step(const DiracState& s, double lr_gen, double lr_disc,
                           UpdateOrder order = UpdateOrder::kDiscriminatorFirst);

/// One alternating iteration of the pairwise game. The derivative of
/// |x|^gamma at x = 0 is taken to be 0, so x_fake = 0 is preserved
/// bit-exactly for every psi.
DiracState dirac_pairgan_step(const DiracState& s, const DiracPairConfig& cfg);

/// Raw simultaneous-update direction (-dL/dx, +dL/dpsi) at a state.
/// Step deltas equal these components times the respective learning rate.
std::array<double, 2> dirac_field(const DiracState& s, DiracGame game,
                                  double gamma);

struct FieldGrid {
  double x_min = -2.0, x_max = 2.0;
  double psi_min = -2.0, psi_max = 2.0;
  int resolution = 41;
};

struct VectorFieldSample {
  double x = 0.0;
  double psi = 0.0;
  double dx = 0.0;
  double dpsi = 0.0;
};

std::vector<VectorFieldSample> dirac_vector_field(const FieldGrid& grid,
                                                  DiracGame game,
                                                  const DiracPairConfig& cfg);

/// Full trajectory of either Dirac game. Columns: step, x_fake, psi, loss.
GameTrajectory run_dirac(DiracGame game, DiracState s0,
                         const DiracPairConfig& cfg);

struct PairganZOptions {
  double alpha = 0.1;   // generator step on the simplex
  double beta = 0.1;    // rank-1 discriminator step
  int steps = 200;
  UpdateOrder order = UpdateOrder::kGeneratorFirst;
  bool record_operator_snapshots = false;

  void validate() const;
};

struct PairganZRun {
  /// Columns: step, q_0..q_{k-1}, metric, min_eig, max_eig.
  GameTrajectory trajectory;
  /// Per-step copies of A, only when record_operator_snapshots is set.
  std::vector<Matrix> operator_snapshots;
  /// First step with min_eig > 0, or -1 if never observed.
  int first_pd_step = -1;
};

/// Alternating projected gradient descent of the zero-sum simplex game:
///   q <- proj_simplex(q - alpha * 2 A (q - p))
///   A <- A + beta * (p - q)(p - q)^T
/// The metric column holds <p - q, A (p - q)> at the recorded state.
PairganZRun pairgan_z_iterate(const DensityVector& p, const DensityVector& q0,
                              const PairwiseOperator& a0,
                              const PairganZOptions& opts);

/// Three delta distributions on the line plus both discriminator
/// parameterizations: 9 quadratic-logit parameters (a_i, b_i, c_i per
/// class) for the unary softmax classifier, one slope for the pairwise
/// game.
struct MultiDeltaState {
  std::array<double, 3> points{};
  std::array<double, 9> unary_params{};
  double pair_psi = 0.0;
};

/// Softmax log-likelihood of the 3-class unary classifier at the three
/// points, with quadratic logits s_i(x) = a_i x^2 + b_i x + c_i.
double multi_unary_loss(const MultiDeltaState& s);
std::array<double, 9> multi_unary_psi_gradient(const MultiDeltaState& s);
std::array<double, 3> multi_unary_point_gradient(const MultiDeltaState& s);

/// One alternating iteration: psi ascends the log-likelihood, then the
/// points descend it.
MultiDeltaState multi_unary_step(const MultiDeltaState& s, double lr);

/// Reduced zero-sum objective of the pairwise three-point game,
/// L = -sum_{i != j} log(1 + exp(psi |x_i - x_j|^gamma)).
double multi_pairwise_loss(const MultiDeltaState& s, double gamma);
double multi_pairwise_psi_gradient(const MultiDeltaState& s, double gamma);
std::array<double, 3> multi_pairwise_point_gradient(const MultiDeltaState& s,
                                                    double gamma);

/// One alternating iteration of the pairwise game. Equal points receive
/// identical gradients; points that come within 1e-14 of each other are
/// consolidated so a formed merge never re-splits.
MultiDeltaState multi_pairwise_step(const MultiDeltaState& s, double gamma,
                                    double lr);

/// Columns: step, x1, x2, x3, a1, b1, c1, ..., c3, loss.
GameTrajectory run_multi_unary(MultiDeltaState s0, double lr, int steps);
/// Columns: step, x1, x2, x3, psi, loss.
GameTrajectory run_multi_pairwise(MultiDeltaState s0, double gamma, double lr,
                                  int steps);

}  // namespace pairlab

#endif  // PAIRLAB_TOY_GAMES_HPP_
