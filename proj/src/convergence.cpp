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

#include "pairlab/convergence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pairlab {

namespace {
constexpr double kAlignmentTol = 1e-10;
constexpr double kRankRelTol = 1e-8;

int numerical_rank(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > kRankRelTol * s(0)) ++rank;
  }
  return rank;
}

Matrix exact_symmetrize(Matrix m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}
}  // namespace

SoftmaxGenerator::SoftmaxGenerator(FiniteSpace space)
    : ParametricGenerator(space, space.size()) {}

DensityVector SoftmaxGenerator::density(const Vector& theta) const {
  if (theta.size() != param_dim()) {
    throw std::invalid_argument("SoftmaxGenerator: bad parameter size");
  }
  const Vector shifted = theta.array() - theta.maxCoeff();
  Vector q = shifted.array().exp();
  q /= q.sum();
  return DensityVector(space(), std::move(q));
}

Matrix SoftmaxGenerator::jacobian(const Vector& theta) const {
  const Vector q = density(theta).values();
  // d q_x / d theta_i = q_x (delta_xi - q_i)
  Matrix j = -q * q.transpose();
  j.diagonal() += q;
  return j;
}

Vector SoftmaxGenerator::logits_for(const DensityVector& target) const {
  for (int i = 0; i < target.size(); ++i) {
    if (target[i] <= 0.0) {
      throw std::invalid_argument(
          "SoftmaxGenerator::logits_for: target must be strictly positive");
    }
  }
  Vector logits = target.values().array().log();
  return logits.array() - logits.mean();
}

FreeSimplexGenerator::FreeSimplexGenerator(FiniteSpace space)
    : ParametricGenerator(space, space.size() - 1) {
  if (space.size() < 2) {
    throw std::invalid_argument("FreeSimplexGenerator: needs k >= 2");
  }
}

DensityVector FreeSimplexGenerator::density(const Vector& theta) const {
  if (theta.size() != param_dim()) {
    throw std::invalid_argument("FreeSimplexGenerator: bad parameter size");
  }
  const int k = space().size();
  Vector q(k);
  q.head(k - 1) = theta;
  q[k - 1] = 1.0 - theta.sum();
  return DensityVector(space(), std::move(q));
}

Matrix FreeSimplexGenerator::jacobian(const Vector& theta) const {
  if (theta.size() != param_dim()) {
    throw std::invalid_argument("FreeSimplexGenerator: bad parameter size");
  }
  const int k = space().size();
  Matrix j = Matrix::Zero(k, k - 1);
  j.topRows(k - 1) = Matrix::Identity(k - 1, k - 1);
  j.row(k - 1).setConstant(-1.0);
  return j;
}

Matrix hessian_at_alignment(const ParametricGenerator& gen,
                            const Vector& theta_star,
                            const DensityVector& target,
                            const PairwiseOperator& g_of_d) {
  if (g_of_d.space() != gen.space() || target.space() != gen.space()) {
    throw std::invalid_argument("hessian_at_alignment: space mismatch");
  }
  const DensityVector q = gen.density(theta_star);
  if ((q.values() - target.values()).norm() > kAlignmentTol) {
    throw std::invalid_argument(
        "hessian_at_alignment: theta_star is not aligned with the target");
  }
  const Matrix j = gen.jacobian(theta_star);
  return exact_symmetrize(2.0 * j.transpose() * g_of_d.entries() * j);
}

TangentBasis tangent_space(const ParametricGenerator& gen,
                           const Vector& theta_star) {
  const Matrix j = gen.jacobian(theta_star);
  const int n = gen.param_dim();
  Eigen::JacobiSVD<Matrix> svd(j, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double sigma_max = s.size() > 0 ? s(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (sigma_max > 0.0 && s(i) > kRankRelTol * sigma_max) ++rank;
  }
  const Matrix v = svd.matrixV();
  TangentBasis basis;
  basis.complement = v.leftCols(rank);
  basis.tangent = v.rightCols(n - rank);
  return basis;
}

SufficiencyReport check_sufficient(const ParametricGenerator& gen,
                                   const Vector& theta_star,
                                   const PairwiseOperator& a) {
  const DensityVector q = gen.density(theta_star);
  const Matrix h = hessian_at_alignment(gen, theta_star, q, a);
  const TangentBasis basis = tangent_space(gen, theta_star);

  SufficiencyReport report;
  report.tangent_dim = basis.dim_tangent();
  report.operator_rank = numerical_rank(a.entries());
  report.pd_tolerance =
      1e-10 * std::abs(h.trace()) / static_cast<double>(gen.param_dim());

  if (basis.dim_complement() == 0) {
    // No density-changing direction exists; the condition is vacuous.
    report.min_margin = std::numeric_limits<double>::infinity();
    report.verdict = Sufficiency::kSufficient;
    return report;
  }

  const Matrix restricted = exact_symmetrize(
      basis.complement.transpose() * h * basis.complement);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(restricted);
  report.restricted_spectrum = eig.eigenvalues();
  report.min_margin = report.restricted_spectrum.minCoeff();
  report.verdict = report.min_margin > report.pd_tolerance
                       ? Sufficiency::kSufficient
                       : Sufficiency::kInsufficient;
  return report;
}

std::pair<PairwiseOperator, PairwiseOperator> minimally_sufficient_operators(
    const ParametricGenerator& gen, const Vector& theta_star) {
  const DensityVector q = gen.density(theta_star);
  const Matrix j = gen.jacobian(theta_star);
  const Matrix a1 = exact_symmetrize(j * j.transpose());

  for (int i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) {
      throw std::domain_error(
          "minimally_sufficient_operators: zero density entry, the "
          "log-density operator is undefined");
    }
  }
  const Matrix dq_j = q.values().cwiseInverse().asDiagonal() * j;
  const Matrix a2 = exact_symmetrize(dq_j * dq_j.transpose());
  return {PairwiseOperator(gen.space(), a1), PairwiseOperator(gen.space(), a2)};
}

double l_star_loss(const ParametricGenerator& gen, const Vector& theta,
                   const DensityVector& target, int which) {
  if (which != 1 && which != 2) {
    throw std::invalid_argument("l_star_loss: which must be 1 or 2");
  }
  if (target.space() != gen.space()) {
    throw std::invalid_argument("l_star_loss: space mismatch");
  }
  const DensityVector q = gen.density(theta);
  const Matrix j = gen.jacobian(theta);
  const int n = gen.param_dim();

  Vector expectation_gap = Vector::Zero(n);
  if (which == 1) {
    expectation_gap = j.transpose() * (target.values() - q.values());
  } else {
    // E_p[grad log q] - E_q[grad log q]; the model expectation is summed
    // explicitly rather than assumed zero.
    Vector e_p = Vector::Zero(n);
    Vector e_q = Vector::Zero(n);
    for (int x = 0; x < q.size(); ++x) {
      if (q[x] <= 0.0) {
        if (target[x] > 0.0) {
          throw std::domain_error(
              "l_star_loss: target support exceeds model support");
        }
        continue;
      }
      const Vector grad_log = j.row(x).transpose() / q[x];
      e_p += target[x] * grad_log;
      e_q += q[x] * grad_log;
    }
    expectation_gap = e_p - e_q;
  }
  return expectation_gap.squaredNorm();
}

GdRateReport gd_rate_analysis(const Matrix& hessian_matrix,
                              const TangentBasis& basis, double step_size) {
  if ((hessian_matrix - hessian_matrix.transpose()).norm() >
      1e-10 * (1.0 + hessian_matrix.norm())) {
    throw std::invalid_argument("gd_rate_analysis: Hessian not symmetric");
  }
  GdRateReport report;
  if (basis.dim_complement() == 0) {
    report.h_bound = std::numeric_limits<double>::infinity();
    report.contracting = true;
    return report;
  }
  const Matrix restricted = exact_symmetrize(
      basis.complement.transpose() * hessian_matrix * basis.complement);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(restricted);
  report.restricted_eigenvalues = eig.eigenvalues();

  double lambda_max_abs = 0.0;
  bool divergent = false;
  for (int i = 0; i < report.restricted_eigenvalues.size(); ++i) {
    const double mu = report.restricted_eigenvalues[i];
    lambda_max_abs = std::max(lambda_max_abs, std::abs(1.0 - step_size * mu));
    if (mu <= 0.0) divergent = true;
  }
  const double mu_max = report.restricted_eigenvalues.maxCoeff();
  report.lambda_max_abs = lambda_max_abs;
  report.h_bound = mu_max > 0.0 ? 2.0 / mu_max
                                : std::numeric_limits<double>::infinity();
  report.divergent_mode = divergent;
  report.contracting = lambda_max_abs < 1.0;
  return report;
}

GameTrajectory gd_converge_to_manifold(const ParametricGenerator& gen,
                                       const DensityVector& target,
                                       const PairwiseOperator& a_fixed,
                                       const Vector& theta0, double step_size,
                                       int max_steps) {
  if (a_fixed.space() != gen.space() || target.space() != gen.space()) {
    throw std::invalid_argument("gd_converge_to_manifold: space mismatch");
  }
  GameTrajectory traj;
  traj.columns = {"step", "distance", "loss"};
  traj.metadata["step_size"] = std::to_string(step_size);

  Vector theta = theta0;
  std::vector<double> distances;
  distances.reserve(max_steps + 1);
  bool diverged = false;
  for (int t = 0; t <= max_steps; ++t) {
    const DensityVector q = gen.density(theta);
    const Vector diff = target.values() - q.values();
    const double distance = diff.norm();
    const double loss = diff.dot(a_fixed.entries() * diff);
    traj.add_row({static_cast<double>(t), distance, loss});
    distances.push_back(distance);
    if (t > 0 && distances.front() > 0.0 &&
        distance > 10.0 * distances.front()) {
      diverged = true;
      break;
    }
    if (t == max_steps) break;
    const Vector grad =
        -2.0 * gen.jacobian(theta).transpose() * (a_fixed.entries() * diff);
    theta -= step_size * grad;
  }
  traj.metadata["diverged"] = diverged ? "true" : "false";
  const double tail_ratio = tail_contraction_ratio(distances);
  traj.metadata["tail_contraction_ratio"] = std::to_string(tail_ratio);
  traj.metadata["geometric_decay"] =
      !diverged && tail_ratio < 1.0 ? "true" : "false";
  return traj;
}

double tail_contraction_ratio(const std::vector<double>& distances,
                              double fraction, double floor) {
  if (distances.size() < 2) return 0.0;
  const std::size_t start =
      static_cast<std::size_t>(static_cast<double>(distances.size()) *
                               (1.0 - fraction));
  std::size_t first = std::string::npos;
  std::size_t last = std::string::npos;
  for (std::size_t t = start; t < distances.size(); ++t) {
    if (distances[t] > floor) {
      if (first == std::string::npos) first = t;
      last = t;
    } else {
      break;  // once on the noise floor, stay out of the fit
    }
  }
  if (first == std::string::npos || last <= first) return 0.0;
  return std::pow(distances[last] / distances[first],
                  1.0 / static_cast<double>(last - first));
}

PerturbationCheck check_candidate_perturbation(const PairwiseOperator& a,
                                               const DensityVector& p,
                                               const Vector& epsilon) {
  if (epsilon.size() != p.size() || a.space() != p.space()) {
    throw std::invalid_argument("check_candidate_perturbation: dim mismatch");
  }
  PerturbationCheck check;
  const double mass = epsilon.sum();
  bool nonneg = true;
  for (int i = 0; i < epsilon.size(); ++i) {
    if (p[i] + epsilon[i] < -1e-12) nonneg = false;
  }
  check.admissible = std::abs(mass) <= 1e-12 && nonneg;
  check.quadratic_form = epsilon.dot(a.entries() * epsilon);
  check.detected = check.admissible && check.quadratic_form > 0.0;
  return check;
}

}  // namespace pairlab
