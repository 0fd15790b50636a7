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

#include "pairlab/toy_games.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pairlab {

namespace {

constexpr double kMergeTol = 1e-14;

double sigmoid(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) {
  if (t > 0.0) {
    return t + std::log1p(std::exp(-t));
  }
  return std::log1p(std::exp(t));
}

// d/dx |x|^gamma, with the symmetric choice 0 at x = 0 (exact, so that
// alignment is a bit-exact fixed point).
double abs_pow_derivative(double x, double gamma) {
  if (x == 0.0) return 0.0;
  const double d = std::abs(x);
  const double s = x > 0.0 ? 1.0 : -1.0;
  return gamma * std::pow(d, gamma - 1.0) * s;
}

double sgan_dpsi(const DiracState& s) {
  return -sigmoid(s.psi * s.x_fake) * s.x_fake;
}

double sgan_dx(const DiracState& s) {
  return -sigmoid(s.psi * s.x_fake) * s.psi;
}

double pairgan_dpsi(const DiracState& s, double gamma) {
  const double u = std::pow(std::abs(s.x_fake), gamma);
  return -sigmoid(s.psi * u) * u;
}

double pairgan_dx(const DiracState& s, double gamma) {
  if (s.x_fake == 0.0) return 0.0;
  const double u = std::pow(std::abs(s.x_fake), gamma);
  return -sigmoid(s.psi * u) * s.psi * abs_pow_derivative(s.x_fake, gamma);
}

// Gradient of the pairwise three-point loss w.r.t. the first argument,
// restricted to one unordered pair (which enters the loss twice).
double pair_point_grad(double xi, double xj, double psi, double gamma) {
  if (xi == xj) return 0.0;
  const double d = std::abs(xi - xj);
  const double u = psi * std::pow(d, gamma);
  return -2.0 * sigmoid(u) * psi * abs_pow_derivative(xi - xj, gamma);
}

std::array<double, 3> softmax3(const std::array<double, 3>& s) {
  const double m = std::max({s[0], s[1], s[2]});
  std::array<double, 3> e{std::exp(s[0] - m), std::exp(s[1] - m),
                          std::exp(s[2] - m)};
  const double z = e[0] + e[1] + e[2];
  return {e[0] / z, e[1] / z, e[2] / z};
}

std::array<double, 3> logits_at(const MultiDeltaState& s, double x) {
  std::array<double, 3> out{};
  for (int j = 0; j < 3; ++j) {
    const double a = s.unary_params[3 * j];
    const double b = s.unary_params[3 * j + 1];
    const double c = s.unary_params[3 * j + 2];
    out[j] = a * x * x + b * x + c;
  }
  return out;
}

void snap_merged_points(std::array<double, 3>& x) {
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(x[i] - x[j]) <= kMergeTol) {
        x[j] = x[i];
      }
    }
  }
}

}  // namespace

void DiracPairConfig::validate() const {
  if (!(gamma >= 1.0)) {
    throw std::invalid_argument("DiracPairConfig: gamma must be >= 1");
  }
  if (!(lr_gen > 0.0) || !(lr_disc > 0.0)) {
    throw std::invalid_argument("DiracPairConfig: learning rates must be > 0");
  }
  if (steps < 0) {
    throw std::invalid_argument("DiracPairConfig: steps must be >= 0");
  }
}

void PairganZOptions::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("PairganZOptions: alpha, beta must be > 0");
  }
  if (steps < 0) {
    throw std::invalid_argument("PairganZOptions: steps must be >= 0");
  }
}

double dirac_sgan_loss(const DiracState& s) {
  return -softplus(s.psi * s.x_fake);
}

double dirac_pairgan_loss(const DiracState& s, double gamma) {
  return -softplus(s.psi * std::pow(std::abs(s.x_fake), gamma));
}

DiracState dirac_sgan_step(const DiracState& s, double lr_gen, double lr_disc,
                           UpdateOrder order) {
  DiracState out = s;
  if (order == UpdateOrder::kDiscriminatorFirst) {
    out.psi += lr_disc * sgan_dpsi(out);
    out.x_fake -= lr_gen * sgan_dx(out);
  } else {
    out.x_fake -= lr_gen * sgan_dx(out);
    out.psi += lr_disc * sgan_dpsi(out);
  }
  return out;
}

DiracState dirac_pairgan_step(const DiracState& s, const DiracPairConfig& cfg) {
  cfg.validate();
  DiracState out = s;
  if (cfg.order == UpdateOrder::kDiscriminatorFirst) {
    out.psi += cfg.lr_disc * pairgan_dpsi(out, cfg.gamma);
    out.x_fake -= cfg.lr_gen * pairgan_dx(out, cfg.gamma);
  } else {
    out.x_fake -= cfg.lr_gen * pairgan_dx(out, cfg.gamma);
    out.psi += cfg.lr_disc * pairgan_dpsi(out, cfg.gamma);
  }
  return out;
}

std::array<double, 2> dirac_field(const DiracState& s, DiracGame game,
                                  double gamma) {
  if (game == DiracGame::kSgan) {
    return {-sgan_dx(s), sgan_dpsi(s)};
  }
  return {-pairgan_dx(s, gamma), pairgan_dpsi(s, gamma)};
}

std::vector<VectorFieldSample> dirac_vector_field(const FieldGrid& grid,
                                                  DiracGame game,
                                                  const DiracPairConfig& cfg) {
  cfg.validate();
  if (grid.resolution < 2) {
    throw std::invalid_argument("dirac_vector_field: resolution must be >= 2");
  }
  std::vector<VectorFieldSample> samples;
  samples.reserve(static_cast<std::size_t>(grid.resolution) *
                  grid.resolution);
  const double dx = (grid.x_max - grid.x_min) / (grid.resolution - 1);
  const double dpsi = (grid.psi_max - grid.psi_min) / (grid.resolution - 1);
  for (int i = 0; i < grid.resolution; ++i) {
    for (int j = 0; j < grid.resolution; ++j) {
      DiracState s{grid.x_min + i * dx, grid.psi_min + j * dpsi};
      const auto f = dirac_field(s, game, cfg.gamma);
      samples.push_back({s.x_fake, s.psi, f[0], f[1]});
    }
  }
  return samples;
}

GameTrajectory run_dirac(DiracGame game, DiracState s0,
                         const DiracPairConfig& cfg) {
  cfg.validate();
  GameTrajectory traj;
  traj.columns = {"step", "x_fake", "psi", "loss"};
  DiracState s = s0;
  for (int t = 0; t <= cfg.steps; ++t) {
    const double loss = game == DiracGame::kSgan
                            ? dirac_sgan_loss(s)
                            : dirac_pairgan_loss(s, cfg.gamma);
    traj.add_row({static_cast<double>(t), s.x_fake, s.psi, loss});
    if (t == cfg.steps) break;
    s = game == DiracGame::kSgan
            ? dirac_sgan_step(s, cfg.lr_gen, cfg.lr_disc, cfg.order)
            : dirac_pairgan_step(s, cfg);
  }
  return traj;
}

PairganZRun pairgan_z_iterate(const DensityVector& p, const DensityVector& q0,
                              const PairwiseOperator& a0,
                              const PairganZOptions& opts) {
  opts.validate();
  if (p.space() != q0.space() || p.space() != a0.space()) {
    throw std::invalid_argument("pairgan_z_iterate: space mismatch");
  }
  const int k = p.size();

  PairganZRun run;
  GameTrajectory& traj = run.trajectory;
  traj.columns = {"step"};
  for (int i = 0; i < k; ++i) {
    traj.columns.push_back("q_" + std::to_string(i));
  }
  traj.columns.push_back("metric");
  traj.columns.push_back("min_eig");
  traj.columns.push_back("max_eig");

  Vector q = q0.values();
  Matrix a = a0.entries();

  auto record = [&](int t) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a,
                                              Eigen::EigenvaluesOnly);
    const double min_eig = eig.eigenvalues().minCoeff();
    const double max_eig = eig.eigenvalues().maxCoeff();
    const Vector d = p.values() - q;
    std::vector<double> row;
    row.reserve(traj.columns.size());
    row.push_back(static_cast<double>(t));
    for (int i = 0; i < k; ++i) row.push_back(q[i]);
    row.push_back(d.dot(a * d));
    row.push_back(min_eig);
    row.push_back(max_eig);
    traj.add_row(std::move(row));
    if (opts.record_operator_snapshots) {
      run.operator_snapshots.push_back(a);
    }
    if (run.first_pd_step < 0 && min_eig > 0.0) {
      run.first_pd_step = t;
    }
  };

  auto generator_step = [&] {
    const Vector grad = 2.0 * (a * (q - p.values()));
    q = project_simplex(p.space(), q - opts.alpha * grad).values();
  };
  auto discriminator_step = [&] {
    const Vector d = p.values() - q;
    a += opts.beta * (d * d.transpose());
  };

  for (int t = 0; t <= opts.steps; ++t) {
    record(t);
    if (t == opts.steps) break;
    if (opts.order == UpdateOrder::kGeneratorFirst) {
      generator_step();
      discriminator_step();
    } else {
      discriminator_step();
      generator_step();
    }
  }
  traj.metadata["first_pd_step"] =
      run.first_pd_step >= 0 ? std::to_string(run.first_pd_step) : "never";
  return run;
}

double multi_unary_loss(const MultiDeltaState& s) {
  double loss = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto probs = softmax3(logits_at(s, s.points[i]));
    loss += std::log(probs[i]);
  }
  return loss;
}

std::array<double, 9> multi_unary_psi_gradient(const MultiDeltaState& s) {
  std::array<double, 9> grad{};
  for (int i = 0; i < 3; ++i) {
    const double x = s.points[i];
    const auto probs = softmax3(logits_at(s, x));
    const std::array<double, 3> features{x * x, x, 1.0};
    for (int j = 0; j < 3; ++j) {
      const double w = (i == j ? 1.0 : 0.0) - probs[j];
      for (int f = 0; f < 3; ++f) {
        grad[3 * j + f] += w * features[f];
      }
    }
  }
  return grad;
}

std::array<double, 3> multi_unary_point_gradient(const MultiDeltaState& s) {
  std::array<double, 3> grad{};
  for (int i = 0; i < 3; ++i) {
    const double x = s.points[i];
    const auto probs = softmax3(logits_at(s, x));
    auto slope = [&](int j) {
      return 2.0 * s.unary_params[3 * j] * x + s.unary_params[3 * j + 1];
    };
    double mean_slope = 0.0;
    for (int j = 0; j < 3; ++j) {
      mean_slope += probs[j] * slope(j);
    }
    grad[i] = slope(i) - mean_slope;
  }
  return grad;
}

MultiDeltaState multi_unary_step(const MultiDeltaState& s, double lr) {
  if (!(lr > 0.0)) {
    throw std::invalid_argument("multi_unary_step: lr must be > 0");
  }
  MultiDeltaState out = s;
  const auto dpsi = multi_unary_psi_gradient(out);
  for (int i = 0; i < 9; ++i) {
    out.unary_params[i] += lr * dpsi[i];
  }
  const auto dx = multi_unary_point_gradient(out);
  for (int i = 0; i < 3; ++i) {
    out.points[i] -= lr * dx[i];
  }
  return out;
}

double multi_pairwise_loss(const MultiDeltaState& s, double gamma) {
  double loss = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const double d = std::abs(s.points[i] - s.points[j]);
      loss -= softplus(s.pair_psi * std::pow(d, gamma));
    }
  }
  return loss;
}

double multi_pairwise_psi_gradient(const MultiDeltaState& s, double gamma) {
  double grad = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const double u = std::pow(std::abs(s.points[i] - s.points[j]), gamma);
      grad -= sigmoid(s.pair_psi * u) * u;
    }
  }
  return grad;
}

std::array<double, 3> multi_pairwise_point_gradient(const MultiDeltaState& s,
                                                    double gamma) {
  std::array<double, 3> grad{};
  for (int i = 0; i < 3; ++i) {
    double g = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      g += pair_point_grad(s.points[i], s.points[j], s.pair_psi, gamma);
    }
    grad[i] = g;
  }
  return grad;
}

MultiDeltaState multi_pairwise_step(const MultiDeltaState& s, double gamma,
                                    double lr) {
  if (!(gamma >= 1.0)) {
    throw std::invalid_argument("multi_pairwise_step: gamma must be >= 1");
  }
  if (!(lr > 0.0)) {
    throw std::invalid_argument("multi_pairwise_step: lr must be > 0");
  }
  MultiDeltaState out = s;
  // Consolidate before differentiating: points already indistinguishable at
  // working precision move as one from here on.
  snap_merged_points(out.points);
  out.pair_psi += lr * multi_pairwise_psi_gradient(out, gamma);
  const auto dx = multi_pairwise_point_gradient(out, gamma);
  for (int i = 0; i < 3; ++i) {
    out.points[i] -= lr * dx[i];
  }
  return out;
}

GameTrajectory run_multi_unary(MultiDeltaState s0, double lr, int steps) {
  if (steps < 0) {
    throw std::invalid_argument("run_multi_unary: steps must be >= 0");
  }
  GameTrajectory traj;
  traj.columns = {"step", "x1", "x2", "x3", "a1", "b1", "c1",
                  "a2",   "b2", "c2", "a3", "b3", "c3", "loss"};
  MultiDeltaState s = s0;
  for (int t = 0; t <= steps; ++t) {
    std::vector<double> row{static_cast<double>(t), s.points[0], s.points[1],
                            s.points[2]};
    row.insert(row.end(), s.unary_params.begin(), s.unary_params.end());
    row.push_back(multi_unary_loss(s));
    traj.add_row(std::move(row));
    if (t == steps) break;
    s = multi_unary_step(s, lr);
  }
  return traj;
}

GameTrajectory run_multi_pairwise(MultiDeltaState s0, double gamma, double lr,
                                  int steps) {
  if (steps < 0) {
    throw std::invalid_argument("run_multi_pairwise: steps must be >= 0");
  }
  GameTrajectory traj;
  traj.columns = {"step", "x1", "x2", "x3", "psi", "loss"};
  MultiDeltaState s = s0;
  for (int t = 0; t <= steps; ++t) {
    traj.add_row({static_cast<double>(t), s.points[0], s.points[1],
                  s.points[2], s.pair_psi, multi_pairwise_loss(s, gamma)});
    if (t == steps) break;
    s = multi_pairwise_step(s, gamma, lr);
  }
  return traj;
}

}  // namespace pairlab
