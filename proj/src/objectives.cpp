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

#include "pairlab/objectives.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pairlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_space(const DensityVector& p, const DensityVector& q,
                        const char* where) {
  if (p.space() != q.space()) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch");
  }
}

double eval_scalar(const ScalarFunction& f, double t, ClampStats* stats) {
  if (f.in_domain && !f.in_domain(t)) {
    throw std::domain_error("activation: discriminator value " +
                            std::to_string(t) + " outside the domain");
  }
  double clamped = t;
  if (clamped < f.clamp_lo) {
    clamped = f.clamp_lo;
  } else if (clamped > f.clamp_hi) {
    clamped = f.clamp_hi;
  }
  if (clamped != t && stats != nullptr) {
    ++stats->clamped;
  }
  return f.value(clamped);
}

}  // namespace

EpsFloor::EpsFloor(double eps) : eps_(eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("EpsFloor: eps must lie in (0, 1)");
  }
}

PairwiseOperator apply_activation(const PairwiseOperator& d,
                                  const ScalarFunction& f, ClampStats* stats) {
  const int k = d.space().size();
  Matrix out(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const double v = eval_scalar(f, d(i, j), stats);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return PairwiseOperator(d.space(), std::move(out));
}

double pairgan_discriminator_loss(const PairwiseOperator& d,
                                  const DensityVector& p,
                                  const DensityVector& q,
                                  const ActivationTriple& act,
                                  ClampStats* stats) {
  require_same_space(p, q, "pairgan_discriminator_loss");
  if (d.space() != p.space()) {
    throw std::invalid_argument("pairgan_discriminator_loss: space mismatch");
  }
  const PairwiseOperator a_f1 = apply_activation(d, act.f1, stats);
  const PairwiseOperator a_f2 = apply_activation(d, act.f2, stats);
  return bilinear_form(p, a_f1, p) + bilinear_form(q, a_f1, q) +
         bilinear_form(p, a_f2, q) + bilinear_form(q, a_f2, p);
}

double pairgan_generator_loss(const PairwiseOperator& d,
                              const DensityVector& p, const DensityVector& q,
                              const ActivationTriple& act, ClampStats* stats) {
  require_same_space(p, q, "pairgan_generator_loss");
  if (d.space() != p.space()) {
    throw std::invalid_argument("pairgan_generator_loss: space mismatch");
  }
  const PairwiseOperator a_g = apply_activation(d, act.g, stats);
  const Vector diff = p.values() - q.values();
  return bilinear_form(diff, a_g, diff);
}

Vector unary_generator_gradient(const Vector& d_unary,
                                const ScalarFunction& g2) {
  Vector out(d_unary.size());
  for (int i = 0; i < d_unary.size(); ++i) {
    out[i] = eval_scalar(g2, d_unary[i], nullptr);
  }
  return out;
}

Vector projected_unary_gradient(const Vector& d_unary,
                                const ScalarFunction& g2,
                                const DensityVector& p) {
  if (d_unary.size() != p.size()) {
    throw std::invalid_argument("projected_unary_gradient: dim mismatch");
  }
  const Vector raw = unary_generator_gradient(d_unary, g2);
  double mean = 0.0;
  int support = 0;
  for (int i = 0; i < raw.size(); ++i) {
    if (p[i] > 0.0) {
      mean += raw[i];
      ++support;
    }
  }
  mean /= support;
  Vector out = Vector::Zero(raw.size());
  for (int i = 0; i < raw.size(); ++i) {
    if (p[i] > 0.0) {
      out[i] = raw[i] - mean;
    }
  }
  return out;
}

Vector pairwise_generator_gradient(const PairwiseOperator& d,
                                   const DensityVector& p,
                                   const DensityVector& q,
                                   const ActivationTriple& act) {
  require_same_space(p, q, "pairwise_generator_gradient");
  const PairwiseOperator a_g = apply_activation(d, act.g);
  return -2.0 * apply_operator(a_g, Vector(p.values() - q.values()));
}

MixtureTriple mixtures(const DensityVector& p, const DensityVector& q) {
  require_same_space(p, q, "mixtures");
  const Vector& pv = p.values();
  const Vector& qv = q.values();
  MixtureTriple t;
  t.m_plus = 0.5 * (pv * pv.transpose() + qv * qv.transpose());
  t.m_minus = 0.5 * (pv * qv.transpose() + qv * pv.transpose());
  t.m = 0.5 * (t.m_plus + t.m_minus);
  return t;
}

PairwiseOperator optimal_discriminator_pairgan(const DensityVector& p,
                                               const DensityVector& q) {
  require_same_space(p, q, "optimal_discriminator_pairgan");
  const MixtureTriple mix = mixtures(p, q);
  const int k = p.size();
  Matrix d(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      d(i, j) = mix.m(i, j) > 0.0 ? mix.m_plus(i, j) / (2.0 * mix.m(i, j))
                                  : 0.5;
    }
  }
  return PairwiseOperator(p.space(), std::move(d));
}

PairwiseOperator optimal_discriminator_pairgan_z(const DensityVector& p,
                                                 const DensityVector& q,
                                                 EpsFloor eps) {
  require_same_space(p, q, "optimal_discriminator_pairgan_z");
  const Vector diff = p.values() - q.values();
  const int k = p.size();
  Matrix d(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      d(i, j) = diff[i] * diff[j] >= 0.0 ? 1.0 : eps.value();
    }
  }
  return PairwiseOperator(p.space(), std::move(d));
}

double kl_divergence(const Matrix& a, const Matrix& b, bool* finite) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("kl_divergence: dimension mismatch");
  }
  if (finite != nullptr) *finite = true;
  double sum = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      const double x = a(i, j);
      const double y = b(i, j);
      if (x == 0.0) continue;
      if (y == 0.0) {
        if (finite != nullptr) *finite = false;
        return kInf;
      }
      sum += x * std::log(x / y);
    }
  }
  return sum;
}

double tv_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("tv_distance: dimension mismatch");
  }
  return (a - b).cwiseAbs().sum();
}

IdentityCheckResult sym_kl_identity_check(const DensityVector& p,
                                          const DensityVector& q) {
  require_same_space(p, q, "sym_kl_identity_check");
  const MixtureTriple mix = mixtures(p, q);
  const PairwiseOperator d_star = optimal_discriminator_pairgan(p, q);
  const Vector diff = p.values() - q.values();

  IdentityCheckResult res;

  // lhs: <p - q, log(D*) (p - q)> term by term; a zero of D* with nonzero
  // weight means the loss itself is infinite.
  double lhs = 0.0;
  bool lhs_finite = true;
  for (int i = 0; i < p.size() && lhs_finite; ++i) {
    for (int j = 0; j < p.size(); ++j) {
      const double w = diff[i] * diff[j];
      if (w == 0.0) continue;
      if (d_star(i, j) == 0.0) {
        lhs_finite = false;
        break;
      }
      lhs += w * std::log(d_star(i, j));
    }
  }

  bool kl1_finite = true;
  bool kl2_finite = true;
  const double kl1 = kl_divergence(mix.m_plus, mix.m, &kl1_finite);
  const double kl2 = kl_divergence(mix.m, mix.m_plus, &kl2_finite);

  res.finite = lhs_finite && kl1_finite && kl2_finite;
  res.lhs = lhs_finite ? lhs : kInf;
  res.rhs = res.finite ? 4.0 * (kl1 + kl2) : kInf;
  return res;
}

IdentityCheckResult tv_identity_check(const DensityVector& p,
                                      const DensityVector& q, EpsFloor eps) {
  require_same_space(p, q, "tv_identity_check");
  const PairwiseOperator d_star = optimal_discriminator_pairgan_z(p, q, eps);
  const MixtureTriple mix = mixtures(p, q);
  IdentityCheckResult res;
  res.lhs = pairgan_generator_loss(d_star, p, q, ActivationTriple::log_instance());
  res.rhs = -std::log(eps.value()) * tv_distance(mix.m_plus, mix.m_minus);
  res.finite = true;
  return res;
}

}  // namespace pairlab
