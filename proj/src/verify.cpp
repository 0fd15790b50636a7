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

#include "pairlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <sstream>

#include "pairlab/convergence.hpp"
#include "pairlab/finite_diff.hpp"
#include "pairlab/function_space.hpp"
#include "pairlab/multi_align.hpp"
#include "pairlab/objectives.hpp"
#include "pairlab/rng.hpp"
#include "pairlab/toy_games.hpp"

namespace pairlab {

namespace {

int cycle_k(const VerifyConfig& cfg, int i) {
  const int span = cfg.k_max - cfg.k_min + 1;
  return cfg.k_min + (i % span);
}

PairwiseOperator random_discriminator(Rng& rng, const FiniteSpace& space,
                                      double lo, double hi) {
  const int k = space.size();
  Matrix m(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const double v = rng.uniform(lo, hi);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return PairwiseOperator(space, std::move(m));
}

// Both divergence identities share the sweep shape: 200 random
// full-support pairs per seed over the configured sizes.
CheckResult check_symkl_identity(const VerifyConfig& cfg) {
  CheckResult res;
  res.name = "symkl_divergence_identity";
  res.tolerance = 1e-8;
  double worst = 0.0;
  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    Rng rng(derive_seed(cfg.seeds[si], 101));
    for (int i = 0; i < 200; ++i) {
      const FiniteSpace space(cycle_k(cfg, i));
      const DensityVector p = random_density(rng, space, 0.05);
      const DensityVector q = random_density(rng, space, 0.05);
      const IdentityCheckResult id = sym_kl_identity_check(p, q);
      if (!id.finite) {
        res.detail = "unexpected infinite divergence on full support";
        res.measured = std::numeric_limits<double>::infinity();
        res.pass = false;
        return res;
      }
      worst = std::max(worst, std::abs(id.lhs - id.rhs));
    }
  }
  res.measured = worst;
  res.pass = worst <= res.tolerance;
  return res;
}

CheckResult check_tv_identity(const VerifyConfig& cfg) {
  CheckResult res;
  res.name = "tv_divergence_identity";
  res.tolerance = 1e-8;
  double worst = 0.0;
  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    Rng rng(derive_seed(cfg.seeds[si], 102));
    for (int i = 0; i < 200; ++i) {
      const FiniteSpace space(cycle_k(cfg, i));
      const DensityVector p = random_density(rng, space, 0.05);
      const DensityVector q = random_density(rng, space, 0.05);
      for (const double eps : cfg.eps_ladder) {
        const IdentityCheckResult id = tv_identity_check(p, q, EpsFloor(eps));
        worst = std::max(worst, std::abs(id.lhs - id.rhs));
      }
    }
  }
  res.measured = worst;
  res.pass = worst <= res.tolerance;
  return res;
}

CheckResult check_alignment_preservation(const VerifyConfig& cfg) {
  CheckResult res;
  res.name = "alignment_preservation";
  res.tolerance = 1e-12;
  const ActivationTriple act = ActivationTriple::log_instance();
  const ScalarFunction sgan_g2 = {
      [](double t) { return std::log(1.0 - t); },
      [](double t) { return -1.0 / (1.0 - t); },
      [](double t) { return t < 1.0; }};

  double worst_grad = 0.0;
  double weakest_control = std::numeric_limits<double>::infinity();
  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    Rng rng(derive_seed(cfg.seeds[si], 103));
    for (int i = 0; i < 1000; ++i) {
      const FiniteSpace space(2 + (i % 9));  // k in 2..10
      const DensityVector p = random_density(rng, space, 0.05);
      const PairwiseOperator d = random_discriminator(rng, space, 0.05, 0.95);
      const Vector grad = pairwise_generator_gradient(d, p, p, act);
      worst_grad = std::max(worst_grad, grad.norm());

      // Negative control: a non-constant unary discriminator pushes an
      // aligned generator off the target.
      Vector d_unary(space.size());
      double lo = 1.0, hi = 0.0;
      do {
        for (int x = 0; x < space.size(); ++x) {
          d_unary[x] = rng.uniform(0.15, 0.85);
        }
        lo = d_unary.minCoeff();
        hi = d_unary.maxCoeff();
      } while (hi - lo < 0.2);
      const Vector proj = projected_unary_gradient(d_unary, sgan_g2, p);
      weakest_control = std::min(weakest_control, proj.norm());
    }
  }
  res.measured = worst_grad;
  std::ostringstream detail;
  detail << "weakest unary control norm " << weakest_control << " (> 1e-3)";
  res.detail = detail.str();
  res.pass = worst_grad <= res.tolerance && weakest_control > 1e-3;
  return res;
}

CheckResult check_hessian_fd(const VerifyConfig& cfg) {
  CheckResult res;
  res.name = "hessian_finite_difference";
  res.tolerance = 1e-4;
  double worst = 0.0;
  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    Rng rng(derive_seed(cfg.seeds[si], 104));
    for (int i = 0; i < 50; ++i) {
      const FiniteSpace space(cycle_k(cfg, i));
      const SoftmaxGenerator gen(space);
      Vector theta(space.size());
      for (int x = 0; x < space.size(); ++x) theta[x] = 0.5 * rng.gaussian();
      const DensityVector target = gen.density(theta);
      const PairwiseOperator g_of_d = random_symmetric_operator(rng, space);

      Matrix analytic = hessian_at_alignment(gen, theta, target, g_of_d);
      if (cfg.poison == "hessian") {
        analytic(0, 0) = -analytic(0, 0);
      }
      const Matrix numeric = fd::hessian(
          [&](const Vector& th) {
            const Vector diff = target.values() - gen.density(th).values();
            return diff.dot(g_of_d.entries() * diff);
          },
          theta, 1e-4);
      const double rel =
          (analytic - numeric).norm() / std::max(analytic.norm(), 1e-300);
      worst = std::max(worst, rel);
    }
  }
  res.measured = worst;
  res.pass = worst <= res.tolerance;
  return res;
}

CheckResult check_local_convergence(const VerifyConfig& cfg) {
  CheckResult res;
  res.name = "local_convergence_rate";
  res.tolerance = 1e-8;
  double worst_final = 0.0;
  double worst_ratio_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    Rng rng(derive_seed(cfg.seeds[si], 105));
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
      const FiniteSpace space(k);
      const SoftmaxGenerator gen(space);
      Vector theta_star(k);
      for (int x = 0; x < k; ++x) theta_star[x] = 0.25 * rng.gaussian();
      const DensityVector target = gen.density(theta_star);
      const PairwiseOperator a1 =
          minimally_sufficient_operators(gen, theta_star).first;
      const Matrix h_matrix =
          hessian_at_alignment(gen, theta_star, target, a1);
      const TangentBasis basis = tangent_space(gen, theta_star);
      if (basis.dim_complement() == 0) continue;
      const GdRateReport probe = gd_rate_analysis(h_matrix, basis, 1.0);
      const double mu_max = probe.restricted_eigenvalues.maxCoeff();
      const double step = 1.0 / mu_max;
      const GdRateReport rate = gd_rate_analysis(h_matrix, basis, step);

      const int starts = 100 / (cfg.k_max - cfg.k_min + 1) + 1;
      for (int s = 0; s < starts; ++s) {
        const Vector theta0 =
            theta_star + 0.01 * random_unit_vector(rng, k);
        const GameTrajectory traj =
            gd_converge_to_manifold(gen, target, a1, theta0, step, 2000);
        const std::vector<double> dists = traj.column("distance");
        worst_final = std::max(worst_final, dists.back());
        const double ratio = tail_contraction_ratio(dists);
        worst_ratio_excess = std::max(worst_ratio_excess,
                                      ratio - (rate.lambda_max_abs + 0.05));
      }
    }
  }
  res.measured = worst_final;
  std::ostringstream detail;
  detail << "worst tail-ratio excess over |lambda_max|+0.05: "
         << worst_ratio_excess;
  res.detail = detail.str();
  res.pass = worst_final <= res.tolerance && worst_ratio_excess <= 0.0;
  return res;
}

CheckResult check_minimal_operators(const VerifyConfig& cfg) {
  CheckResult res;
  res.name = "minimal_sufficient_operators";
  res.tolerance = 1e-6;
  double worst_rel = 0.0;
  bool ranks_ok = true;
  bool sufficient_ok = true;
  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    Rng rng(derive_seed(cfg.seeds[si], 106));
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
      const FiniteSpace space(k);
      const SoftmaxGenerator gen(space);
      Vector theta_star(k);
      for (int x = 0; x < k; ++x) theta_star[x] = 0.3 * rng.gaussian();
      const auto [a1, a2] = minimally_sufficient_operators(gen, theta_star);
      const SufficiencyReport r1 = check_sufficient(gen, theta_star, a1);
      const SufficiencyReport r2 = check_sufficient(gen, theta_star, a2);
      const int dim_w = gen.param_dim() - r1.tangent_dim;
      ranks_ok = ranks_ok && r1.operator_rank == dim_w &&
                 r2.operator_rank == dim_w && dim_w == k - 1;
      sufficient_ok = sufficient_ok && r1.sufficient() && r2.sufficient();
    }
    // Gradient-identity sweep at 100 random parameter points.
    for (int i = 0; i < 100; ++i) {
      const FiniteSpace space(cycle_k(cfg, i));
      const SoftmaxGenerator gen(space);
      const DensityVector p = random_density(rng, space, 0.05);
      Vector theta(space.size());
      for (int x = 0; x < space.size(); ++x) theta[x] = 0.5 * rng.gaussian();

      const double l1 = l_star_loss(gen, theta, p, 1);
      const Vector grad_sq = fd::gradient(
          [&](const Vector& th) {
            return 0.5 * (gen.density(th).values() - p.values()).squaredNorm();
          },
          theta, 1e-5);
      worst_rel = std::max(worst_rel, std::abs(l1 - grad_sq.squaredNorm()) /
                                          std::max(l1, 1e-12));

      const double l2 = l_star_loss(gen, theta, p, 2);
      const Vector grad_kl = fd::gradient(
          [&](const Vector& th) {
            const Vector q = gen.density(th).values();
            double kl = 0.0;
            for (int x = 0; x < q.size(); ++x) {
              if (p[x] > 0.0) kl += p[x] * std::log(p[x] / q[x]);
            }
            return kl;
          },
          theta, 1e-5);
      worst_rel = std::max(worst_rel, std::abs(l2 - grad_kl.squaredNorm()) /
                                          std::max(l2, 1e-12));
    }
  }
  res.measured = worst_rel;
  res.detail = ranks_ok ? "ranks equal dim W_q (k-1)" : "rank mismatch";
  res.pass = ranks_ok && sufficient_ok && worst_rel <= res.tolerance;
  return res;
}

CheckResult check_rank1_pd(const VerifyConfig& cfg) {
  CheckResult res;
  res.name = "rank1_pd_preservation";
  res.tolerance = 1e-12;
  double worst_drop = -std::numeric_limits<double>::infinity();
  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    Rng rng(derive_seed(cfg.seeds[si], 107));
    for (int i = 0; i < 1000; ++i) {
      const FiniteSpace space(cycle_k(cfg, i));
      const PairwiseOperator a = random_pd_operator(rng, space, 0.05);
      const double beta = rng.uniform(0.01, 2.0);
      Vector v(space.size());
      for (int x = 0; x < space.size(); ++x) v[x] = rng.gaussian();
      const Matrix updated = a.entries() + beta * (v * v.transpose());
      const double before =
          Eigen::SelfAdjointEigenSolver<Matrix>(a.entries(),
                                                Eigen::EigenvaluesOnly)
              .eigenvalues()
              .minCoeff();
      const double after =
          Eigen::SelfAdjointEigenSolver<Matrix>(updated,
                                                Eigen::EigenvaluesOnly)
              .eigenvalues()
              .minCoeff();
      worst_drop = std::max(worst_drop, before - after);
    }
  }
  res.measured = worst_drop;
  res.pass = worst_drop <= res.tolerance;
  return res;
}

CheckResult check_pairganz_descent(const VerifyConfig& cfg) {
  CheckResult res;
  res.name = "pairganz_metric_descent";
  res.tolerance = 1e-10;
  double worst_final = 0.0;
  double worst_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    Rng rng(derive_seed(cfg.seeds[si], 108));
    const FiniteSpace space(4 + static_cast<int>(si % 3));
    const DensityVector p = random_density(rng, space, 0.1);
    const DensityVector q0 = random_density(rng, space, 0.1);
    const PairwiseOperator a0 = random_pd_operator(rng, space, 0.5);
    const double lambda_max =
        Eigen::SelfAdjointEigenSolver<Matrix>(a0.entries(),
                                              Eigen::EigenvaluesOnly)
            .eigenvalues()
            .maxCoeff();
    PairganZOptions opts;
    opts.alpha = 0.15 / lambda_max;
    opts.beta = 0.01;
    opts.steps = 1200;
    const PairganZRun run = pairgan_z_iterate(p, q0, a0, opts);
    const std::vector<double> metric = run.trajectory.column("metric");

    double final_metric = metric.back();
    for (std::size_t t = 0; t + 1 < metric.size(); ++t) {
      if (metric[t] <= res.tolerance) {
        final_metric = metric[t];
        break;
      }
      worst_increase = std::max(worst_increase, metric[t + 1] - metric[t]);
    }
    worst_final = std::max(worst_final, final_metric);
  }
  res.measured = worst_final;
  std::ostringstream detail;
  detail << "worst per-step metric increase before convergence: "
         << worst_increase;
  res.detail = detail.str();
  res.pass = worst_final <= res.tolerance && worst_increase < 0.0;
  return res;
}

CheckResult check_multi_gradients(const VerifyConfig& cfg) {
  CheckResult res;
  res.name = "multi_gradient_equality";
  res.tolerance = 1e-14;
  double worst = 0.0;
  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    Rng rng(derive_seed(cfg.seeds[si], 109));
    for (int n = 2; n <= 6; ++n) {
      for (int aligned = 2; aligned <= n; ++aligned) {
        const FiniteSpace space(2 + ((n + aligned) % 5));
        const DensityVector shared = random_density(rng, space);
        std::vector<DensityVector> members;
        for (int i = 0; i < aligned; ++i) members.push_back(shared);
        for (int i = aligned; i < n; ++i) {
          members.push_back(random_density(rng, space));
        }
        const PairwiseOperator a = random_symmetric_operator(rng, space);
        const auto grads = multi_gradients(DistributionFamily(members), a);
        for (int i = 1; i < aligned; ++i) {
          worst = std::max(
              worst, (grads[i] - grads[0]).cwiseAbs().maxCoeff());
        }
      }
    }
  }
  res.measured = worst;
  res.pass = worst <= res.tolerance;
  return res;
}

CheckResult check_merge_persistence(const VerifyConfig& cfg) {
  CheckResult res;
  res.name = "multi_merge_persistence";
  res.tolerance = 0.0;
  double worst = 0.0;
  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    Rng rng(derive_seed(cfg.seeds[si], 110));
    MultiDeltaState s;
    const double merged = rng.uniform(-1.0, 1.0);
    s.points = {merged, merged, rng.uniform(-1.5, 1.5)};
    s.pair_psi = rng.uniform(-0.5, 0.5);
    for (int t = 0; t < 10000; ++t) {
      s = multi_pairwise_step(s, 2.0, 0.1);
      worst = std::max(worst, std::abs(s.points[0] - s.points[1]));
      if (worst > 0.0) break;
    }
  }
  res.measured = worst;
  res.detail = "bit-stable over 10^4 steps";
  res.pass = worst <= res.tolerance;
  return res;
}

CheckResult check_dirac_qualitative(const VerifyConfig&) {
  CheckResult res;
  res.name = "dirac_alignment_contrast";
  res.tolerance = 1e-3;
  DiracPairConfig cfg;
  cfg.steps = 2000;
  const GameTrajectory pair_traj =
      run_dirac(DiracGame::kPairgan, {1.5, 0.5}, cfg);
  const std::vector<double> xs = pair_traj.column("x_fake");

  std::size_t first_aligned = xs.size();
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (std::abs(xs[t]) <= 1e-3) {
      first_aligned = t;
      break;
    }
  }
  bool holds = first_aligned < xs.size();
  for (std::size_t t = first_aligned; t < xs.size() && holds; ++t) {
    holds = std::abs(xs[t]) <= 1e-3;
  }

  DiracPairConfig sgan_cfg;
  sgan_cfg.steps = 5000;
  const GameTrajectory sgan_traj =
      run_dirac(DiracGame::kSgan, {1.5, 0.5}, sgan_cfg);
  const std::vector<double> sx = sgan_traj.column("x_fake");
  int streak = 0;
  int max_streak = 0;
  for (const double x : sx) {
    streak = std::abs(x) <= 1e-3 ? streak + 1 : 0;
    max_streak = std::max(max_streak, streak);
  }

  res.measured = std::abs(xs.back());
  std::ostringstream detail;
  detail << "pairgan aligned from step " << first_aligned
         << " and held; sgan max aligned streak " << max_streak
         << " of 5000";
  res.detail = detail.str();
  res.pass = holds && max_streak <= 10;
  return res;
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyConfig& config) {
  using Task = std::function<CheckResult(const VerifyConfig&)>;
  const std::vector<Task> tasks = {
      check_symkl_identity,       check_tv_identity,
      check_alignment_preservation, check_hessian_fd,
      check_local_convergence,   check_minimal_operators,
      check_rank1_pd,            check_pairganz_descent,
      check_multi_gradients,     check_merge_persistence,
      check_dirac_qualitative,
  };

  std::vector<CheckResult> results(tasks.size());
  auto run_one = [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    results[i] = tasks[i](config);
    results[i].seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
  };

  if (config.threads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
  } else {
    std::vector<std::future<void>> futures;
    futures.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      futures.push_back(std::async(std::launch::async, run_one, i));
    }
    for (auto& f : futures) f.get();
  }
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass; });
}

}  // namespace pairlab
