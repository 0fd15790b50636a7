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

#include <doctest.h>

#include <cmath>

#include "pairlab/convergence.hpp"
#include "pairlab/finite_diff.hpp"
#include "pairlab/rng.hpp"

using namespace pairlab;

namespace {

Vector random_logits(Rng& rng, int k, double scale) {
  Vector theta(k);
  for (int i = 0; i < k; ++i) theta[i] = scale * rng.gaussian();
  return theta;
}

// Projector onto the column space of m at the standard rank threshold.
Matrix column_space_projector(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(0) > 0.0 && s(i) > 1e-8 * s(0)) ++rank;
  }
  const Matrix u = svd.matrixU().leftCols(rank);
  return u * u.transpose();
}

double operator_norm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("generator jacobians") {
  Rng rng(41);

  SUBCASE("columns conserve mass and match finite differences") {
    for (int k = 2; k <= 6; ++k) {
      const FiniteSpace space(k);
      const SoftmaxGenerator softmax(space);
      const FreeSimplexGenerator free_simplex(space);

      const Vector theta_s = random_logits(rng, k, 0.6);
      Vector theta_f = random_density(rng, space, 0.3).values().head(k - 1);

      struct Case {
        const ParametricGenerator* gen;
        Vector theta;
      };
      for (const auto& [gen, theta] :
           {Case{&softmax, theta_s}, Case{&free_simplex, theta_f}}) {
        const Matrix j = gen->jacobian(theta);
        for (int c = 0; c < j.cols(); ++c) {
          CHECK(std::abs(j.col(c).sum()) <= 1e-12);
        }
        const double h = 1e-6;
        for (int c = 0; c < j.cols(); ++c) {
          Vector tp = theta, tm = theta;
          tp[c] += h;
          tm[c] -= h;
          const Vector fd =
              (gen->density(tp).values() - gen->density(tm).values()) /
              (2.0 * h);
          CHECK((j.col(c) - fd).norm() <=
                1e-6 * std::max(1.0, j.col(c).norm()));
        }
      }
    }
  }

  SUBCASE("softmax logits round-trip") {
    const FiniteSpace space(5);
    const SoftmaxGenerator gen(space);
    const DensityVector target = random_density(rng, space, 0.2);
    const Vector theta = gen.logits_for(target);
    CHECK((gen.density(theta).values() - target.values()).norm() <= 1e-12);
  }
}

TEST_CASE("hessian at alignment") {
  Rng rng(43);

  SUBCASE("zero operator gives the zero Hessian") {
    const FiniteSpace space(4);
    const SoftmaxGenerator gen(space);
    const Vector theta = random_logits(rng, 4, 0.5);
    const Matrix h = hessian_at_alignment(
        gen, theta, gen.density(theta),
        PairwiseOperator(space, Matrix::Zero(4, 4)));
    CHECK(h.norm() == 0.0);
  }

  SUBCASE("identity operator gives the Gram matrix 2 J^T J") {
    const FiniteSpace space(4);
    const SoftmaxGenerator gen(space);
    const Vector theta = random_logits(rng, 4, 0.5);
    const Matrix j = gen.jacobian(theta);
    const Matrix h = hessian_at_alignment(
        gen, theta, gen.density(theta),
        PairwiseOperator(space, Matrix::Identity(4, 4)));
    CHECK((h - 2.0 * j.transpose() * j).norm() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
  }

  SUBCASE("matches central finite differences of the generator loss") {
    for (int trial = 0; trial < 10; ++trial) {
      const int k = 2 + trial % 7;
      const FiniteSpace space(k);
      const SoftmaxGenerator gen(space);
      const Vector theta = random_logits(rng, k, 0.5);
      const DensityVector target = gen.density(theta);
      const PairwiseOperator g_of_d = random_symmetric_operator(rng, space);

      const Matrix analytic =
          hessian_at_alignment(gen, theta, target, g_of_d);
      const Matrix numeric = fd::hessian(
          [&](const Vector& th) {
            const Vector d = target.values() - gen.density(th).values();
            return d.dot(g_of_d.entries() * d);
          },
          theta, 1e-4);
      CHECK((analytic - numeric).norm() <= 1e-4 * analytic.norm());
      CHECK((analytic - analytic.transpose()).norm() <= 1e-12);
    }
  }

  SUBCASE("misalignment is an error") {
    const FiniteSpace space(3);
    const SoftmaxGenerator gen(space);
    const Vector theta = random_logits(rng, 3, 0.5);
    const DensityVector elsewhere = random_density(rng, space, 0.2);
    CHECK_THROWS_AS(
        hessian_at_alignment(gen, theta, elsewhere,
                             random_symmetric_operator(rng, space)),
        std::invalid_argument);
  }
}

TEST_CASE("tangent space") {
  Rng rng(47);

  SUBCASE("softmax has the shift direction as its tangent") {
    for (int k = 2; k <= 6; ++k) {
      const FiniteSpace space(k);
      const SoftmaxGenerator gen(space);
      const Vector theta = random_logits(rng, k, 0.5);
      const TangentBasis basis = tangent_space(gen, theta);
      REQUIRE(basis.dim_tangent() == 1);
      CHECK(basis.dim_complement() == k - 1);
      const Vector ones = Vector::Ones(k).normalized();
      CHECK(std::abs(std::abs(basis.tangent.col(0).dot(ones)) - 1.0) <=
            1e-10);
      CHECK((gen.jacobian(theta) * basis.tangent.col(0)).norm() <= 1e-10);
    }
  }

  SUBCASE("injective jacobian has no tangent directions") {
    const FiniteSpace space(4);
    const FreeSimplexGenerator gen(space);
    Vector theta(3);
    theta << 0.3, 0.3, 0.2;
    const TangentBasis basis = tangent_space(gen, theta);
    CHECK(basis.dim_tangent() == 0);
    CHECK(basis.dim_complement() == 3);
  }

  SUBCASE("basis completeness") {
    const FiniteSpace space(5);
    const SoftmaxGenerator gen(space);
    const Vector theta = random_logits(rng, 5, 0.5);
    const TangentBasis basis = tangent_space(gen, theta);
    CHECK(basis.dim_tangent() + basis.dim_complement() == gen.param_dim());
    Matrix full(5, 5);
    full << basis.complement, basis.tangent;
    CHECK((full.transpose() * full - Matrix::Identity(5, 5)).norm() <= 1e-10);
  }
}

TEST_CASE("sufficiency verdicts") {
  Rng rng(53);
  const FiniteSpace space(4);
  const SoftmaxGenerator gen(space);
  const Vector theta = random_logits(rng, 4, 0.4);

  SUBCASE("positive definite kernels are sufficient") {
    const PairwiseOperator kernel =
        rbf_kernel_operator(space, {0.0, 1.0, 2.5, 4.0});
    const SufficiencyReport report = check_sufficient(gen, theta, kernel);
    CHECK(report.sufficient());
    CHECK(report.min_margin > 0.0);
  }

  SUBCASE("the zero operator is insufficient") {
    const SufficiencyReport report = check_sufficient(
        gen, theta, PairwiseOperator(space, Matrix::Zero(4, 4)));
    CHECK_FALSE(report.sufficient());
  }

  SUBCASE("negated kernels are insufficient") {
    const PairwiseOperator kernel =
        rbf_kernel_operator(space, {0.0, 1.0, 2.5, 4.0});
    const SufficiencyReport report = check_sufficient(
        gen, theta, PairwiseOperator(space, Matrix(-kernel.entries())));
    CHECK_FALSE(report.sufficient());
    CHECK(report.min_margin < 0.0);
  }

  SUBCASE("verdict agrees with the margin/tolerance comparison") {
    Rng sweep_rng(54);
    for (int i = 0; i < 100; ++i) {
      const FiniteSpace sp(2 + i % 6);
      const SoftmaxGenerator g(sp);
      Vector th(sp.size());
      for (int x = 0; x < sp.size(); ++x) th[x] = 0.5 * sweep_rng.gaussian();
      const SufficiencyReport r =
          check_sufficient(g, th, random_symmetric_operator(sweep_rng, sp));
      CHECK(r.sufficient() == (r.min_margin > r.pd_tolerance));
    }
  }
}

TEST_CASE("minimally sufficient operators") {
  Rng rng(59);

  SUBCASE("ranks equal the perturbation-space dimension") {
    for (int k = 2; k <= 8; ++k) {
      const FiniteSpace space(k);
      const SoftmaxGenerator gen(space);
      const Vector theta = random_logits(rng, k, 0.4);
      const auto [a1, a2] = minimally_sufficient_operators(gen, theta);
      const SufficiencyReport r1 = check_sufficient(gen, theta, a1);
      const SufficiencyReport r2 = check_sufficient(gen, theta, a2);
      CHECK(r1.operator_rank == k - 1);
      CHECK(r2.operator_rank == k - 1);
      CHECK(r1.sufficient());
      CHECK(r2.sufficient());
    }
  }

  SUBCASE("log-density operator needs positive density") {
    const FiniteSpace space(4);
    const FreeSimplexGenerator gen(space);
    Vector theta(3);
    theta << 0.5, 0.3, 0.2;  // leaves the last point with zero mass
    CHECK_THROWS_AS(minimally_sufficient_operators(gen, theta),
                    std::domain_error);
  }

  SUBCASE("image containment in other sufficient operators (k <= 4)") {
    for (int k = 3; k <= 4; ++k) {
      const FiniteSpace space(k);
      const SoftmaxGenerator gen(space);
      const Vector theta = random_logits(rng, k, 0.4);
      const Matrix j = gen.jacobian(theta);
      const auto [a1, a2] = minimally_sufficient_operators(gen, theta);

      // Candidate sufficient operators: a full-rank PD one, and one whose
      // image coincides with image(J).
      const PairwiseOperator pd = random_pd_operator(rng, space, 0.1);
      Matrix m = Matrix::Zero(k, k);
      {
        Matrix core(k, k);
        for (int i = 0; i < k; ++i) {
          for (int jj = 0; jj < k; ++jj) core(i, jj) = rng.gaussian();
        }
        core = core * core.transpose() / k + 0.1 * Matrix::Identity(k, k);
        m = j * core * j.transpose();
        for (int i = 0; i < k; ++i) {
          for (int jj = i + 1; jj < k; ++jj) m(jj, i) = m(i, jj);
        }
      }
      const PairwiseOperator rank_matched(space, m);

      const SufficiencyReport r1 = check_sufficient(gen, theta, a1);
      for (const PairwiseOperator* b : {&pd, &rank_matched}) {
        const SufficiencyReport rb = check_sufficient(gen, theta, *b);
        REQUIRE(rb.sufficient());
        // Sufficiency forces rank(B) >= dim W, the necessary condition
        // shared by every candidate.
        CHECK(rb.operator_rank >= r1.operator_rank);
      }

      // Column-space inclusion, where it is implied: a full-rank B
      // contains every image; the rank-matched B has image(J), which
      // carries image(A*_1) but not the reweighted image of A*_2.
      const Matrix proj_pd = column_space_projector(pd.entries());
      for (const Matrix* a : {&a1.entries(), &a2.entries()}) {
        CHECK(((Matrix::Identity(k, k) - proj_pd) * (*a)).norm() <=
              1e-8 * a->norm());
      }
      const Matrix proj_matched =
          column_space_projector(rank_matched.entries());
      CHECK(((Matrix::Identity(k, k) - proj_matched) * a1.entries()).norm() <=
            1e-8 * a1.entries().norm());
    }
  }
}

TEST_CASE("l-star losses") {
  Rng rng(61);

  SUBCASE("zero at alignment") {
    const FiniteSpace space(4);
    const SoftmaxGenerator gen(space);
    const Vector theta = random_logits(rng, 4, 0.4);
    const DensityVector p = gen.density(theta);
    CHECK(l_star_loss(gen, theta, p, 1) <= 1e-24);
    CHECK(l_star_loss(gen, theta, p, 2) <= 1e-20);
  }

  SUBCASE("agrees with the quadratic form of the matching operator") {
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 2 + trial % 6;
      const FiniteSpace space(k);
      const SoftmaxGenerator gen(space);
      const Vector theta = random_logits(rng, k, 0.5);
      const DensityVector p = random_density(rng, space, 0.05);
      const DensityVector q = gen.density(theta);
      const Vector diff = p.values() - q.values();
      const auto [a1, a2] = minimally_sufficient_operators(gen, theta);

      CHECK(std::abs(l_star_loss(gen, theta, p, 1) -
                     diff.dot(a1.entries() * diff)) <= 1e-10);
      CHECK(std::abs(l_star_loss(gen, theta, p, 2) -
                     diff.dot(a2.entries() * diff)) <= 1e-10);
    }
  }

  SUBCASE("squared gradient norms of the square and KL divergences") {
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 2 + trial % 6;
      const FiniteSpace space(k);
      const SoftmaxGenerator gen(space);
      const Vector theta = random_logits(rng, k, 0.5);
      const DensityVector p = random_density(rng, space, 0.05);

      const Vector grad_sq = fd::gradient(
          [&](const Vector& th) {
            return 0.5 *
                   (gen.density(th).values() - p.values()).squaredNorm();
          },
          theta, 1e-5);
      const double l1 = l_star_loss(gen, theta, p, 1);
      CHECK(std::abs(l1 - grad_sq.squaredNorm()) <=
            1e-6 * std::max(l1, 1e-12));

      const Vector grad_kl = fd::gradient(
          [&](const Vector& th) {
            const Vector q = gen.density(th).values();
            double kl = 0.0;
            for (int x = 0; x < k; ++x) {
              if (p[x] > 0.0) kl += p[x] * std::log(p[x] / q[x]);
            }
            return kl;
          },
          theta, 1e-5);
      const double l2 = l_star_loss(gen, theta, p, 2);
      CHECK(std::abs(l2 - grad_kl.squaredNorm()) <=
            1e-6 * std::max(l2, 1e-12));
    }
  }

  SUBCASE("support violation is an error") {
    const FiniteSpace space(3);
    const FreeSimplexGenerator gen(space);
    Vector theta(2);
    theta << 0.6, 0.4;  // q = (0.6, 0.4, 0)
    const DensityVector p = DensityVector::uniform(space);
    CHECK_THROWS_AS(l_star_loss(gen, theta, p, 2), std::domain_error);
    CHECK_NOTHROW(l_star_loss(gen, theta, p, 1));
  }
}

TEST_CASE("gradient descent rate analysis") {
  SUBCASE("single mode") {
    Matrix h(1, 1);
    h << 2.0;
    TangentBasis basis;
    basis.complement = Matrix::Identity(1, 1);
    basis.tangent = Matrix(1, 0);
    const GdRateReport r = gd_rate_analysis(h, basis, 0.25);
    CHECK(r.lambda_max_abs == doctest::Approx(0.5));
    CHECK(r.h_bound == doctest::Approx(1.0));
    CHECK(r.contracting);
    CHECK_FALSE(r.divergent_mode);
  }

  SUBCASE("two modes straddling the sweet spot") {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = 4.0;
    TangentBasis basis;
    basis.complement = Matrix::Identity(2, 2);
    basis.tangent = Matrix(2, 0);
    const GdRateReport r = gd_rate_analysis(h, basis, 0.4);
    CHECK(r.lambda_max_abs == doctest::Approx(0.6));
    CHECK(r.h_bound == doctest::Approx(0.5));
  }

  SUBCASE("the stability boundary is flagged non-contracting") {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = 4.0;
    TangentBasis basis;
    basis.complement = Matrix::Identity(2, 2);
    basis.tangent = Matrix(2, 0);
    const GdRateReport r = gd_rate_analysis(h, basis, 0.5);
    CHECK(r.lambda_max_abs == doctest::Approx(1.0));
    CHECK_FALSE(r.contracting);
  }

  SUBCASE("nonpositive modes are flagged divergent") {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = -1.0;
    h(1, 1) = 4.0;
    TangentBasis basis;
    basis.complement = Matrix::Identity(2, 2);
    basis.tangent = Matrix(2, 0);
    CHECK(gd_rate_analysis(h, basis, 0.1).divergent_mode);
  }
}

TEST_CASE("gradient descent to the manifold") {
  Rng rng(67);

  SUBCASE("an aligned start never moves") {
    const FiniteSpace space(4);
    const SoftmaxGenerator gen(space);
    const Vector theta_star = random_logits(rng, 4, 0.4);
    const DensityVector p = gen.density(theta_star);
    const PairwiseOperator a = random_symmetric_operator(rng, space);
    const GameTrajectory traj =
        gd_converge_to_manifold(gen, p, a, theta_star, 0.1, 50);
    for (const double d : traj.column("distance")) {
      CHECK(d == 0.0);
    }
  }

  SUBCASE("sufficient operator contracts at the predicted rate") {
    const FiniteSpace space(5);
    const SoftmaxGenerator gen(space);
    const Vector theta_star = random_logits(rng, 5, 0.3);
    const DensityVector p = gen.density(theta_star);
    const PairwiseOperator a1 =
        minimally_sufficient_operators(gen, theta_star).first;
    const Matrix h = hessian_at_alignment(gen, theta_star, p, a1);
    const TangentBasis basis = tangent_space(gen, theta_star);
    const GdRateReport probe = gd_rate_analysis(h, basis, 1.0);
    const double step = 1.0 / probe.restricted_eigenvalues.maxCoeff();
    const GdRateReport rate = gd_rate_analysis(h, basis, step);

    for (int trial = 0; trial < 10; ++trial) {
      const Vector theta0 = theta_star + 0.01 * random_unit_vector(rng, 5);
      const GameTrajectory traj =
          gd_converge_to_manifold(gen, p, a1, theta0, step, 2000);
      CHECK(traj.metadata.at("diverged") == "false");
      CHECK(traj.metadata.at("geometric_decay") == "true");
      const auto dists = traj.column("distance");
      CHECK(dists.back() <= 1e-8);
      CHECK(tail_contraction_ratio(dists) <= rate.lambda_max_abs + 0.05);
    }
  }

  SUBCASE("an insufficient operator fails to contract") {
    const FiniteSpace space(4);
    const SoftmaxGenerator gen(space);
    const Vector theta_star = random_logits(rng, 4, 0.3);
    const DensityVector p = gen.density(theta_star);
    const PairwiseOperator a1 =
        minimally_sufficient_operators(gen, theta_star).first;
    const PairwiseOperator negated(space, Matrix(-a1.entries()));
    REQUIRE_FALSE(check_sufficient(gen, theta_star, negated).sufficient());

    const Vector theta0 = theta_star + 0.01 * random_unit_vector(rng, 4);
    const GameTrajectory traj =
        gd_converge_to_manifold(gen, p, negated, theta0, 0.5, 2000);
    const auto dists = traj.column("distance");
    const bool contracted = dists.back() <= dists.front();
    CHECK((traj.metadata.at("diverged") == "true" || !contracted));
  }
}

TEST_CASE("sufficiency is stable under small operator perturbations") {
  Rng rng(71);
  for (int k = 3; k <= 6; ++k) {
    const FiniteSpace space(k);
    const SoftmaxGenerator gen(space);
    const Vector theta = random_logits(rng, k, 0.4);
    const PairwiseOperator a0 =
        minimally_sufficient_operators(gen, theta).first;
    const double margin = check_sufficient(gen, theta, a0).min_margin;
    REQUIRE(margin > 0.0);

    for (int trial = 0; trial < 10; ++trial) {
      const PairwiseOperator s = random_symmetric_operator(rng, space);
      const double scale =
          (margin / 4.0) / operator_norm(s.entries()) * rng.uniform01();
      const PairwiseOperator perturbed(
          space, Matrix(a0.entries() + scale * s.entries()));
      CHECK(check_sufficient(gen, theta, perturbed).sufficient());
    }
  }
}

TEST_CASE("rank-1 updates preserve positive definiteness") {
  Rng rng(73);
  for (int i = 0; i < 200; ++i) {
    const FiniteSpace space(2 + i % 6);
    const PairwiseOperator a = random_pd_operator(rng, space, 0.05);
    Vector v(space.size());
    for (int j = 0; j < space.size(); ++j) v[j] = rng.gaussian();
    const double beta = rng.uniform(0.01, 2.0);
    const Matrix updated = a.entries() + beta * (v * v.transpose());
    const double before = Eigen::SelfAdjointEigenSolver<Matrix>(
                              a.entries(), Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .minCoeff();
    const double after = Eigen::SelfAdjointEigenSolver<Matrix>(
                             updated, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
    CHECK(after >= before - 1e-12);
  }
}

TEST_CASE("candidate perturbation checker") {
  Rng rng(79);
  const FiniteSpace space(4);
  const DensityVector p = random_density(rng, space, 0.2);
  const PairwiseOperator kernel =
      rbf_kernel_operator(space, {0.0, 1.0, 2.0, 3.0});

  SUBCASE("admissible direction with a PD operator is detected") {
    Vector eps(4);
    eps << 0.01, -0.01, 0.005, -0.005;
    const PerturbationCheck check =
        check_candidate_perturbation(kernel, p, eps);
    CHECK(check.admissible);
    CHECK(check.quadratic_form > 0.0);
    CHECK(check.detected);
  }

  SUBCASE("mass-changing directions are inadmissible") {
    Vector eps(4);
    eps << 0.01, 0.01, 0.0, 0.0;
    CHECK_FALSE(check_candidate_perturbation(kernel, p, eps).admissible);
  }

  SUBCASE("directions that would break nonnegativity are inadmissible") {
    Vector eps = Vector::Zero(4);
    eps[0] = -(p[0] + 0.1);
    eps[1] = p[0] + 0.1;
    CHECK_FALSE(check_candidate_perturbation(kernel, p, eps).admissible);
  }
}
