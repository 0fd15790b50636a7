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
#include <limits>
#include <thread>

#include "pairlab/function_space.hpp"
#include "pairlab/rng.hpp"

using namespace pairlab;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Brute-force nearest simplex point on a uniform grid; the independent
// check for the closed-form projection.
Vector grid_simplex_argmin(const Vector& v, int divisions) {
  REQUIRE(v.size() == 3);
  Vector best = Vector::Zero(3);
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= divisions; ++i) {
    for (int j = 0; j + i <= divisions; ++j) {
      Vector cand(3);
      cand << static_cast<double>(i) / divisions,
          static_cast<double>(j) / divisions,
          static_cast<double>(divisions - i - j) / divisions;
      const double dist = (cand - v).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = cand;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("inner product") {
  CHECK(inner_product(vec2(1, 0), vec2(0, 1)) == 0.0);

  // <p, e> = 1 for any density.
  Rng rng(7);
  for (int k = 1; k <= 6; ++k) {
    const FiniteSpace space(k);
    const DensityVector p = random_density(rng, space);
    CHECK(inner_product(p.values(), all_ones(space)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  // Direct summation oracle: 0.3*2 + 0.7*4.
  const double oracle = 0.3 * 2.0 + 0.7 * 4.0;
  CHECK(oracle == doctest::Approx(3.4));
  CHECK(inner_product(vec2(0.3, 0.7), vec2(2, 4)) == doctest::Approx(3.4));

  Vector a(2), b(3);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(inner_product(a, b), std::invalid_argument);
}

TEST_CASE("bilinear form and operator application") {
  const FiniteSpace space(2);
  const DensityVector p = DensityVector::delta(space, 0);
  const DensityVector q = DensityVector::delta(space, 1);

  SUBCASE("all-zeros and all-ones operators") {
    const PairwiseOperator zeros(space, Matrix::Zero(2, 2));
    const PairwiseOperator ones(space, Matrix::Ones(2, 2));
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
      const DensityVector a = random_density(rng, space);
      const DensityVector b = random_density(rng, space);
      CHECK(bilinear_form(a, zeros, b) == 0.0);
      CHECK(bilinear_form(a, ones, b) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("off-diagonal coupling picks out c") {
    const double c = 0.37;
    Matrix m(2, 2);
    m << 0, c, c, 0;
    const PairwiseOperator a(space, m);
    // Double-sum oracle: only the (x=0, y=1) term survives.
    double oracle = 0.0;
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        oracle += p[x] * m(x, y) * q[y];
      }
    }
    CHECK(oracle == doctest::Approx(c));
    CHECK(bilinear_form(p, a, q) == doctest::Approx(c));
  }

  SUBCASE("identity leaves q unchanged") {
    const PairwiseOperator id(space, Matrix::Identity(2, 2));
    Rng rng(5);
    const DensityVector q2 = random_density(rng, space);
    CHECK((apply_operator(id, q2) - q2.values()).norm() == 0.0);
  }

  SUBCASE("hand summation") {
    Matrix m(2, 2);
    m << 1, 2, 2, 3;
    const PairwiseOperator a(space, m);
    const Vector out = apply_operator(a, vec2(0.5, 0.5));
    CHECK(out[0] == doctest::Approx(1.5));
    CHECK(out[1] == doctest::Approx(2.5));
  }

  SUBCASE("self-adjointness") {
    Rng rng(11);
    for (int k = 2; k <= 7; ++k) {
      const FiniteSpace sp(k);
      const PairwiseOperator a = random_symmetric_operator(rng, sp);
      const DensityVector x = random_density(rng, sp);
      const DensityVector y = random_density(rng, sp);
      const double lhs = inner_product(x.values(), apply_operator(a, y));
      const double rhs = inner_product(apply_operator(a, x), y.values());
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }

  SUBCASE("bilinear form equals inner product of applied operator") {
    Rng rng(13);
    for (int i = 0; i < 50; ++i) {
      const FiniteSpace sp(2 + i % 6);
      const PairwiseOperator a = random_symmetric_operator(rng, sp);
      const DensityVector x = random_density(rng, sp);
      const DensityVector y = random_density(rng, sp);
      const double direct = bilinear_form(x, a, y);
      const double via_apply = inner_product(x.values(), apply_operator(a, y));
      CHECK(std::abs(direct - via_apply) <= 1e-12);
    }
  }
}

TEST_CASE("simplex projection") {
  SUBCASE("feasible points are fixed") {
    const DensityVector out = project_simplex(vec2(0.2, 0.8));
    CHECK(out[0] == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(out[1] == doctest::Approx(0.8).epsilon(1e-14));
  }

  SUBCASE("symmetry") {
    const DensityVector out = project_simplex(vec2(1.0, 1.0));
    CHECK(out[0] == doctest::Approx(0.5));
    CHECK(out[1] == doctest::Approx(0.5));
  }

  SUBCASE("vertex case against the grid oracle") {
    Vector v(3);
    v << 2.0, 0.0, 0.0;
    const DensityVector out = project_simplex(v);
    CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.0).epsilon(1e-12));
    const Vector grid_best = grid_simplex_argmin(v, 100);
    CHECK((out.values() - grid_best).norm() <= 1.0 / 100);
  }

  SUBCASE("random points against the grid oracle") {
    Rng rng(17);
    for (int i = 0; i < 10; ++i) {
      Vector v(3);
      for (int j = 0; j < 3; ++j) v[j] = rng.uniform(-2.0, 2.0);
      const DensityVector out = project_simplex(v);
      const Vector grid_best = grid_simplex_argmin(v, 200);
      CHECK((out.values() - v).norm() <=
            (grid_best - v).norm() + 1e-9);  // never worse than the grid
    }
  }

  SUBCASE("idempotence") {
    Rng rng(19);
    for (int i = 0; i < 200; ++i) {
      const int k = 2 + i % 8;
      Vector v(k);
      for (int j = 0; j < k; ++j) v[j] = rng.uniform(-3.0, 3.0);
      const Vector once = project_simplex(v).values();
      const Vector twice = project_simplex(once).values();
      CHECK((twice - once).norm() <= 1e-12);
    }
  }

  SUBCASE("projection optimality against random feasible points") {
    Rng rng(23);
    const FiniteSpace space(5);
    Vector v(5);
    for (int j = 0; j < 5; ++j) v[j] = rng.uniform(-2.0, 2.0);
    const Vector proj = project_simplex(v).values();
    const double proj_dist = (proj - v).norm();
    for (int i = 0; i < 1000; ++i) {
      const DensityVector d = random_density(rng, space);
      CHECK(proj_dist <= (d.values() - v).norm() + 1e-12);
    }
  }

  SUBCASE("non-finite input is rejected") {
    Vector v(2);
    v << std::numeric_limits<double>::quiet_NaN(), 0.0;
    CHECK_THROWS_AS(project_simplex(v), std::invalid_argument);
    v << std::numeric_limits<double>::infinity(), 0.0;
    CHECK_THROWS_AS(project_simplex(v), std::invalid_argument);
  }
}

TEST_CASE("density vector invariants") {
  const FiniteSpace space(3);

  SUBCASE("small mass drift is renormalized") {
    Vector v(3);
    v << 0.5, 0.3, 0.2 + 5e-10;
    const DensityVector d(space, v);
    CHECK(std::abs(d.values().sum() - 1.0) <= 1e-12);
  }

  SUBCASE("large mass drift is rejected") {
    Vector v(3);
    v << 0.5, 0.3, 0.3;
    CHECK_THROWS_AS(DensityVector(space, v), std::invalid_argument);
  }

  SUBCASE("negative entries are rejected, rounding dust is clipped") {
    Vector v(3);
    v << 0.5, 0.6, -0.1;
    CHECK_THROWS_AS(DensityVector(space, v), std::invalid_argument);
    v << 0.4, 0.6, -1e-13;
    const DensityVector d(space, v);
    CHECK(d[2] == 0.0);
  }

  SUBCASE("non-finite entries are rejected") {
    Vector v(3);
    v << 0.5, 0.5, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(DensityVector(space, v), std::invalid_argument);
  }
}

TEST_CASE("pairwise operator construction") {
  const FiniteSpace space(3);

  SUBCASE("asymmetric entries are rejected") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(PairwiseOperator(space, m), std::invalid_argument);
  }

  SUBCASE("from_function symmetrizes and records") {
    const PairwiseOperator op = PairwiseOperator::from_function(
        space, [](int i, int j) { return 2.0 * i + j; });
    CHECK(op.symmetrized_input());
    CHECK(op(0, 1) == doctest::Approx(0.5 * (1.0 + 2.0)));
    CHECK(op(0, 1) == op(1, 0));

    const PairwiseOperator sym = PairwiseOperator::from_function(
        space, [](int i, int j) { return static_cast<double>(i + j); });
    CHECK_FALSE(sym.symmetrized_input());
  }
}

TEST_CASE("rbf kernel operator is positive definite on distinct points") {
  const FiniteSpace space(5);
  const PairwiseOperator k =
      rbf_kernel_operator(space, {0.0, 0.7, 1.1, 2.4, 3.0});
  Eigen::SelfAdjointEigenSolver<Matrix> eig(k.entries());
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("zero sum projection removes total mass change") {
  Rng rng(29);
  for (int i = 0; i < 20; ++i) {
    Vector v(4);
    for (int j = 0; j < 4; ++j) v[j] = rng.gaussian();
    CHECK(std::abs(zero_sum_projection(v).sum()) <= 1e-12);
  }
}

TEST_CASE("operations are safe to call from multiple threads") {
  const FiniteSpace space(6);
  Rng seed_rng(31);
  const DensityVector p = random_density(seed_rng, space);
  const PairwiseOperator a = random_symmetric_operator(seed_rng, space);

  std::vector<std::thread> workers;
  std::vector<double> results(8, 0.0);
  for (int t = 0; t < 8; ++t) {
    workers.emplace_back([&, t] {
      double acc = 0.0;
      for (int i = 0; i < 200; ++i) {
        acc += bilinear_form(p, a, p);
        acc += project_simplex(apply_operator(a, p)).values().sum();
      }
      results[t] = acc;
    });
  }
  for (auto& w : workers) w.join();
  for (int t = 1; t < 8; ++t) {
    CHECK(results[t] == results[0]);
  }
}
