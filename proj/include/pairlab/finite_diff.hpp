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

#ifndef PAIRLAB_FINITE_DIFF_HPP_
#define PAIRLAB_FINITE_DIFF_HPP_

#include <Eigen/Dense>
#include <functional>

namespace pairlab::fd {

using Fn = std::function<double(const Eigen::VectorXd&)>;

/// Central-difference gradient, O(h^2) truncation error.
inline Eigen::VectorXd gradient(const Fn& f, const Eigen::VectorXd& x,
                                double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (int i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Central-difference Hessian via the four-point cross formula.
inline Eigen::MatrixXd hessian(const Fn& f, const Eigen::VectorXd& x,
                               double h = 1e-4) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd hess(n, n);
  Eigen::VectorXd xp = x;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      xp[i] += h;
      xp[j] += h;
      const double fpp = f(xp);
      xp[j] -= 2.0 * h;
      const double fpm = f(xp);
      xp[i] -= 2.0 * h;
      const double fmm = f(xp);
      xp[j] += 2.0 * h;
      const double fmp = f(xp);
      xp[i] = x[i];
      xp[j] = x[j];
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

}  // namespace pairlab::fd

#endif  // PAIRLAB_FINITE_DIFF_HPP_
