// Copyright 2026 The asymgame Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef ASYMGAME_TESTS_ORACLES_H_
#define ASYMGAME_TESTS_ORACLES_H_

// Independent reference computations used by the tests. None of these call
// into the library's solvers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace asymgame::oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Value of a zero-sum matrix game by enumerating equal-size supports and
// keeping the first equalizing pair that is a mutual best reply.
inline double SupportEnumerationValue(const MatrixXd& m) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  const double eps = 1e-10;
  double best = std::numeric_limits<double>::quiet_NaN();
  for (int mask_i = 1; mask_i < (1 << rows); ++mask_i) {
    for (int mask_j = 1; mask_j < (1 << cols); ++mask_j) {
      std::vector<int> I, J;
      for (int i = 0; i < rows; ++i) if (mask_i >> i & 1) I.push_back(i);
      for (int j = 0; j < cols; ++j) if (mask_j >> j & 1) J.push_back(j);
      if (I.size() != J.size()) continue;
      const int k = static_cast<int>(I.size());
      // Unknowns (x_I, v): x^T M[I, J] = v, sum x = 1.
      MatrixXd a = MatrixXd::Zero(k + 1, k + 1);
      VectorXd rhs = VectorXd::Zero(k + 1);
      for (int c = 0; c < k; ++c) {
        for (int r = 0; r < k; ++r) a(c, r) = m(I[r], J[c]);
        a(c, k) = -1.0;
      }
      for (int r = 0; r < k; ++r) a(k, r) = 1.0;
      rhs(k) = 1.0;
      Eigen::FullPivLU<MatrixXd> lu_x(a);
      if (!lu_x.isInvertible()) continue;
      const VectorXd sx = lu_x.solve(rhs);
      MatrixXd b = MatrixXd::Zero(k + 1, k + 1);
      for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) b(r, c) = m(I[r], J[c]);
        b(r, k) = -1.0;
      }
      for (int c = 0; c < k; ++c) b(k, c) = 1.0;
      Eigen::FullPivLU<MatrixXd> lu_y(b);
      if (!lu_y.isInvertible()) continue;
      const VectorXd sy = lu_y.solve(rhs);
      if (sx.head(k).minCoeff() < -eps || sy.head(k).minCoeff() < -eps) continue;
      VectorXd x = VectorXd::Zero(rows), y = VectorXd::Zero(cols);
      for (int r = 0; r < k; ++r) x(I[r]) = sx(r);
      for (int c = 0; c < k; ++c) y(J[c]) = sy(c);
      const double v = sx(k);
      if ((m.transpose() * x).minCoeff() < v - 1e-9) continue;
      if ((m * y).maxCoeff() > v + 1e-9) continue;
      best = v;
      return best;
    }
  }
  return best;
}

// Classical RK4 for P' = R P, P(0) = I, with a fixed number of steps.
inline MatrixXd Rk4Exponential(const MatrixXd& r, double t, int steps = 20000) {
  MatrixXd p = MatrixXd::Identity(r.rows(), r.cols());
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const MatrixXd k1 = r * p;
    const MatrixXd k2 = r * (p + 0.5 * h * k1);
    const MatrixXd k3 = r * (p + 0.5 * h * k2);
    const MatrixXd k4 = r * (p + h * k3);
    p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return p;
}

// Random generator with off-diagonal rates uniform on [0, scale).
inline MatrixXd RandomGenerator(int dim, std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> u(0.0, scale);
  MatrixXd r = MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (i != j) r(i, j) = u(rng);
    }
    r(i, i) = -r.row(i).sum();
  }
  return r;
}

// Concave majorant on a uniform 1D grid by brute force over all two-point
// mixtures.
inline std::vector<double> BruteForceCav(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  std::vector<double> out(f);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = i + 1; k < j; ++k) {
        const double w = static_cast<double>(k - i) / (j - i);
        out[k] = std::max(out[k], (1.0 - w) * f[i] + w * f[j]);
      }
    }
  }
  return out;
}

// Midpoint Riemann sum of int_0^inf r e^{-rt} g(t) dt in the variable
// tau = 1 - e^{-rt}.
inline double RiemannDiscounted(const std::function<double(double)>& g, double r, int cells) {
  double sum = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double tau = (i + 0.5) / cells;
    sum += g(-std::log1p(-tau) / r);
  }
  return sum / cells;
}

}  // namespace asymgame::oracle

#endif  // ASYMGAME_TESTS_ORACLES_H_
