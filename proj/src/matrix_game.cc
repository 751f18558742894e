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


#include "asymgame/matrix_game.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace asymgame {
namespace {

// Dense simplex tableau for   max 1'z  s.t.  A z <= 1, z >= 0,
// where A is the shifted, strictly positive payoff matrix. Column j < cols is
// the structural variable z_j, column cols + i the slack of row i.
class Tableau {
 public:
  void Reset(const Matrix& a) {
    rows_ = static_cast<int>(a.rows());
    cols_ = static_cast<int>(a.cols());
    width_ = cols_ + rows_ + 1;
    data_.assign(static_cast<std::size_t>(rows_ + 1) * width_, 0.0);
    basis_.resize(rows_);
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) At(i, j) = a(i, j);
      At(i, cols_ + i) = 1.0;
      At(i, width_ - 1) = 1.0;
      basis_[i] = cols_ + i;
    }
    // Objective row holds reduced costs c_j - z_j; start with c = 1.
    for (int j = 0; j < cols_; ++j) At(rows_, j) = 1.0;
  }

  // Returns false if the iteration cap was hit.
  bool Run(int max_pivots) {
    constexpr double kEps = 1e-12;
    for (int it = 0; it < max_pivots; ++it) {
      int enter = -1;
      for (int j = 0; j < width_ - 1; ++j) {
        if (At(rows_, j) > kEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows_; ++i) {
        const double coef = At(i, enter);
        if (coef <= kEps) continue;
        const double ratio = At(i, width_ - 1) / coef;
        if (leave < 0 || ratio < best - kEps) {
          leave = i;
          best = ratio;
        } else if (ratio <= best + kEps && basis_[i] < basis_[leave]) {
          leave = i;
          best = std::min(best, ratio);
        }
      }
      // The feasible region is bounded (A > 0), so a leaving row always exists.
      if (leave < 0) return true;
      Pivot(leave, enter);
    }
    return false;
  }

  // Primal z and dual w (shadow prices of the row constraints).
  void Extract(Vector* z, Vector* w) const {
    z->setZero(cols_);
    for (int i = 0; i < rows_; ++i) {
      if (basis_[i] < cols_) (*z)(basis_[i]) = At(i, width_ - 1);
    }
    w->resize(rows_);
    for (int i = 0; i < rows_; ++i) (*w)(i) = std::max(0.0, -At(rows_, cols_ + i));
  }

 private:
  double& At(int i, int j) { return data_[static_cast<std::size_t>(i) * width_ + j]; }
  double At(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * width_ + j];
  }

  void Pivot(int row, int col) {
    const double inv = 1.0 / At(row, col);
    for (int j = 0; j < width_; ++j) At(row, j) *= inv;
    At(row, col) = 1.0;
    for (int i = 0; i <= rows_; ++i) {
      if (i == row) continue;
      const double factor = At(i, col);
      if (factor == 0.0) continue;
      for (int j = 0; j < width_; ++j) At(i, j) -= factor * At(row, j);
      At(i, col) = 0.0;
    }
    basis_[row] = col;
  }

  int rows_ = 0;
  int cols_ = 0;
  int width_ = 0;
  std::vector<double> data_;
  std::vector<int> basis_;
};

void NormalizeDistribution(Vector* v) {
  *v = v->cwiseMax(0.0);
  const double s = v->sum();
  if (s > 0.0) {
    *v /= s;
  } else {
    v->setConstant(1.0 / static_cast<double>(v->size()));
  }
}

}  // namespace

double RowGuarantee(const Matrix& m, const Vector& x) {
  return (x.transpose() * m).minCoeff();
}

double ColumnGuarantee(const Matrix& m, const Vector& y) {
  return (m * y).maxCoeff();
}

MatrixGameSolution SolveMatrixGame(const Matrix& m, double tol) {
  MatrixGameSolution sol;
  const int na = static_cast<int>(m.rows());
  const int nb = static_cast<int>(m.cols());
  const double lo = m.minCoeff();
  const double hi = m.maxCoeff();
  if (hi - lo == 0.0) {
    sol.value = lo;
    sol.x = Vector::Constant(na, 1.0 / na);
    sol.y = Vector::Constant(nb, 1.0 / nb);
    return sol;
  }
  // Positive shift with entries in [1, 2]; scaling keeps pivots well conditioned.
  const double scale = hi - lo;
  Matrix a = ((m.array() - lo) / scale + 1.0).matrix();

  thread_local Tableau tableau;
  const int cap = 50 * (na + nb) + 100;
  auto attempt = [&](const Matrix& tab, int pivots, MatrixGameSolution* out) {
    tableau.Reset(tab);
    const bool finished = tableau.Run(pivots);
    Vector z, w;
    tableau.Extract(&z, &w);
    out->y = z;
    out->x = w;
    NormalizeDistribution(&out->x);
    NormalizeDistribution(&out->y);
    const double lower = RowGuarantee(m, out->x);
    const double upper = ColumnGuarantee(m, out->y);
    out->gap = std::max(0.0, upper - lower);
    out->value = 0.5 * (lower + upper);
    return finished;
  };
  if (attempt(a, cap, &sol) && sol.gap <= tol) return sol;

  // Stalled or inaccurate: restart on a deterministically perturbed tableau
  // and keep whichever strategy pair certifies the smaller gap.
  Matrix jitter = a;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      jitter(i, j) += 1e-10 * static_cast<double>((i * 131 + j * 71) % 97) / 97.0;
    }
  }
  MatrixGameSolution retry;
  attempt(jitter, 10 * cap, &retry);
  retry.restarted = true;
  if (retry.gap < sol.gap) return retry;
  sol.restarted = true;
  return sol;
}

double AverageGameValue(const GameSpec& spec, const Belief& p) {
  if (p.size() != spec.NumStates()) {
    throw SpecError(SpecError::Kind::kDimension,
                    "belief has " + std::to_string(p.size()) +
                        " entries, expected " + std::to_string(spec.NumStates()));
  }
  return SolveMatrixGame(spec.AverageGame(p)).value;
}

}  // namespace asymgame
