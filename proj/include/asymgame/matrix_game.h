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


#ifndef ASYMGAME_MATRIX_GAME_H_
#define ASYMGAME_MATRIX_GAME_H_

#include "asymgame/game_model.h"

namespace asymgame {

inline constexpr double kDefaultGameTolerance = 1e-9;

struct MatrixGameSolution {
  double value = 0.0;
  Vector x;  // optimal mixed strategy of the row (maximizing) player
  Vector y;  // optimal mixed strategy of the column player
  // max_a (M y)_a - min_b (x^T M)_b, always >= 0 up to rounding.
  double gap = 0.0;
  // Set when Bland pivoting hit the iteration cap and a perturbed restart ran.
  bool restarted = false;
};

// Value and optimal strategies of the zero-sum game with payoff matrix `m`
// (rows maximize). Solved as a linear program with a dense tableau and
// Bland's pivoting rule, so results are deterministic.
MatrixGameSolution SolveMatrixGame(const Matrix& m,
                                   double tol = kDefaultGameTolerance);

// Guaranteed payoffs of given strategies: min_b (x^T M)_b and max_a (M y)_a.
double RowGuarantee(const Matrix& m, const Vector& x);
double ColumnGuarantee(const Matrix& m, const Vector& y);

// u(p): value of the average game sum_s p(s) g(s, ., .). Throws SpecError on a
// dimension mismatch.
double AverageGameValue(const GameSpec& spec, const Belief& p);

}  // namespace asymgame

#endif  // ASYMGAME_MATRIX_GAME_H_
