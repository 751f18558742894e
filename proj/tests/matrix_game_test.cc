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

#include <random>

#include "asymgame/instances.h"
#include "doctest.h"
#include "oracles/oracles.h"

namespace asymgame {
namespace {

TEST_CASE("diagonal game at p = 0.5") {
  Matrix m(2, 2);
  m << 0.5, 0.0, 0.0, 0.5;
  const auto sol = SolveMatrixGame(m);
  CHECK(sol.value == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(sol.x(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.y(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.gap <= 1e-9);
}

TEST_CASE("constant game") {
  const Matrix m = Matrix::Constant(3, 2, -1.75);
  const auto sol = SolveMatrixGame(m);
  CHECK(sol.value == -1.75);
  CHECK(RowGuarantee(m, sol.x) == doctest::Approx(-1.75).epsilon(1e-14));
  CHECK(ColumnGuarantee(m, sol.y) == doctest::Approx(-1.75).epsilon(1e-14));
}

TEST_CASE("random integer games match support enumeration") {
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> size(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = size(rng), cols = size(rng);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) m(i, j) = coef(rng);
    }
    const auto sol = SolveMatrixGame(m);
    const double expected = oracle::SupportEnumerationValue(m);
    CAPTURE(trial);
    CHECK(std::abs(sol.value - expected) <= 1e-9);
    CHECK(sol.gap <= 1e-9);
    CHECK(sol.x.minCoeff() >= 0.0);
    CHECK(sol.y.minCoeff() >= 0.0);
    CHECK(std::abs(sol.x.sum() - 1.0) <= 1e-12);
    CHECK(std::abs(sol.y.sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("degenerate games with many ties") {
  Matrix m(4, 4);
  m << 1, 1, 0, 0,
       1, 1, 0, 0,
       0, 0, 1, 1,
       0, 0, 1, 1;
  const auto sol = SolveMatrixGame(m);
  CHECK(sol.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.gap <= 1e-9);
}

TEST_CASE("average game value follows p (1 - p)") {
  const GameSpec g = SwitchingExample();
  Belief p(2);
  p << 0.5, 0.5;
  CHECK(AverageGameValue(g, p) == doctest::Approx(0.25).epsilon(1e-12));
  p << 0.25, 0.75;
  CHECK(AverageGameValue(g, p) == doctest::Approx(0.1875).epsilon(1e-12));
  p << 1.0, 0.0;
  CHECK(AverageGameValue(g, p) == doctest::Approx(SolveMatrixGame(g.payoff[0]).value));
  CHECK(AverageGameValue(g, p) == doctest::Approx(0.0));
  CHECK_THROWS_AS(AverageGameValue(g, Belief::Constant(3, 1.0 / 3)), SpecError);
}

TEST_CASE("scaling and translation covariance") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix m(3, 4);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 4; ++j) m(i, j) = gauss(rng);
    }
    const double v = SolveMatrixGame(m).value;
    const Matrix shifted = (2.5 * m).array() + 3.0;
    CHECK(SolveMatrixGame(shifted).value == doctest::Approx(2.5 * v + 3.0).epsilon(1e-9));
    CHECK(SolveMatrixGame(-m.transpose()).value == doctest::Approx(-v).epsilon(1e-9));
  }
}

}  // namespace
}  // namespace asymgame
