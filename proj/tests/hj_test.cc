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


#include "asymgame/hj.h"

#include <cmath>
#include <random>

#include "asymgame/analysis.h"
#include "asymgame/envelope.h"
#include "asymgame/instances.h"
#include "asymgame/matrix_game.h"
#include "doctest.h"
#include "oracles/oracles.h"

namespace asymgame {
namespace {

Belief P(double p) {
  Belief b(2);
  b << p, 1.0 - p;
  return b;
}

GameSpecTwoSided RandomTwoSided(std::mt19937_64& rng, bool independent_of_s2 = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GameSpecTwoSided g;
  g.states1 = {"a", "b"};
  g.states2 = {"c", "d"};
  g.actions1 = {"T", "M", "B"};
  g.actions2 = {"L", "R"};
  g.payoff.assign(2, std::vector<Matrix>(2));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Matrix m(3, 2);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 2; ++b) m(a, b) = u(rng);
      }
      g.payoff[i][j] = (independent_of_s2 && j == 1) ? g.payoff[i][0] : m;
    }
  }
  for (int a = 0; a < 3; ++a) g.rate1.push_back(oracle::RandomGenerator(2, rng));
  for (int b = 0; b < 2; ++b) g.rate2.push_back(oracle::RandomGenerator(2, rng));
  g.initial_belief1 = P(0.5);
  g.initial_belief2 = P(0.5);
  return g;
}

TEST_CASE("exogenous Hamiltonian decouples") {
  const GameSpec g = SwitchingExample(1.5, 0.7);
  const Hamiltonian h = Hamiltonian::FromSpec(g);
  CHECK(h.kind() == HamiltonianKind::kExogenous);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Belief p = P((u(rng) + 3.0) / 6.0);
    Vector xi(2);
    xi << u(rng), u(rng);
    const double expected =
        -(g.rate.exogenous.transpose() * p).dot(xi) - 1.5 * AverageGameValue(g, p);
    CHECK(h.Eval(p, xi) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(h.Eval(P(0.5), Vector::Zero(2)) == doctest::Approx(-1.5 * 0.25).epsilon(1e-12));
}

TEST_CASE("endogenous Hamiltonian at xi = 0 is -r times the value") {
  GameSpec g = SwitchingExample();
  g.rate.kind = RateKind::kEndogenous;
  g.rate.endogenous = {{Matrix::Zero(2, 2), g.rate.exogenous},
                       {g.rate.exogenous, TwoStateGenerator(3, 1)}};
  const Hamiltonian h = Hamiltonian::FromSpec(g);
  CHECK(h.kind() == HamiltonianKind::kEndogenous);
  for (double p : {0.1, 0.5, 0.8}) {
    CHECK(h.Eval(P(p), Vector::Zero(2)) == doctest::Approx(-p * (1 - p)).epsilon(1e-10));
  }
}

TEST_CASE("one-sided endogenous saddle against support enumeration") {
  GameSpec g = SwitchingExample();
  g.rate.kind = RateKind::kEndogenous;
  g.rate.endogenous = {{TwoStateGenerator(0.2, 2), g.rate.exogenous},
                       {g.rate.exogenous, TwoStateGenerator(3, 1)}};
  const Hamiltonian h = Hamiltonian::FromSpec(g);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Belief p = P((u(rng) + 2.0) / 4.0);
    Vector xi(2);
    xi << u(rng), 0.0;
    const Matrix m = h.HamiltonianMatrix(p, xi);
    CHECK(h.Eval(p, xi) == doctest::Approx(-oracle::SupportEnumerationValue(-m)).epsilon(1e-9));
  }
}

TEST_CASE("two-sided Hamiltonian: min-max equals max-min") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Hamiltonian h = Hamiltonian::TwoSided(RandomTwoSided(rng));
    const Belief p1 = P(u(rng)), p2 = P(u(rng));
    Vector xi1(2), xi2(2);
    xi1 << 4 * u(rng) - 2, 0;
    xi2 << 4 * u(rng) - 2, 0;
    const Matrix m = h.HamiltonianMatrix(p1, p2, xi1, xi2);
    const Saddle s = h.SaddleAt(p1, p2, xi1, xi2);
    // x minimizes, y maximizes: max_y x^T M y = min_x x^T M y = H.
    const double min_max = (m.transpose() * s.x).maxCoeff();
    const double max_min = (m * s.y).minCoeff();
    CHECK(std::abs(min_max - max_min) <= 1e-9);
    CHECK(std::abs(s.value - min_max) <= 1e-9);
    CHECK(std::abs(s.value + oracle::SupportEnumerationValue(-m)) <= 1e-9);
  }
}

TEST_CASE("switching example at m = 1000 matches the closed form") {
  const Hamiltonian h = Hamiltonian::FromSpec(SwitchingExample(1.0, 1.0));
  const ObstacleField v = SolveObstacle(h, BeliefGrid(2, 1000), {});
  REQUIRE(v.converged);
  double worst = 0.0;
  for (int i = 0; i < v.field.grid.size(); ++i) {
    worst = std::max(worst, std::abs(v.field.At(i) - ClosedFormExample(i / 1000.0, 1.0, 1.0)));
  }
  CHECK(worst <= 1e-3);
  const ResidualReport res = ResidualCheck(v, h);
  CHECK(res.worst_pde <= 5e-3);
  CHECK(v.ErrorBound(1.0) < 1e-3);
}

TEST_CASE("concave u: no information is revealed") {
  const GameSpec g = ConcaveUExample(TwoStateGenerator(2.0, 0.5), 1.0);
  const ObstacleField v = SolveObstacle(Hamiltonian::FromSpec(g), BeliefGrid(2, 1000), {});
  REQUIRE(v.converged);
  const UModel model = BuildUModel(g, 1000);
  for (int i = 0; i < v.field.grid.size(); ++i) CHECK(v.tags[i] == ActiveTag::kPde);
  for (double p : {0.0, 0.13, 0.5, 0.71, 1.0}) {
    CHECK(std::abs(v.field(P(p)) - LowerBoundNonRevealing(model, P(p))) <= 1e-3);
  }
}

TEST_CASE("convex u: full revelation, vertices in the non-revealing set") {
  const GameSpec g = ConvexUExample(TwoStateGenerator(1.0, 2.0), 1.0);
  const Hamiltonian h = Hamiltonian::FromSpec(g);
  const ObstacleField v = SolveObstacle(h, BeliefGrid(2, 1000), {});
  REQUIRE(v.converged);
  const UModel model = BuildUModel(g, 1000);
  for (int i = 0; i < v.field.grid.size(); i += 50) {
    const Belief p = v.field.grid.Point(i);
    CHECK(std::abs(v.field.At(i) - model.vertex_u.dot(p)) <= 1e-3);
  }
  CHECK(v.tags.front() == ActiveTag::kPde);
  CHECK(v.tags.back() == ActiveTag::kPde);
  // r v + H >= 0 up to the scheme tolerance at every grid point.
  double worst = 0.0;
  for (int i = 0; i < v.field.grid.size(); ++i) {
    const double res = h.discount() * v.field.At(i) + h.Eval(v.field.grid.Point(i),
                                                              GridGradient(v.field, i));
    worst = std::min(worst, res);
  }
  CHECK(worst >= -1e-6);
  CHECK(ResidualCheck(v, h).worst_obstacle <= 1e-6);
}

TEST_CASE("residual check finds a bump") {
  const Hamiltonian h = Hamiltonian::FromSpec(SwitchingExample());
  ObstacleField v = SolveObstacle(h, BeliefGrid(2, 400), {});
  v.field.values[123] += 0.05;
  const ResidualReport res = ResidualCheck(v, h);
  CHECK(std::abs(res.worst_pde_index - 123) <= 1);
  CHECK(!res.Passes(5e-3));
}

TEST_CASE("grid gradient is exact on affine fields") {
  const BeliefGrid g(3, 10);
  const ValueField f = SampleField(g, [](const Belief& p) { return 1 + 2 * p(0) - 3 * p(1); });
  for (int i = 0; i < g.size(); ++i) {
    const Vector xi = GridGradient(f, i);
    // Coordinates relative to the last state: d/dp0 = 2, d/dp1 = -3.
    CHECK(xi(0) == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(xi(1) == doctest::Approx(-3.0).epsilon(1e-11));
  }
}

TEST_CASE("three-state exogenous game") {
  GameSpec g;
  g.states = {"x", "y", "z"};
  g.actions1 = {"a", "b", "c"};
  g.actions2 = {"d", "e", "f"};
  for (int s = 0; s < 3; ++s) {
    Matrix m = Matrix::Zero(3, 3);
    m(s, s) = 1.0;
    g.payoff.push_back(m);
  }
  g.rate.exogenous = TwoStateGenerator(1, 1);
  g.rate.exogenous = Matrix::Constant(3, 3, 0.5);
  g.rate.exogenous.diagonal().setConstant(-1.0);
  g.initial_belief = Belief::Constant(3, 1.0 / 3);
  const ObstacleField v = SolveObstacle(Hamiltonian::FromSpec(g), BeliefGrid(3, 30), {});
  CHECK(v.converged);
  const UModel model = BuildUModel(g, 30);
  for (int i = 0; i < v.field.grid.size(); ++i) {
    CHECK(v.field.At(i) >= model.cav_u.At(i) - 1e-9);
  }
  CHECK(CheckConcave(v.field, 1e-9).concave);
  const Belief c = Belief::Constant(3, 1.0 / 3);
  CHECK(v.field(c) <= UpperBound(model, c) + 1e-6);
  CHECK(v.field(c) >= LowerBoundNonRevealing(model, c) - 1e-6);
}

TEST_CASE("endogenous rates that ignore actions reproduce the exogenous field") {
  const GameSpec g = SwitchingExample();
  GameSpec e = g;
  e.rate.kind = RateKind::kEndogenous;
  e.rate.endogenous = {{g.rate.exogenous, g.rate.exogenous}, {g.rate.exogenous, g.rate.exogenous}};
  e.rate.endogenous[1][1](0, 0) = -1.0;  // keeps ActionIndependent() true
  const ObstacleField a = SolveObstacle(Hamiltonian::FromSpec(g), BeliefGrid(2, 200), {});
  const ObstacleField b = SolveObstacle(Hamiltonian::FromSpec(e), BeliefGrid(2, 200), {});
  CHECK(a.field.SupDistance(b.field) <= 1e-7);
}

TEST_CASE("action-controlled chain converges to a concave field") {
  GameSpec g = SwitchingExample();
  g.rate.kind = RateKind::kEndogenous;
  g.rate.endogenous = {{Matrix::Zero(2, 2), Matrix::Zero(2, 2)},
                       {g.rate.exogenous, g.rate.exogenous}};
  const Hamiltonian h = Hamiltonian::FromSpec(g);
  CHECK(h.kind() == HamiltonianKind::kEndogenous);
  const ObstacleField v = SolveObstacle(h, BeliefGrid(2, 200), {});
  CHECK(v.converged);
  CHECK(CheckConcave(v.field, 1e-9).concave);
  // Player 1 can keep the chain frozen but cannot do better than p (1 - p)
  // would allow at the center.
  CHECK(v.field(P(0.5)) >= 0.25 - 1e-3);
}

TEST_CASE("double obstacle: payoff independent of the second state") {
  std::mt19937_64 rng(5);
  const GameSpecTwoSided two = RandomTwoSided(rng, true);
  GameSpec one;
  one.states = two.states1;
  one.actions1 = two.actions1;
  one.actions2 = two.actions2;
  one.payoff = {two.payoff[0][0], two.payoff[1][0]};
  // The one-sided reduction needs exogenous transitions on side 1.
  GameSpecTwoSided sym = two;
  sym.rate1.assign(3, TwoStateGenerator(1.0, 2.0));
  one.rate.exogenous = TwoStateGenerator(1.0, 2.0);
  one.initial_belief = P(0.5);
  const ObstacleField ref = SolveObstacle(Hamiltonian::FromSpec(one), BeliefGrid(2, 40), {});
  const DoubleObstacleField v = SolveDoubleObstacle(Hamiltonian::TwoSided(sym), {40, 40});
  REQUIRE(v.converged);
  double worst = 0.0;
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) worst = std::max(worst, std::abs(v.At(i, j) - ref.field.At(i)));
  }
  CHECK(worst <= 2e-3);
}

TEST_CASE("double obstacle: frozen chains sit between the envelopes") {
  GameSpecTwoSided g;
  std::mt19937_64 rng(6);
  g = RandomTwoSided(rng);
  for (auto& r : g.rate1) r.setZero();
  for (auto& r : g.rate2) r.setZero();
  const int m = 30;
  const DoubleObstacleField v = SolveDoubleObstacle(Hamiltonian::TwoSided(g), {m, m});
  REQUIRE(v.converged);
  CHECK(v.concavity_violation <= 1e-9);
  CHECK(v.convexity_violation <= 1e-9);
  const Hamiltonian h = Hamiltonian::TwoSided(g);
  for (int j = 0; j <= m; j += 5) {
    std::vector<double> u(m + 1);
    for (int i = 0; i <= m; ++i) u[i] = h.U(P(static_cast<double>(i) / m), P(static_cast<double>(j) / m));
    const auto cav = ConcaveMajorant1D(u);
    for (int i = 0; i <= m; ++i) CHECK(v.At(i, j) <= cav[i] + 1e-9);
  }
  for (int i = 0; i <= m; i += 5) {
    std::vector<double> u(m + 1);
    for (int j = 0; j <= m; ++j) u[j] = h.U(P(static_cast<double>(i) / m), P(static_cast<double>(j) / m));
    const auto vex = ConvexMinorant1D(u);
    for (int j = 0; j <= m; ++j) CHECK(v.At(i, j) >= vex[j] - 1e-9);
  }
}

TEST_CASE("two-sided calls are rejected by the one-sided solver") {
  std::mt19937_64 rng(7);
  const Hamiltonian h = Hamiltonian::TwoSided(RandomTwoSided(rng));
  CHECK_THROWS_AS(SolveObstacle(h, BeliefGrid(2, 10), {}), HJError);
}

}  // namespace
}  // namespace asymgame
