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


#include "asymgame/analysis.h"

#include <cmath>
#include <random>

#include "asymgame/chain.h"
#include "asymgame/instances.h"
#include "doctest.h"
#include "oracles/oracles.h"

namespace asymgame {
namespace {

Belief P(double p) {
  Belief b(2);
  b << p, 1.0 - p;
  return b;
}

GameSpec RandomSpec(int states, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GameSpec g;
  for (int s = 0; s < states; ++s) g.states.push_back("s" + std::to_string(s));
  g.actions1 = {"a", "b"};
  g.actions2 = {"c", "d", "e"};
  for (int s = 0; s < states; ++s) {
    Matrix m(2, 3);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 3; ++j) m(i, j) = u(rng);
    }
    g.payoff.push_back(m);
  }
  g.rate.exogenous = oracle::RandomGenerator(states, rng, 1.5);
  g.discount = 0.5 + std::abs(u(rng));
  g.initial_belief = Belief::Constant(states, 1.0 / states);
  return g;
}

TEST_CASE("quadrature on known integrals") {
  CHECK(IntegrateUnit([](double x) { return x * x; }) == doctest::Approx(1.0 / 3).epsilon(1e-13));
  CHECK(IntegrateUnit([](double x) { return std::sqrt(x); }) ==
        doctest::Approx(2.0 / 3).epsilon(1e-9));
  const double kink = IntegrateUnit([](double x) { return std::abs(x - 0.3); });
  CHECK(kink == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-9));
  // int_0^inf 2 e^{-2t} e^{-t} dt = 2/3.
  QuadratureOptions tight;
  tight.tolerance = 1e-13;
  CHECK(DiscountedIntegral([](double t) { return std::exp(-t); }, 2.0, tight) ==
        doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("flow evaluator matches the general flow") {
  const FlowEvaluator fast(TwoStateGenerator(2.0, 0.5));
  for (double t : {0.0, 0.2, 1.0, 7.0}) {
    CHECK((fast(P(0.9), t) - BeliefFlow(TwoStateGenerator(2.0, 0.5), P(0.9), t))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
  }
}

TEST_CASE("bounds on the switching example equal the closed form") {
  const UModel model = BuildUModel(SwitchingExample(1.0, 1.0), 200);
  for (double p : {0.0, 0.1, 0.3, 0.5, 0.77, 1.0}) {
    const double exact = ClosedFormExample(p, 1.0, 1.0);
    CHECK(std::abs(UpperBound(model, P(p)) - exact) <= 1e-5);
    CHECK(std::abs(LowerBoundNonRevealing(model, P(p)) - exact) <= 1e-5);
  }
  CHECK(UpperBound(model, P(0.0)) == doctest::Approx(0.2).epsilon(1e-5));
  CHECK(LowerBoundFullyRevealing(model, P(0.5)) == doctest::Approx(0.0));
}

TEST_CASE("closed form arithmetic") {
  for (double r : {0.1, 1.0, 9.0}) CHECK(ClosedFormExample(0.5, r, 3.0) == 0.25);
  CHECK(ClosedFormExample(0.0, 0.0, 1.0) == 0.25);
  CHECK(ClosedFormExample(0.0, 1.0, 1.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(ClosedFormExample(1.5, 1.0, 1.0), AnalysisError);
  CHECK_THROWS_AS(ClosedFormExample(0.5, -1.0, 1.0), AnalysisError);
  CHECK_THROWS_AS(ClosedFormExample(0.5, 0.0, 0.0), AnalysisError);
}

TEST_CASE("constant u") {
  const ValueField u(BeliefGrid(2, 10), 0.7);
  const UModel model = BuildUModel(TwoStateGenerator(1.0, 2.0), 1.0, u);
  for (double p : {0.0, 0.4, 1.0}) {
    CHECK(UpperBound(model, P(p)) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(LowerBoundNonRevealing(model, P(p)) == doctest::Approx(0.7).epsilon(1e-12));
  }
}

TEST_CASE("counterexample upper bound matches a Riemann sum") {
  const AbstractU spec = CounterexampleSpec(1000);
  const UModel model = BuildUModel(spec);
  const FlowEvaluator flow(spec.rate);
  const double riemann = oracle::RiemannDiscounted(
      [&](double t) { return model.cav_u(flow(P(0.1), t)); }, spec.discount, 1000000);
  CHECK(std::abs(UpperBound(model, P(0.1)) - riemann) <= 1e-6);
}

TEST_CASE("convex u: fully revealing bound is the upper bound") {
  const GameSpec g = ConvexUExample(TwoStateGenerator(1.0, 3.0), 1.0);
  const UModel model = BuildUModel(g, 200);
  for (double p : {0.0, 0.2, 0.6, 1.0}) {
    CHECK(std::abs(LowerBoundFullyRevealing(model, P(p)) - UpperBound(model, P(p))) <= 1e-9);
  }
  const double p_inf = InvariantMeasure(g.rate.exogenous)(0);
  CHECK(LowerBoundNonRevealing(model, P(p_inf)) == doctest::Approx(model.u(P(p_inf))).epsilon(1e-9));
}

TEST_CASE("frozen chain: fully revealing bound is the vertex average") {
  const UModel model = BuildUModel(SwitchingExample(), 100);
  const UModel frozen = BuildUModel(Matrix::Zero(2, 2), 1.0, model.u);
  CHECK(LowerBoundFullyRevealing(frozen, P(0.3)) ==
        doctest::Approx(0.3 * frozen.vertex_u(0) + 0.7 * frozen.vertex_u(1)));
}

TEST_CASE("sandwich holds on random specs") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int states = trial % 4 == 3 ? 3 : 2;
    const UModel model = BuildUModel(RandomSpec(states, rng), states == 2 ? 40 : 10);
    for (const auto& row : SandwichReport(model, model.u.grid)) {
      CHECK(row.ordered);
      CHECK(row.lower_nonrevealing <= row.upper + 1e-8);
      CHECK(row.lower_fully_revealing <= row.upper + 1e-8);
    }
  }
}

TEST_CASE("sandwich report on the reference instances") {
  const UModel concave = BuildUModel(SwitchingExample(), 50);
  for (const auto& row : SandwichReport(concave, concave.u.grid)) {
    CHECK(std::abs(row.lower_nonrevealing - row.upper) <= 1e-9);
  }
  const UModel convex = BuildUModel(ConvexUExample(TwoStateGenerator(1, 1), 1.0), 50);
  for (const auto& row : SandwichReport(convex, convex.u.grid)) {
    CHECK(std::abs(row.lower_fully_revealing - row.upper) <= 1e-9);
  }
  const UModel counter = BuildUModel(CounterexampleSpec(1000));
  const auto row = SandwichReport(counter, BeliefGrid(2, 10))[1];
  CHECK(row.p(0) == doctest::Approx(0.1));
  CHECK(std::max(row.lower_nonrevealing, row.lower_fully_revealing) < row.upper - 1e-3);
}

TEST_CASE("action-dependent transitions are rejected") {
  GameSpec g = SwitchingExample();
  g.rate.kind = RateKind::kEndogenous;
  g.rate.endogenous.assign(2, std::vector<Matrix>(2, TwoStateGenerator(1, 1)));
  g.rate.endogenous[0][0] = TwoStateGenerator(2, 1);
  CHECK_THROWS_AS(BuildUModel(g, 10), AnalysisError);
}

}  // namespace
}  // namespace asymgame
