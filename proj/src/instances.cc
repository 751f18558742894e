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


#include "asymgame/instances.h"

#include "asymgame/envelope.h"

namespace asymgame {
namespace {

GameSpec TwoByTwo(const Matrix& g1, const Matrix& g2, const Matrix& rate, double r) {
  GameSpec spec;
  spec.states = {"s1", "s2"};
  spec.actions1 = {"T", "B"};
  spec.actions2 = {"L", "R"};
  spec.payoff = {g1, g2};
  spec.rate.kind = RateKind::kExogenous;
  spec.rate.exogenous = rate;
  spec.discount = r;
  spec.initial_belief = Belief::Constant(2, 0.5);
  return spec;
}

AbstractU Tabulate(double (*u)(double), int resolution, double rho12, double rho21,
                   double r) {
  AbstractU spec;
  spec.states = {"s1", "s2"};
  spec.rate = TwoStateGenerator(rho12, rho21);
  spec.discount = r;
  spec.initial_belief = Belief::Constant(2, 0.5);
  spec.grid_resolution = resolution;
  const BeliefGrid grid(2, resolution);
  for (int i = 0; i < grid.size(); ++i) spec.values.push_back(u(grid.Point(i)(0)));
  return spec;
}

double CounterexampleDefault(double p) { return CounterexampleU(p); }

}  // namespace

Matrix TwoStateGenerator(double rho12, double rho21) {
  Matrix r(2, 2);
  r << -rho12, rho12, rho21, -rho21;
  return r;
}

GameSpec SwitchingExample(double r, double pi, double p0) {
  Matrix g1(2, 2), g2(2, 2);
  g1 << 1, 0, 0, 0;
  g2 << 0, 0, 0, 1;
  GameSpec spec = TwoByTwo(g1, g2, TwoStateGenerator(pi, pi), r);
  spec.initial_belief << p0, 1.0 - p0;
  return spec;
}

GameSpec ConcaveUExample(const Matrix& rate, double r) {
  Matrix g1(2, 2), g2(2, 2);
  g1 << 1, 0, 0, 0;
  g2 << 0, 0, 0, 1;
  return TwoByTwo(g1, g2, rate, r);
}

GameSpec ConvexUExample(const Matrix& rate, double r) {
  Matrix g1(2, 2), g2(2, 2);
  g1 << 1, 1, 0, 0;
  g2 << 0, 0, 1, 1;
  return TwoByTwo(g1, g2, rate, r);
}

double CounterexampleU(double p, double c) {
  if (p > 0.5) p = 1.0 - p;
  if (p >= 1.0 / 3.0) return 1.0;
  return 3.0 * p * (1.0 - c * (1.0 - 3.0 * p));
}

AbstractU CounterexampleSpec(int resolution, double c, double rho12, double rho21, double r) {
  AbstractU spec = Tabulate(&CounterexampleDefault, resolution, rho12, rho21, r);
  if (c != 0.5) {
    const BeliefGrid grid(2, resolution);
    for (int i = 0; i < grid.size(); ++i) spec.values[i] = CounterexampleU(grid.Point(i)(0), c);
  }
  return spec;
}

double DipU(double p) {
  constexpr double kLo = 1.0 / 3.0;
  constexpr double kHi = 2.0 / 3.0;
  if (p <= kLo) return 0.8 + 0.6 * (p - kLo) - 5.4 * (p - kLo) * (p - kLo);
  if (p >= kHi) return 1.0 + 0.6 * (p - kHi) - 10.8 * (p - kHi) * (p - kHi);
  return 0.8 + 0.6 * (p - kLo) - 9.0 * (p - kLo) * (kHi - p);
}

AbstractU DipSpec(int resolution, double rho12, double rho21, double r) {
  return Tabulate(&DipU, resolution, rho12, rho21, r);
}

}  // namespace asymgame
