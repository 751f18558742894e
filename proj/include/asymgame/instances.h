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


#ifndef ASYMGAME_INSTANCES_H_
#define ASYMGAME_INSTANCES_H_

// Reference game instances used by the CLI, the tests and data/.

#include "asymgame/game_model.h"

namespace asymgame {

// Two states, payoffs diag(1, 0) and diag(0, 1), symmetric switching at rate
// pi. u(p) = p (1 - p).
GameSpec SwitchingExample(double r = 1.0, double pi = 1.0, double p0 = 0.5);

// Same payoffs (u concave) under an arbitrary two-state generator.
GameSpec ConcaveUExample(const Matrix& rate, double r);

// Payoffs [[1,1],[0,0]] and [[0,0],[1,1]]: u(p) = max(p, 1 - p), convex.
GameSpec ConvexUExample(const Matrix& rate, double r);

Matrix TwoStateGenerator(double rho12, double rho21);

// u(0) = u(1) = 0, u = 1 on [1/3, 2/3], and u(p) = 3p (1 - c (1 - 3p)) on
// [0, 1/3] (mirrored on [2/3, 1]), strictly convex there for c in (0, 1].
double CounterexampleU(double p, double c = 0.5);
AbstractU CounterexampleSpec(int resolution = 1000, double c = 0.5, double rho12 = 1.0,
                             double rho21 = 1.0, double r = 1.0);

// A u whose concave envelope is C^1 and touches u exactly on
// [0, 1/3] and [2/3, 1], with the chord from (1/3, 0.8) to (2/3, 1) above a
// strict dip in between. The two-point belief process on {1/3, 2/3} is
// optimal for it.
double DipU(double p);
AbstractU DipSpec(int resolution = 1000, double rho12 = 1.0, double rho21 = 1.0,
                  double r = 1.0);

}  // namespace asymgame

#endif  // ASYMGAME_INSTANCES_H_
