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


#ifndef ASYMGAME_ANALYSIS_H_
#define ASYMGAME_ANALYSIS_H_

// Discounted functionals along the non-revealing belief flow and the bounds
// they provide on the limit value:
//
//   lower (non-revealing)     int r e^{-rt} u(p*_t) dt
//   lower (fully revealing)   sum_s u(delta_s) int r e^{-rt} p*_t(s) dt
//   upper                     int r e^{-rt} cav u(p*_t) dt
//
// Every integral is taken after the change of variables tau = 1 - e^{-rt},
// which maps [0, inf) onto [0, 1) with unit density.

#include <functional>
#include <stdexcept>
#include <vector>

#include "asymgame/envelope.h"
#include "asymgame/game_model.h"

namespace asymgame {

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
  double tolerance = 1e-8;  // absolute, on the whole integral
  int max_depth = 30;
};

// int_0^1 f(tau) dtau by adaptive bisection with 64-point Gauss-Legendre
// panels; a panel is accepted once its two halves agree with it to within its
// share of the tolerance.
double IntegrateUnit(const std::function<double(double)>& f,
                     const QuadratureOptions& options = {});

// int_0^inf r e^{-rt} g(t) dt, computed in tau-space.
double DiscountedIntegral(const std::function<double(double)>& g, double r,
                          const QuadratureOptions& options = {});

// Evaluates p*_t quickly; closed form for two states, Pade otherwise.
class FlowEvaluator {
 public:
  explicit FlowEvaluator(Matrix rate);
  Belief operator()(const Belief& p, double t) const;
  const Matrix& rate() const { return rate_; }

 private:
  Matrix rate_;
  bool two_state_ = false;
  double total_rate_ = 0.0;
  double stationary0_ = 0.0;
};

// Sampled one-shot value u on a grid, its concavification, and the exogenous
// chain data that drive the bounds.
struct UModel {
  Matrix rate;
  double discount = 1.0;
  ValueField u;
  ValueField cav_u;
  Vector vertex_u;  // u(delta_s)
  Belief initial_belief;
};

// u sampled by solving the average game on a grid of the given resolution.
// Requires an action-independent rate; throws AnalysisError otherwise.
UModel BuildUModel(const GameSpec& spec, int resolution);
UModel BuildUModel(const AbstractU& spec);
UModel BuildUModel(const Matrix& rate, double discount, ValueField u);

double UpperBound(const UModel& model, const Belief& p,
                  const QuadratureOptions& options = {});
double LowerBoundNonRevealing(const UModel& model, const Belief& p,
                              const QuadratureOptions& options = {});
double LowerBoundFullyRevealing(const UModel& model, const Belief& p,
                                const QuadratureOptions& options = {});

// Closed-form value of the symmetric two-state example with payoffs
// diag(1, 0) and diag(0, 1) and switching rate pi:
//   1/4 - (2p - 1)^2 / 4 * r / (r + 4 pi).
// p is the probability of the first state. Requires p in [0, 1], r >= 0,
// pi >= 0 and r + pi > 0.
double ClosedFormExample(double p, double r, double pi);

struct SandwichRow {
  Belief p;
  double lower_nonrevealing = 0.0;
  double lower_fully_revealing = 0.0;
  double upper = 0.0;
  bool ordered = true;  // max(lowers) <= upper + 1e-8
};

std::vector<SandwichRow> SandwichReport(const UModel& model,
                                        const BeliefGrid& grid,
                                        const QuadratureOptions& options = {});

}  // namespace asymgame

#endif  // ASYMGAME_ANALYSIS_H_
