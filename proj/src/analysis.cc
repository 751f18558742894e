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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>

#include "asymgame/chain.h"
#include "asymgame/matrix_game.h"

namespace asymgame {
namespace {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const Rule& GaussLegendre64() {
  static const Rule rule = [] {
    using Gauss = boost::math::quadrature::gauss<double, 64>;
    Rule r;
    const auto& x = Gauss::abscissa();
    const auto& w = Gauss::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      r.nodes.push_back(x[i]);
      r.weights.push_back(w[i]);
      if (x[i] != 0.0) {
        r.nodes.push_back(-x[i]);
        r.weights.push_back(w[i]);
      }
    }
    return r;
  }();
  return rule;
}

double Panel(const std::function<double(double)>& f, double a, double b) {
  const Rule& rule = GaussLegendre64();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

double Adaptive(const std::function<double(double)>& f, double a, double b,
                double whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = Panel(f, a, mid);
  const double right = Panel(f, mid, b);
  if (depth <= 0 || std::abs(left + right - whole) <= tol) return left + right;
  return Adaptive(f, a, mid, left, 0.5 * tol, depth - 1) +
         Adaptive(f, mid, b, right, 0.5 * tol, depth - 1);
}

double TimeOf(double tau, double r) { return -std::log1p(-tau) / r; }

}  // namespace

double IntegrateUnit(const std::function<double(double)>& f,
                     const QuadratureOptions& options) {
  return Adaptive(f, 0.0, 1.0, Panel(f, 0.0, 1.0), options.tolerance,
                  options.max_depth);
}

double DiscountedIntegral(const std::function<double(double)>& g, double r,
                          const QuadratureOptions& options) {
  if (!(r > 0.0)) throw AnalysisError("discount rate must be positive");
  return IntegrateUnit([&](double tau) { return g(TimeOf(tau, r)); }, options);
}

FlowEvaluator::FlowEvaluator(Matrix rate) : rate_(std::move(rate)) {
  if (rate_.rows() == 2) {
    two_state_ = true;
    total_rate_ = rate_(0, 1) + rate_(1, 0);
    stationary0_ = total_rate_ > 0.0 ? rate_(1, 0) / total_rate_ : 0.0;
  }
}

Belief FlowEvaluator::operator()(const Belief& p, double t) const {
  if (!two_state_) return BeliefFlow(rate_, p, t);
  Belief q(2);
  if (total_rate_ == 0.0) return p;
  const double decay = std::exp(-total_rate_ * t);
  q(0) = std::clamp(stationary0_ + decay * (p(0) - stationary0_), 0.0, 1.0);
  q(1) = 1.0 - q(0);
  return q;
}

UModel BuildUModel(const Matrix& rate, double discount, ValueField u) {
  UModel model;
  model.rate = rate;
  model.discount = discount;
  model.cav_u = Cav(u);
  const int ns = u.grid.dim();
  model.vertex_u.resize(ns);
  for (int s = 0; s < ns; ++s) {
    Belief delta = Belief::Zero(ns);
    delta(s) = 1.0;
    model.vertex_u(s) = u(delta);
  }
  model.u = std::move(u);
  model.initial_belief = Belief::Constant(ns, 1.0 / ns);
  return model;
}

UModel BuildUModel(const GameSpec& spec, int resolution) {
  if (!spec.rate.ActionIndependent()) {
    throw AnalysisError("the bounds need an action-independent transition rate");
  }
  const BeliefGrid grid(spec.NumStates(), resolution);
  ValueField u(grid);
  const int n = grid.size();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) u.values[i] = AverageGameValue(spec, grid.Point(i));
  UModel model = BuildUModel(spec.rate.Generator(0, 0), spec.discount, std::move(u));
  model.initial_belief = spec.initial_belief;
  return model;
}

UModel BuildUModel(const AbstractU& spec) {
  const BeliefGrid grid(spec.NumStates(), spec.grid_resolution);
  ValueField u(grid);
  u.values = spec.values;
  UModel model = BuildUModel(spec.rate, spec.discount, std::move(u));
  model.initial_belief = spec.initial_belief;
  return model;
}

double UpperBound(const UModel& model, const Belief& p,
                  const QuadratureOptions& options) {
  const FlowEvaluator flow(model.rate);
  return DiscountedIntegral([&](double t) { return model.cav_u(flow(p, t)); },
                            model.discount, options);
}

double LowerBoundNonRevealing(const UModel& model, const Belief& p,
                              const QuadratureOptions& options) {
  const FlowEvaluator flow(model.rate);
  return DiscountedIntegral([&](double t) { return model.u(flow(p, t)); },
                            model.discount, options);
}

double LowerBoundFullyRevealing(const UModel& model, const Belief& p,
                                const QuadratureOptions& options) {
  const FlowEvaluator flow(model.rate);
  return DiscountedIntegral([&](double t) { return model.vertex_u.dot(flow(p, t)); },
                            model.discount, options);
}

double ClosedFormExample(double p, double r, double pi) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw AnalysisError("closed form: p must lie in [0, 1], got " + std::to_string(p));
  }
  if (!(r >= 0.0) || !(pi >= 0.0) || !(r + pi > 0.0)) {
    throw AnalysisError("closed form: need r >= 0, pi >= 0 and r + pi > 0");
  }
  const double d = 2.0 * p - 1.0;
  return 0.25 - 0.25 * d * d * r / (r + 4.0 * pi);
}

std::vector<SandwichRow> SandwichReport(const UModel& model,
                                        const BeliefGrid& grid,
                                        const QuadratureOptions& options) {
  std::vector<SandwichRow> rows(grid.size());
  const int n = grid.size();
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    SandwichRow& row = rows[i];
    row.p = grid.Point(i);
    row.lower_nonrevealing = LowerBoundNonRevealing(model, row.p, options);
    row.lower_fully_revealing = LowerBoundFullyRevealing(model, row.p, options);
    row.upper = UpperBound(model, row.p, options);
    row.ordered = std::max(row.lower_nonrevealing, row.lower_fully_revealing) <= row.upper + 1e-8;
  }
  return rows;
}

}  // namespace asymgame
