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


#ifndef ASYMGAME_PROCESS_SIM_H_
#define ASYMGAME_PROCESS_SIM_H_

// Belief processes: static and dynamic splittings, the two-point jump
// process for two-state games, Monte Carlo evaluation of
//   E int_0^inf r e^{-rt} u(p_t) dt,
// a martingale-consistency test, the optimality-conditions checker, and
// simulation of the discretized game between a splitting strategy of the
// informed player and the Bayesian best reply of the uninformed one.

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "asymgame/chain.h"
#include "asymgame/game_model.h"
#include "asymgame/hj.h"

namespace asymgame {

class ProcessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using UEvaluator = std::function<double(const Belief&)>;

// --- Static splitting ---------------------------------------------------

struct SplittingPlan {
  Vector weights;                 // alpha over labels
  std::vector<Belief> posteriors;  // p_l
  Matrix joint;                   // joint(l, s) = alpha_l p_l(s)

  Vector LabelMarginal() const { return joint.rowwise().sum(); }
  Belief StateMarginal() const { return joint.colwise().sum().transpose(); }
  // Law of s given label l (requires weights(l) > 0).
  Belief Conditional(int l) const { return joint.row(l).transpose() / joint.row(l).sum(); }
  // Conditional law of the label given the state, the informed player's
  // lottery.
  Vector LabelGivenState(int s) const { return joint.col(s) / joint.col(s).sum(); }
};

// Throws ProcessError if sum_l alpha_l p_l differs from p by more than 1e-10.
SplittingPlan StaticSplit(const Belief& p, const Vector& weights,
                          const std::vector<Belief>& posteriors);

// --- Dynamic splitting on finite trees --------------------------------------

// Law of a belief sequence (q_0, q_1, ...) given as a finite tree: node 0 is
// q_0 and each child carries its conditional probability given its parent.
struct BeliefTree {
  struct Node {
    Belief belief;
    double prob = 1.0;  // Q(parent -> this)
    int parent = -1;
    int depth = 0;
    std::vector<int> children;
  };
  std::vector<Node> nodes;

  explicit BeliefTree(const Belief& root);
  int AddChild(int parent, double prob, const Belief& belief);
  int Depth() const;
  // Unconditional probability of the path from the root to `node`.
  double PathProbability(int node) const;
  // "0/1/0": child positions from the root, for error messages.
  std::string Label(int node) const;
};

struct DynamicSplitting {
  Matrix pi;        // transition matrix of the state chain
  BeliefTree tree;
  // mu[node](c, s') = mu_m(q^m, s'; child c of node), m = depth of node.
  std::vector<Matrix> mu;
  int pruned = 0;   // (node, s') pairs with zero theta normalization

  // nu_m(q^m, s; child c, s') = pi(s' | s) mu_m(q^m, s'; c).
  double Nu(int node, int s, int child_pos, int s_next) const;
};

// Builds mu by the ratio formula
//   mu_m(q^m, s'; q') = Q(q^m -> q') q'(s') / (Pi^T q_m)(s').
// Throws ProcessError naming the node where E[q_{m+1} | q^m] != Pi^T q_m.
DynamicSplitting DynamicSplit(const BeliefTree& tree, const Matrix& pi);

struct SplitVerification {
  double c1_residual = 0.0;  // belief-marginal vs Q
  double c2_residual = 0.0;  // conditional law of the state vs q_m
  double mu_residual = 0.0;  // kernels sum to one
};

// Exhaustive enumeration of (belief path, state) pairs under the induced law.
SplitVerification VerifyDynamicSplit(const DynamicSplitting& split);

// --- Belief processes ---------------------------------------------------

enum class Recipe { kDeterministicFlow, kFullyRevealing, kTwoStateOptimal, kCustom };

struct TwoStateParams {
  double rho12 = 0.0;
  double rho21 = 0.0;
  double p_lo = 0.0;
  double p_hi = 1.0;
  double rate_lo_hi = 0.0;  // tilde rho_12: jump rate from p_lo to p_hi
  double rate_hi_lo = 0.0;  // tilde rho_21
  double theta = 0.0;       // entry time of the flow into [p_lo, p_hi]
  double weight_lo = 0.0;   // q_theta(p_lo)
  double p_star_inf = 0.0;
};

struct BeliefProcess {
  Recipe recipe = Recipe::kDeterministicFlow;
  Matrix rate;
  Belief p;
  TwoStateParams two_state;
  // Custom recipe: pure jump process on `support` with generator
  // `jump_rates`, started from `initial_weights`.
  std::vector<Belief> support;
  Matrix jump_rates;
  Vector initial_weights;
};

BeliefProcess DeterministicFlowProcess(const Matrix& rate, const Belief& p);
BeliefProcess FullyRevealingProcess(const Matrix& rate, const Belief& p);
// p is the probability of the first state. Requires p_lo < p*_inf < p_hi and
// nonnegative tilde rates.
BeliefProcess TwoStateOptimalProcess(double rho12, double rho21, double p_lo, double p_hi,
                                     double p);
BeliefProcess CustomProcess(const Matrix& rate, const std::vector<Belief>& support,
                            const Matrix& jump_rates, const Vector& initial_weights);

// One sampled trajectory: p_t follows the flow from flow_start on
// [0, flow_until), then is piecewise constant with values[i] on
// [times[i], times[i+1]).
struct BeliefPath {
  Belief flow_start;
  double flow_until = 0.0;
  std::vector<double> times;
  std::vector<int> labels;  // index into the recipe's finite support
  std::vector<Belief> values;
};

// Samples on [0, horizon].
BeliefPath SampleBeliefPath(const BeliefProcess& process, double horizon, Rng& rng);
Belief BeliefAt(const BeliefProcess& process, const BeliefPath& path, double t);

struct MonteCarloEstimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal
  double truncation = 0.0;  // bound on the ignored tail
  int paths = 0;
};

struct EvaluateOptions {
  int paths = 10000;
  std::uint64_t seed = 42;
  double tail = 1e-10;  // tau-truncation: horizon = -ln(tail) / r
};

MonteCarloEstimate EvaluateP1(const BeliefProcess& process, const UEvaluator& u, double r,
                              const EvaluateOptions& options = {});

struct MartingaleCell {
  double t = 0.0;
  double h = 0.0;
  double bin_center = 0.0;
  int count = 0;
  double mean = 0.0;       // first coordinate of p_{t+h} - P_h^T p_t
  double std_error = 0.0;
  bool pass = true;
};

struct MartingaleReport {
  std::vector<MartingaleCell> cells;
  bool pass = true;
};

MartingaleReport MartingaleConsistencyCheck(const BeliefProcess& process,
                                            const std::vector<double>& t_list,
                                            const std::vector<double>& h_list, int paths,
                                            std::uint64_t seed);

struct OptimalityReport {
  bool membership_ok = true;
  double worst_membership = 0.0;  // distance to the nearest pde-active point
  Belief worst_membership_belief;
  bool chords_ok = true;
  double worst_chord = 0.0;       // |v(p) - v(p-) - <Dv(p-), p - p->|
  int jumps_checked = 0;
  int beliefs_checked = 0;
  // All recipes are a deterministic drift plus finitely many jumps, so the
  // continuous martingale part vanishes by construction.
  bool no_continuous_martingale = true;
  bool Passes() const { return membership_ok && chords_ok && no_continuous_martingale; }
};

OptimalityReport VerifyOptimalityConditions(const BeliefProcess& process,
                                            const ObstacleField& v, double tol,
                                            int paths = 200, std::uint64_t seed = 42);

// --- Game play ----------------------------------------------------------

enum class Strategy1 { kSplittingOptimal, kNonRevealing, kFullyRevealing };

struct PlayConfig {
  int n = 32;
  Strategy1 strategy = Strategy1::kNonRevealing;
  int rounds = 0;  // 0: smallest K with (1 - lambda)^K <= 1e-4
  int paths = 20000;
  std::uint64_t seed = 42;
  // Two-point support for kSplittingOptimal (two states only).
  double p_lo = std::numeric_limits<double>::quiet_NaN();
  double p_hi = std::numeric_limits<double>::quiet_NaN();
};

struct PlayResult {
  MonteCarloEstimate payoff;
  int rounds = 0;
  double tail_bound = 0.0;        // (1 - lambda)^K max|g|
  long long zero_probability = 0; // Bayes updates that kept the prior
};

// Exogenous transitions only.
PlayResult PlayGame(const GameSpec& spec, const PlayConfig& config);

}  // namespace asymgame

#endif  // ASYMGAME_PROCESS_SIM_H_
