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


#ifndef ASYMGAME_SHAPLEY_DP_H_
#define ASYMGAME_SHAPLEY_DP_H_

// Value iteration for the game played every 1/n time units. At a belief p the
// informed player picks x in Delta(A)^S; the action a is public, so player 2's
// posterior is p_hat(x, a) and then drifts with the chain over the stage:
//
//   T f(p) = max_x min_b  lambda g(p, x, b)
//                       + (1 - lambda) sum_a x(p)(a) f(P_{1/n}(a, b)^T p_hat(x, a))
//
// with lambda = 1 - exp(-r / n). The mixed action of player 2 can be taken
// pure because the bracket is affine in it.

#include <functional>
#include <stdexcept>
#include <vector>

#include "asymgame/envelope.h"
#include "asymgame/game_model.h"

namespace asymgame {

class DPError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DPConfig {
  int n = 32;                 // stages per unit of time
  int grid_resolution = 200;  // belief grid
  int xgrid = 40;             // resolution of each x_s in Delta(A)
  double tolerance = 1e-6;    // sup-norm stopping rule
  int max_iterations = 200000;
  // After the grid fixed point is reached, add at every belief the profile
  // obtained by one coordinate-ascent pass (mass moves of 1/(2k)) from the
  // best grid profile, and iterate again over the enlarged candidate sets.
  bool refine = true;
  // Iterate cav(T f) instead of T f. The exact operator maps concave fields
  // to concave fields; cav restores that property, which grid search over x
  // loses, and stays below the exact operator.
  bool concavify = true;
};

inline constexpr int kMaxDPStates = 3;
inline constexpr int kMaxDPActions = 4;
inline constexpr long long kMaxProfiles = 250000;

// lambda_n = 1 - exp(-r / n).
double StageWeight(double r, int n);

struct SplitOutcome {
  Vector marginal;                // x(p)(a)
  std::vector<Belief> posteriors;  // p_hat(x, a); meaningful only when used
  std::vector<bool> used;         // marginal(a) > 0
};

// x(s, a) is the probability of action a in state s.
SplitOutcome Split(const Belief& p, const Matrix& x);

class BellmanOperator {
 public:
  BellmanOperator(const GameSpec& spec, const DPConfig& config);

  // max over the candidate profiles of min over pure b, at every grid point.
  ValueField Apply(const ValueField& f) const;
  // Also returns the maximizing profile at every grid point.
  ValueField Apply(const ValueField& f, std::vector<Matrix>* argmax) const;

  // Adds one refined candidate per grid point, found by coordinate ascent on
  // Guarantee(., f) from the best current candidate. The candidate sets stay
  // fixed afterwards, so Apply remains monotone and a contraction.
  void AddRefinedCandidates(const ValueField& f);
  bool refined() const { return !extra_profiles_.empty(); }

  // Bracket of the operator for one (x, b), evaluated directly.
  double Objective(const Belief& p, const Matrix& x, int b, const ValueField& f) const;
  // min over pure b of Objective.
  double Guarantee(const Belief& p, const Matrix& x, const ValueField& f) const;

  const BeliefGrid& grid() const { return grid_; }
  double lambda() const { return lambda_; }
  int num_profiles() const { return static_cast<int>(profiles_.size()); }
  const Matrix& profile(int c) const { return profiles_[c]; }
  // Posteriors that left the simplex by round-off and were projected back.
  long long clamped_posteriors() const { return clamped_; }

 private:
  void BuildPlan();
  // Fills the bracket tables for profile x at belief p.
  void FillEntry(const Belief& p, const Matrix& x, double* stage, int* index,
                 double* weight, long long* clamped) const;
  double EntryValue(const double* stage, const int* index, const double* weight,
                    const ValueField& f) const;
  double PlanValue(int point, int candidate, const ValueField& f) const;

  const GameSpec& spec_;
  DPConfig config_;
  BeliefGrid grid_;
  double lambda_ = 0.0;
  bool exogenous_ = true;
  std::vector<std::vector<Matrix>> stage_transition_;  // [a][b], P_{1/n} transposed
  std::vector<Matrix> profiles_;

  // Precomputed brackets: for each (point, candidate), |B| stage payoffs and,
  // per continuation slot (1 if exogenous, |B| otherwise), `stride_`
  // interpolation terms (index, weight) already scaled by x(p)(a).
  int slots_ = 1;
  int stride_ = 0;
  std::vector<double> stage_;
  std::vector<int> cont_index_;
  std::vector<double> cont_weight_;
  long long clamped_ = 0;

  // Refined candidates, one per grid point, with the same table layout.
  std::vector<Matrix> extra_profiles_;
  std::vector<double> extra_stage_;
  std::vector<int> extra_index_;
  std::vector<double> extra_weight_;
};

struct DPResult {
  ValueField field;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  double lambda = 0.0;
  long long clamped_posteriors = 0;
  ConcavityReport concavity;  // of the returned field, at 1e-6
  // Largest amount by which cav raised T f in the last iteration.
  double cav_raise = 0.0;
};

ValueField BellmanApply(const GameSpec& spec, const ValueField& f,
                        const DPConfig& config);

// Iterates from the zero field. Non-convergence is reported through
// DPResult::converged rather than thrown.
DPResult SolveVn(const GameSpec& spec, const DPConfig& config);

struct ConvergenceRow {
  int n = 0;
  double distance_reference = 0.0;  // sup over DP grid; NaN without reference
  double distance_closed_form = 0.0;
  double value_at_initial = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  // Distances to the reference are non-increasing after the first entry, up
  // to the noise allowance.
  bool monotone = true;
};

ConvergenceTable ConvergenceStudy(
    const GameSpec& spec, const std::vector<int>& n_list, const DPConfig& config,
    const ValueField* reference,
    const std::function<double(const Belief&)>& closed_form = nullptr,
    double noise = 1e-3);

}  // namespace asymgame

#endif  // ASYMGAME_SHAPLEY_DP_H_
