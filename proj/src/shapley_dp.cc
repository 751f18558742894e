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


#include "asymgame/shapley_dp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "asymgame/chain.h"

namespace asymgame {
namespace {

// All distributions on `actions` points with denominators k.
std::vector<Vector> SimplexLattice(int actions, int k) {
  std::vector<Vector> out;
  std::vector<int> counts(actions, 0);
  std::function<void(int, int)> fill = [&](int pos, int left) {
    if (pos == actions - 1) {
      counts[pos] = left;
      Vector v(actions);
      for (int a = 0; a < actions; ++a) v(a) = static_cast<double>(counts[a]) / k;
      out.push_back(v);
      return;
    }
    for (int c = left; c >= 0; --c) {
      counts[pos] = c;
      fill(pos + 1, left - c);
    }
  };
  fill(0, k);
  return out;
}

bool OffSimplex(const Belief& q) {
  return q.minCoeff() < -1e-12 || std::abs(q.sum() - 1.0) > 1e-12;
}

void Project(Belief* q) {
  *q = q->cwiseMax(0.0);
  *q /= q->sum();
}

}  // namespace

double StageWeight(double r, int n) { return -std::expm1(-r / n); }

SplitOutcome Split(const Belief& p, const Matrix& x) {
  const int ns = static_cast<int>(x.rows());
  const int na = static_cast<int>(x.cols());
  SplitOutcome out;
  out.marginal = x.transpose() * p;
  out.posteriors.assign(na, Belief::Zero(ns));
  out.used.assign(na, false);
  for (int a = 0; a < na; ++a) {
    if (out.marginal(a) <= 0.0) continue;
    out.used[a] = true;
    for (int s = 0; s < ns; ++s) out.posteriors[a](s) = p(s) * x(s, a) / out.marginal(a);
  }
  return out;
}

BellmanOperator::BellmanOperator(const GameSpec& spec, const DPConfig& config)
    : spec_(spec), config_(config) {
  if (config.n < 1) throw DPError("n must be >= 1");
  if (!(config.tolerance > 0.0)) throw DPError("tolerance must be positive");
  if (config.xgrid < 1) throw DPError("x-grid resolution must be >= 1");
  const int ns = spec.NumStates();
  const int na = spec.NumActions1();
  const int nb = spec.NumActions2();
  if (ns > kMaxDPStates) {
    throw DPError("dynamic programming supports at most 3 states, got " + std::to_string(ns));
  }
  if (na > kMaxDPActions || nb > kMaxDPActions) {
    throw DPError("dynamic programming supports at most 4 actions per player");
  }
  const long long per_state = [&] {
    long long c = 1;
    for (int i = 1; i < na; ++i) c = c * (config.xgrid + i) / i;
    return c;
  }();
  long long total = 1;
  for (int s = 0; s < ns; ++s) {
    total *= per_state;
    if (total > kMaxProfiles) {
      throw DPError("x-grid has more than " + std::to_string(kMaxProfiles) +
                    " profiles; lower --xgrid");
    }
  }
  grid_ = BeliefGrid(ns, config.grid_resolution);
  lambda_ = StageWeight(spec.discount, config.n);
  exogenous_ = spec.rate.ActionIndependent();

  const double h = 1.0 / config.n;
  stage_transition_.assign(na, std::vector<Matrix>(nb));
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < nb; ++b) {
      stage_transition_[a][b] =
          GlobalSemigroupCache().Get(spec.rate.Generator(a, b), h).transpose();
    }
  }

  const std::vector<Vector> lattice = SimplexLattice(na, config.xgrid);
  std::vector<int> digit(ns, 0);
  for (long long c = 0; c < total; ++c) {
    Matrix x(ns, na);
    for (int s = 0; s < ns; ++s) x.row(s) = lattice[digit[s]].transpose();
    profiles_.push_back(x);
    for (int s = ns - 1; s >= 0; --s) {
      if (++digit[s] < static_cast<int>(lattice.size())) break;
      digit[s] = 0;
    }
  }
  BuildPlan();
}

void BellmanOperator::FillEntry(const Belief& p, const Matrix& x, double* stage,
                                int* index, double* weight, long long* clamped) const {
  const int ns = spec_.NumStates();
  const int na = spec_.NumActions1();
  const int nb = spec_.NumActions2();
  // Stage payoff g(p, x, b) = sum_s p_s sum_a x_s(a) g(s, a, b).
  for (int b = 0; b < nb; ++b) {
    double g = 0.0;
    for (int s = 0; s < ns; ++s) {
      if (p(s) == 0.0) continue;
      g += p(s) * x.row(s).dot(spec_.payoff[s].col(b));
    }
    stage[b] = g;
  }
  const SplitOutcome split = Split(p, x);
  for (int slot = 0; slot < slots_; ++slot) {
    int* idx = index + slot * stride_;
    double* w = weight + slot * stride_;
    std::fill(idx, idx + stride_, 0);
    std::fill(w, w + stride_, 0.0);
    int k = 0;
    for (int a = 0; a < na; ++a) {
      if (!split.used[a]) continue;
      Belief q = stage_transition_[a][slot] * split.posteriors[a];
      if (OffSimplex(q)) ++*clamped;
      Project(&q);
      const BeliefGrid::Stencil st = grid_.Locate(q);
      for (int e = 0; e < st.count; ++e) {
        idx[k] = st.index[e];
        w[k] = split.marginal(a) * st.weight[e];
        ++k;
      }
    }
  }
}

void BellmanOperator::BuildPlan() {
  const int nb = spec_.NumActions2();
  const int points = grid_.size();
  const int cands = num_profiles();
  slots_ = exogenous_ ? 1 : nb;
  stride_ = spec_.NumActions1() * spec_.NumStates();
  const std::size_t pairs = static_cast<std::size_t>(points) * cands;
  const std::size_t block = static_cast<std::size_t>(slots_) * stride_;
  stage_.assign(pairs * nb, 0.0);
  cont_index_.assign(pairs * block, 0);
  cont_weight_.assign(pairs * block, 0.0);
  long long clamped = 0;

#pragma omp parallel for schedule(dynamic, 4) reduction(+ : clamped)
  for (int i = 0; i < points; ++i) {
    const Belief p = grid_.Point(i);
    for (int c = 0; c < cands; ++c) {
      const std::size_t pair = static_cast<std::size_t>(i) * cands + c;
      FillEntry(p, profiles_[c], &stage_[pair * nb], &cont_index_[pair * block],
                &cont_weight_[pair * block], &clamped);
    }
  }
  clamped_ = clamped;
}

double BellmanOperator::EntryValue(const double* stage, const int* index,
                                   const double* weight, const ValueField& f) const {
  const int nb = spec_.NumActions2();
  const double mu = 1.0 - lambda_;
  auto continuation = [&](int slot) {
    const int* idx = index + slot * stride_;
    const double* w = weight + slot * stride_;
    double v = 0.0;
    for (int k = 0; k < stride_; ++k) v += w[k] * f.values[idx[k]];
    return v;
  };
  double worst = std::numeric_limits<double>::infinity();
  if (slots_ == 1) {
    const double cont = mu * continuation(0);
    for (int b = 0; b < nb; ++b) worst = std::min(worst, lambda_ * stage[b] + cont);
  } else {
    for (int b = 0; b < nb; ++b) {
      worst = std::min(worst, lambda_ * stage[b] + mu * continuation(b));
    }
  }
  return worst;
}

double BellmanOperator::PlanValue(int point, int candidate, const ValueField& f) const {
  const int nb = spec_.NumActions2();
  const std::size_t pair = static_cast<std::size_t>(point) * num_profiles() + candidate;
  const std::size_t block = static_cast<std::size_t>(slots_) * stride_;
  return EntryValue(&stage_[pair * nb], &cont_index_[pair * block], &cont_weight_[pair * block], f);
}

double BellmanOperator::Objective(const Belief& p, const Matrix& x, int b,
                                  const ValueField& f) const {
  const int ns = spec_.NumStates();
  double g = 0.0;
  for (int s = 0; s < ns; ++s) g += p(s) * x.row(s).dot(spec_.payoff[s].col(b));
  const SplitOutcome split = Split(p, x);
  double cont = 0.0;
  for (int a = 0; a < spec_.NumActions1(); ++a) {
    if (!split.used[a]) continue;
    Belief q = stage_transition_[a][b] * split.posteriors[a];
    Project(&q);
    cont += split.marginal(a) * f(q);
  }
  return lambda_ * g + (1.0 - lambda_) * cont;
}

double BellmanOperator::Guarantee(const Belief& p, const Matrix& x,
                                  const ValueField& f) const {
  double worst = std::numeric_limits<double>::infinity();
  for (int b = 0; b < spec_.NumActions2(); ++b) worst = std::min(worst, Objective(p, x, b, f));
  return worst;
}

ValueField BellmanOperator::Apply(const ValueField& f) const { return Apply(f, nullptr); }

ValueField BellmanOperator::Apply(const ValueField& f, std::vector<Matrix>* argmax) const {
  if (f.grid.dim() != grid_.dim() || f.grid.resolution() != grid_.resolution()) {
    throw DPError("field grid does not match the operator grid");
  }
  const int points = grid_.size();
  const int cands = num_profiles();
  const int nb = spec_.NumActions2();
  const std::size_t block = static_cast<std::size_t>(slots_) * stride_;
  const bool extra = refined();
  ValueField out(grid_);
  if (argmax != nullptr) argmax->assign(points, Matrix());

#pragma omp parallel for schedule(static)
  for (int i = 0; i < points; ++i) {
    int best_c = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < cands; ++c) {
      const double v = PlanValue(i, c, f);
      if (v > best) {
        best = v;
        best_c = c;
      }
    }
    bool use_extra = false;
    if (extra) {
      const double v = EntryValue(&extra_stage_[i * nb], &extra_index_[i * block],
                                  &extra_weight_[i * block], f);
      if (v > best) {
        best = v;
        use_extra = true;
      }
    }
    out.values[i] = best;
    if (argmax != nullptr) (*argmax)[i] = use_extra ? extra_profiles_[i] : profiles_[best_c];
  }
  return out;
}

void BellmanOperator::AddRefinedCandidates(const ValueField& f) {
  const int points = grid_.size();
  const int ns = spec_.NumStates();
  const int na = spec_.NumActions1();
  const int nb = spec_.NumActions2();
  const std::size_t block = static_cast<std::size_t>(slots_) * stride_;
  const double step = 0.5 / config_.xgrid;
  std::vector<Matrix> start;
  Apply(f, &start);
  extra_profiles_.assign(points, Matrix());
  extra_stage_.assign(static_cast<std::size_t>(points) * nb, 0.0);
  extra_index_.assign(points * block, 0);
  extra_weight_.assign(points * block, 0.0);
  long long clamped = 0;

#pragma omp parallel for schedule(dynamic, 4) reduction(+ : clamped)
  for (int i = 0; i < points; ++i) {
    const Belief p = grid_.Point(i);
    Matrix x = start[i];
    double best = Guarantee(p, x, f);
    for (int s = 0; s < ns && na > 1; ++s) {
      if (p(s) == 0.0) continue;
      for (int a = 0; a < na; ++a) {
        for (int a2 = 0; a2 < na; ++a2) {
          if (a2 == a || x(s, a) < step - 1e-15) continue;
          Matrix trial = x;
          trial(s, a) = std::max(0.0, trial(s, a) - step);
          trial(s, a2) += step;
          const double v = Guarantee(p, trial, f);
          if (v > best) {
            best = v;
            x = trial;
          }
        }
      }
    }
    extra_profiles_[i] = x;
    FillEntry(p, x, &extra_stage_[i * nb], &extra_index_[i * block], &extra_weight_[i * block],
              &clamped);
  }
  clamped_ += clamped;
}

ValueField BellmanApply(const GameSpec& spec, const ValueField& f, const DPConfig& config) {
  return BellmanOperator(spec, config).Apply(f);
}

DPResult SolveVn(const GameSpec& spec, const DPConfig& config) {
  BellmanOperator op(spec, config);
  DPResult result;
  result.lambda = op.lambda();
  result.field = ValueField(op.grid(), 0.0);
  auto iterate = [&](int budget) {
    result.converged = false;
    for (int it = 0; it < budget; ++it) {
      ValueField next = op.Apply(result.field);
      result.cav_raise = 0.0;
      if (config.concavify) {
        ValueField hull = Cav(next);
        result.cav_raise = hull.SupDistance(next);
        next = std::move(hull);
      }
      result.residual = next.SupDistance(result.field);
      result.field = std::move(next);
      ++result.iterations;
      if (result.residual <= config.tolerance) {
        result.converged = true;
        return;
      }
    }
  };
  iterate(config.max_iterations);
  if (config.refine && result.converged) {
    op.AddRefinedCandidates(result.field);
    iterate(config.max_iterations - result.iterations);
  }
  result.clamped_posteriors = op.clamped_posteriors();
  result.concavity = CheckConcave(result.field, 1e-6);
  return result;
}

ConvergenceTable ConvergenceStudy(const GameSpec& spec, const std::vector<int>& n_list,
                                  const DPConfig& config, const ValueField* reference,
                                  const std::function<double(const Belief&)>& closed_form,
                                  double noise) {
  ConvergenceTable table;
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (n_list[k] <= n_list[k - 1]) throw DPError("n_list must be ascending");
  }
  for (int n : n_list) {
    DPConfig c = config;
    c.n = n;
    const DPResult res = SolveVn(spec, c);
    ConvergenceRow row;
    row.n = n;
    row.iterations = res.iterations;
    row.converged = res.converged;
    row.value_at_initial = res.field(spec.initial_belief);
    row.distance_reference = std::numeric_limits<double>::quiet_NaN();
    row.distance_closed_form = std::numeric_limits<double>::quiet_NaN();
    double dr = 0.0;
    double dc = 0.0;
    for (int i = 0; i < res.field.grid.size(); ++i) {
      const Belief p = res.field.grid.Point(i);
      if (reference != nullptr) dr = std::max(dr, std::abs(res.field.values[i] - (*reference)(p)));
      if (closed_form) dc = std::max(dc, std::abs(res.field.values[i] - closed_form(p)));
    }
    if (reference != nullptr) row.distance_reference = dr;
    if (closed_form) row.distance_closed_form = dc;
    table.rows.push_back(row);
  }
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    if (reference != nullptr &&
        table.rows[k].distance_reference > table.rows[k - 1].distance_reference + noise) {
      table.monotone = false;
    }
  }
  return table;
}

}  // namespace asymgame
