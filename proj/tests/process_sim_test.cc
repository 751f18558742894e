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


#include "asymgame/process_sim.h"

#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "asymgame/analysis.h"
#include "asymgame/chain.h"
#include "asymgame/instances.h"
#include "asymgame/matrix_game.h"
#include "doctest.h"

namespace asymgame {
namespace {

Belief P(double p) {
  Belief b(2);
  b << p, 1.0 - p;
  return b;
}

double MaxAbs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// --- Static splitting ---------------------------------------------------

TEST_CASE("single label keeps the prior") {
  const SplittingPlan plan = StaticSplit(P(0.3), Vector::Ones(1), {P(0.3)});
  CHECK(MaxAbs(plan.joint - P(0.3).transpose()) == 0.0);
  CHECK(MaxAbs(plan.Conditional(0) - P(0.3)) <= 1e-15);
}

TEST_CASE("full revelation at the center") {
  Vector w(2);
  w << 0.5, 0.5;
  const SplittingPlan plan = StaticSplit(P(0.5), w, {P(1.0), P(0.0)});
  CHECK(MaxAbs(plan.joint - 0.5 * Matrix::Identity(2, 2)) == 0.0);
  CHECK(plan.LabelGivenState(0)(0) == 1.0);
}

TEST_CASE("partial revelation recovers the conditionals") {
  Vector w(2);
  w << 0.5, 0.5;
  Belief a(2), b(2), p(2);
  a << 0.8, 0.2;
  b << 0.2, 0.8;
  p << 0.5, 0.5;
  // (0.8 + 0.2) / 2 = 0.5, so the barycenter of these two is (0.5, 0.5).
  const SplittingPlan center = StaticSplit(p, w, {a, b});
  CHECK(MaxAbs(center.Conditional(0) - a) <= 1e-12);
  CHECK(MaxAbs(center.Conditional(1) - b) <= 1e-12);
  // A prior of (0.4, 0.6) needs weights (1/3, 2/3) on the same posteriors.
  Vector skew(2);
  skew << 1.0 / 3, 2.0 / 3;
  p << 0.4, 0.6;
  const SplittingPlan plan = StaticSplit(p, skew, {a, b});
  CHECK(MaxAbs(plan.StateMarginal() - p) <= 1e-12);
  CHECK(MaxAbs(plan.LabelMarginal() - skew) <= 1e-12);
  CHECK(MaxAbs(plan.Conditional(0) - a) <= 1e-12);
  CHECK(MaxAbs(plan.Conditional(1) - b) <= 1e-12);
  // The announced (0.5, 0.5) weights do not average to (0.4, 0.6).
  CHECK_THROWS_AS(StaticSplit(p, w, {a, b}), ProcessError);
}

TEST_CASE("random static splittings satisfy the marginal identities") {
  std::mt19937_64 rng(1);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int labels = 2 + trial % 3;
    std::vector<Belief> posts;
    Vector w(labels);
    Belief p = Belief::Zero(3);
    for (int l = 0; l < labels; ++l) {
      Belief q(3);
      for (int s = 0; s < 3; ++s) q(s) = gamma(rng);
      posts.push_back(q / q.sum());
      w(l) = gamma(rng);
    }
    w /= w.sum();
    for (int l = 0; l < labels; ++l) p += w(l) * posts[l];
    const SplittingPlan plan = StaticSplit(p, w, posts);
    CHECK(MaxAbs(plan.StateMarginal() - p) <= 1e-12);
    CHECK(MaxAbs(plan.LabelMarginal() - w) <= 1e-12);
    for (int l = 0; l < labels; ++l) CHECK(MaxAbs(plan.Conditional(l) - posts[l]) <= 1e-12);
  }
}

// --- Dynamic splitting ----------------------------------------------------

// Exhaustive law of (belief path, state path) computed directly from the
// kernels, independently of VerifyDynamicSplit.
struct Enumeration {
  std::map<int, double> path_mass;       // node -> P(q^m = path)
  std::map<int, Vector> state_given;     // node -> law of omega_m given q^m
};

Enumeration Enumerate(const DynamicSplitting& split) {
  const BeliefTree& tree = split.tree;
  const int dim = static_cast<int>(split.pi.rows());
  Enumeration out;
  std::map<int, Vector> joint;
  std::function<void(int, int, double)> walk = [&](int node, int state, double prob) {
    if (!joint.count(node)) joint[node] = Vector::Zero(dim);
    joint[node](state) += prob;
    const auto& children = tree.nodes[node].children;
    for (std::size_t c = 0; c < children.size(); ++c) {
      for (int t = 0; t < dim; ++t) {
        const double w = split.pi(state, t) * split.mu[node](c, t);
        if (w > 0.0) walk(children[c], t, prob * w);
      }
    }
  };
  for (int s = 0; s < dim; ++s) {
    if (tree.nodes[0].belief(s) > 0.0) walk(0, s, tree.nodes[0].belief(s));
  }
  for (const auto& [node, v] : joint) {
    out.path_mass[node] = v.sum();
    out.state_given[node] = v / v.sum();
  }
  return out;
}

void CheckExact(const DynamicSplitting& split) {
  const SplitVerification v = VerifyDynamicSplit(split);
  CHECK(v.c1_residual <= 1e-12);
  CHECK(v.c2_residual <= 1e-12);
  CHECK(v.mu_residual <= 1e-12);
  const Enumeration e = Enumerate(split);
  for (const auto& [node, mass] : e.path_mass) {
    CHECK(std::abs(mass - split.tree.PathProbability(node)) <= 1e-12);
    CHECK(MaxAbs(e.state_given.at(node) - split.tree.nodes[node].belief) <= 1e-12);
  }
}

// Random martingale tree: every child pair is t +- eps (b - t) around the
// one-step prediction t = Pi^T q.
BeliefTree RandomTree(const Belief& root, const Matrix& pi, int depth, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.1, 0.9);
  BeliefTree tree(root);
  std::vector<int> frontier = {0};
  const int dim = static_cast<int>(root.size());
  for (int d = 0; d < depth; ++d) {
    std::vector<int> next;
    for (int node : frontier) {
      const Belief t = pi.transpose() * tree.nodes[node].belief;
      const int pairs = 1 + static_cast<int>(rng() % 2);
      Vector w(pairs);
      for (int k = 0; k < pairs; ++k) w(k) = gamma(rng);
      w /= w.sum();
      for (int k = 0; k < pairs; ++k) {
        Belief b(dim);
        for (int s = 0; s < dim; ++s) b(s) = gamma(rng);
        b /= b.sum();
        const Belief dir = b - t;
        double eps = 1.0;
        for (int s = 0; s < dim; ++s) {
          if (std::abs(dir(s)) > 0.0) eps = std::min(eps, t(s) / std::abs(dir(s)));
          if (std::abs(dir(s)) > 0.0) eps = std::min(eps, (1.0 - t(s)) / std::abs(dir(s)));
        }
        eps *= unit(rng);
        next.push_back(tree.AddChild(node, 0.5 * w(k), t + eps * dir));
        next.push_back(tree.AddChild(node, 0.5 * w(k), t - eps * dir));
      }
    }
    frontier = next;
  }
  return tree;
}

TEST_CASE("deterministic belief sequence gives degenerate kernels") {
  const Matrix pi = Transition(TwoStateGenerator(1, 1), 0.25);
  BeliefTree tree(P(0.9));
  int node = 0;
  Belief q = P(0.9);
  for (int m = 0; m < 3; ++m) {
    q = pi.transpose() * q;
    node = tree.AddChild(node, 1.0, q);
  }
  const DynamicSplitting split = DynamicSplit(tree, pi);
  for (int v = 0; v < 3; ++v) CHECK(MaxAbs(split.mu[v] - Matrix::Ones(1, 2)) <= 1e-12);
  CheckExact(split);
}

TEST_CASE("depth-one full revelation with a frozen chain") {
  BeliefTree tree(P(0.5));
  tree.AddChild(0, 0.5, P(1.0));
  tree.AddChild(0, 0.5, P(0.0));
  const DynamicSplitting split = DynamicSplit(tree, Matrix::Identity(2, 2));
  // mu_0(., s; .) puts all mass on delta_s.
  CHECK(split.mu[0](0, 0) == 1.0);
  CHECK(split.mu[0](1, 1) == 1.0);
  CHECK(split.mu[0](0, 1) == 0.0);
  CheckExact(split);
}

TEST_CASE("depth-two partial then no revelation") {
  const Matrix pi = Transition(TwoStateGenerator(1, 1), 0.25);
  BeliefTree tree(P(0.5));
  const Belief t = pi.transpose() * P(0.5);
  const int a = tree.AddChild(0, 0.5, t + Belief(P(0.8) - P(0.5)));
  const int b = tree.AddChild(0, 0.5, t - Belief(P(0.8) - P(0.5)));
  tree.AddChild(a, 1.0, pi.transpose() * tree.nodes[a].belief);
  tree.AddChild(b, 1.0, pi.transpose() * tree.nodes[b].belief);
  CheckExact(DynamicSplit(tree, pi));
}

TEST_CASE("random depth-three trees satisfy C1 and C2 exactly") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 2 + trial % 2;
    Matrix gen = Matrix::Zero(dim, dim);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        if (i != j) gen(i, j) = u(rng);
      }
      gen(i, i) = -gen.row(i).sum();
    }
    const Matrix pi = Transition(gen, 0.3);
    Belief root = Belief::Constant(dim, 1.0 / dim);
    const DynamicSplitting split = DynamicSplit(RandomTree(root, pi, 3, rng), pi);
    CHECK(split.tree.Depth() == 3);
    CheckExact(split);
  }
}

TEST_CASE("zero-probability branches are pruned") {
  BeliefTree tree(P(1.0));
  tree.AddChild(0, 1.0, P(1.0));
  const DynamicSplitting split = DynamicSplit(tree, Matrix::Identity(2, 2));
  CHECK(split.pruned == 1);
  CheckExact(split);
}

TEST_CASE("martingale violations name the node") {
  BeliefTree tree(P(0.5));
  const int a = tree.AddChild(0, 0.5, P(1.0));
  tree.AddChild(0, 0.5, P(0.0));
  tree.AddChild(a, 1.0, P(0.7));
  try {
    DynamicSplit(tree, Matrix::Identity(2, 2));
    FAIL("expected a martingale violation");
  } catch (const ProcessError& e) {
    CHECK(std::string(e.what()).find("root/0") != std::string::npos);
  }
}

// --- Belief processes ---------------------------------------------------

TEST_CASE("two-point process rates") {
  const BeliefProcess a = TwoStateOptimalProcess(1, 1, 1.0 / 3, 2.0 / 3, 0.5);
  CHECK(a.two_state.rate_lo_hi == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.two_state.rate_hi_lo == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.two_state.theta == 0.0);
  CHECK(a.two_state.weight_lo == doctest::Approx(0.5));
  const BeliefProcess b = TwoStateOptimalProcess(2.0, 0.5, 0.0, 1.0, 0.3);
  CHECK(b.two_state.rate_lo_hi == doctest::Approx(0.5));
  CHECK(b.two_state.rate_hi_lo == doctest::Approx(2.0));
  CHECK(b.two_state.weight_lo == doctest::Approx(0.7));
  // Entry time: p*_theta = p_lo.
  const BeliefProcess c = TwoStateOptimalProcess(1, 1, 0.4, 0.6, 0.1);
  const Belief entry = BeliefFlow(c.rate, P(0.1), c.two_state.theta);
  CHECK(entry(0) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(c.two_state.weight_lo == doctest::Approx(1.0));
  CHECK_THROWS_AS(TwoStateOptimalProcess(1, 1, 0.5, 0.7, 0.5), ProcessError);
  CHECK_THROWS_AS(TwoStateOptimalProcess(1, 1, 0.6, 0.4, 0.5), ProcessError);
}

TEST_CASE("sampled paths are cadlag with values in the simplex") {
  const BeliefProcess proc = TwoStateOptimalProcess(1, 2, 0.5, 0.8, 0.9);
  Rng rng(3);
  for (int n = 0; n < 50; ++n) {
    const BeliefPath path = SampleBeliefPath(proc, 20.0, rng);
    CHECK(path.flow_until == doctest::Approx(proc.two_state.theta));
    for (double t = 0.0; t < 20.0; t += 0.37) {
      const Belief b = BeliefAt(proc, path, t);
      CHECK(b.minCoeff() >= 0.0);
      CHECK(std::abs(b.sum() - 1.0) <= 1e-12);
    }
    for (std::size_t i = 1; i < path.times.size(); ++i) CHECK(path.times[i] > path.times[i - 1]);
  }
}

TEST_CASE("evaluation: deterministic flow equals the non-revealing bound") {
  const UModel model = BuildUModel(CounterexampleSpec(1000));
  const auto u = [&](const Belief& b) { return model.u(b); };
  const BeliefProcess flow = DeterministicFlowProcess(model.rate, P(0.1));
  const MonteCarloEstimate e = EvaluateP1(flow, u, 1.0);
  CHECK(e.half_width == 0.0);
  CHECK(std::abs(e.mean - LowerBoundNonRevealing(model, P(0.1))) <= 1e-8);
}

TEST_CASE("evaluation: full revelation equals the fully revealing bound") {
  AbstractU spec = CounterexampleSpec(100);
  spec.rate = TwoStateGenerator(1.0, 0.5);
  for (int i = 0; i <= 100; ++i) spec.values[i] = 0.3 + 0.7 * (i / 100.0) * (i / 100.0);
  const UModel model = BuildUModel(spec);
  const auto u = [&](const Belief& b) { return model.u(b); };
  EvaluateOptions options;
  options.paths = 100000;
  const MonteCarloEstimate e = EvaluateP1(FullyRevealingProcess(model.rate, P(0.2)), u, 1.0, options);
  CHECK(std::abs(e.mean - LowerBoundFullyRevealing(model, P(0.2))) <= e.half_width);
  CHECK(e.half_width > 0.0);
}

TEST_CASE("evaluation is deterministic under the seed") {
  const BeliefProcess proc = FullyRevealingProcess(TwoStateGenerator(1, 1), P(0.3));
  const auto u = [](const Belief& b) { return b(0) * b(0); };
  EvaluateOptions options;
  options.paths = 2000;
  const MonteCarloEstimate a = EvaluateP1(proc, u, 1.0, options);
  const MonteCarloEstimate b = EvaluateP1(proc, u, 1.0, options);
  CHECK(a.mean == b.mean);
  options.seed = 43;
  CHECK(EvaluateP1(proc, u, 1.0, options).mean != a.mean);
}

TEST_CASE("no recipe beats the upper bound") {
  for (const AbstractU& spec : {CounterexampleSpec(1000), DipSpec(1000)}) {
    const UModel model = BuildUModel(spec);
    const auto u = [&](const Belief& b) { return model.u(b); };
    EvaluateOptions options;
    options.paths = 20000;
    for (double p : {0.1, 0.5, 0.85}) {
      const double upper = UpperBound(model, P(p));
      std::vector<BeliefProcess> recipes = {
          DeterministicFlowProcess(model.rate, P(p)), FullyRevealingProcess(model.rate, P(p)),
          TwoStateOptimalProcess(1, 1, 1.0 / 3, 2.0 / 3, p),
          TwoStateOptimalProcess(1, 1, 0.2, 0.9, p)};
      for (const auto& proc : recipes) {
        const MonteCarloEstimate e = EvaluateP1(proc, u, 1.0, options);
        CHECK(e.mean <= upper + std::max(e.half_width, 2e-3));
      }
    }
  }
}

TEST_CASE("martingale consistency") {
  const BeliefProcess flow = DeterministicFlowProcess(TwoStateGenerator(1, 2), P(0.9));
  const MartingaleReport exact = MartingaleConsistencyCheck(flow, {0.5, 1, 2}, {0.1, 0.5}, 100, 1);
  CHECK(exact.pass);
  for (const auto& cell : exact.cells) CHECK(std::abs(cell.mean) <= 1e-12);

  const BeliefProcess good = TwoStateOptimalProcess(1, 1, 1.0 / 3, 2.0 / 3, 0.1);
  CHECK(MartingaleConsistencyCheck(good, {0.5, 1, 2}, {0.1, 0.5}, 100000, 7).pass);

  TwoStateParams t = good.two_state;
  Matrix halved(2, 2);
  halved << -t.rate_lo_hi / 2, t.rate_lo_hi / 2, t.rate_hi_lo / 2, -t.rate_hi_lo / 2;
  Vector w(2);
  w << 0.5, 0.5;
  const BeliefProcess bad = CustomProcess(good.rate, {P(1.0 / 3), P(2.0 / 3)}, halved, w);
  CHECK(!MartingaleConsistencyCheck(bad, {0.5, 1, 2}, {0.1, 0.5}, 100000, 7).pass);

  const BeliefProcess reveal = FullyRevealingProcess(TwoStateGenerator(1, 2), P(0.4));
  CHECK(MartingaleConsistencyCheck(reveal, {0.5, 1, 2}, {0.1, 0.5}, 100000, 8).pass);
}

TEST_CASE("optimality condition checks") {
  const AbstractU dip = DipSpec(1000);
  const ObstacleField v = SolveObstacle(Hamiltonian::FromAbstract(dip), BeliefGrid(2, 1000), {});
  REQUIRE(v.converged);
  const OptimalityReport good =
      VerifyOptimalityConditions(TwoStateOptimalProcess(1, 1, 1.0 / 3, 2.0 / 3, 0.1), v, 1e-3);
  CHECK(good.Passes());
  CHECK(good.jumps_checked >= 2);
  CHECK(good.no_continuous_martingale);

  const GameSpec concave = SwitchingExample();
  const ObstacleField w = SolveObstacle(Hamiltonian::FromSpec(concave), BeliefGrid(2, 1000), {});
  const Matrix& rate = concave.rate.exogenous;
  CHECK(VerifyOptimalityConditions(DeterministicFlowProcess(rate, P(0.2)), w, 1e-3).Passes());
  const OptimalityReport reveal =
      VerifyOptimalityConditions(FullyRevealingProcess(rate, P(0.2)), w, 1e-3);
  CHECK(!reveal.chords_ok);
  CHECK(!reveal.Passes());
  // Revealing is strictly worse than the optimum.
  const UModel model = BuildUModel(concave, 200);
  EvaluateOptions options;
  options.paths = 20000;
  const MonteCarloEstimate e = EvaluateP1(FullyRevealingProcess(rate, P(0.2)),
                                          [&](const Belief& b) { return model.u(b); }, 1.0, options);
  CHECK(e.mean + e.half_width < w.field(P(0.2)) - 0.1);
}

// --- Game play ----------------------------------------------------------

TEST_CASE("one state: the payoff is the value of the stage game") {
  GameSpec g;
  g.states = {"only"};
  g.actions1 = {"a", "b"};
  g.actions2 = {"c", "d"};
  Matrix m(2, 2);
  m << 3.0, -1.0, -2.0, 1.0;
  g.payoff = {m};
  g.rate.exogenous = Matrix::Zero(1, 1);
  g.initial_belief = Belief::Ones(1);
  PlayConfig config;
  config.paths = 20000;
  const PlayResult res = PlayGame(g, config);
  const double val = SolveMatrixGame(m).value;
  const double lambda = -std::expm1(-1.0 / config.n);
  const double expected = val * (1.0 - std::pow(1.0 - lambda, res.rounds));
  CHECK(std::abs(res.payoff.mean - expected) <= 1.5 * res.payoff.half_width);
  CHECK(std::abs(res.payoff.mean - val) <= 1.5 * res.payoff.half_width + res.tail_bound);
  CHECK(std::pow(1.0 - lambda, res.rounds) <= 1e-4);
}

TEST_CASE("switching example: strategies against the bounds") {
  const GameSpec g = SwitchingExample();
  const UModel model = BuildUModel(g, 200);
  const Belief p = g.initial_belief;
  PlayConfig config;
  config.strategy = Strategy1::kNonRevealing;
  const PlayResult nr = PlayGame(g, config);
  CHECK(std::abs(nr.payoff.mean - LowerBoundNonRevealing(model, p)) <=
        nr.payoff.half_width + 2e-2);
  config.strategy = Strategy1::kSplittingOptimal;
  config.p_lo = 0.4;
  config.p_hi = 0.6;
  const PlayResult split = PlayGame(g, config);
  CHECK(split.payoff.mean >= nr.payoff.mean - 2e-2);
  CHECK(split.payoff.mean <= UpperBound(model, p) + 2e-2);
  CHECK(split.zero_probability == 0);
  // Deterministic under the seed.
  CHECK(PlayGame(g, config).payoff.mean == split.payoff.mean);
}

TEST_CASE("play rejects action-dependent transitions") {
  GameSpec g = SwitchingExample();
  g.rate.kind = RateKind::kEndogenous;
  g.rate.endogenous = {{Matrix::Zero(2, 2), g.rate.exogenous}, {g.rate.exogenous, g.rate.exogenous}};
  CHECK_THROWS_AS(PlayGame(g, {}), ProcessError);
}

}  // namespace
}  // namespace asymgame
