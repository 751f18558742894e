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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "asymgame/analysis.h"
#include "asymgame/matrix_game.h"

namespace asymgame {
namespace {

constexpr double kSplitTolerance = 1e-10;
constexpr double kTiny = 1e-300;

int SampleIndex(const Vector& weights, Rng& rng) {
  const double u = Uniform01(rng) * weights.sum();
  double acc = 0.0;
  int last = -1;
  for (int i = 0; i < weights.size(); ++i) {
    if (weights(i) <= 0.0) continue;
    acc += weights(i);
    last = i;
    if (u < acc) return i;
  }
  if (last < 0) throw ProcessError("cannot sample from a zero weight vector");
  return last;
}

Belief Vertex(int dim, int s) {
  Belief b = Belief::Zero(dim);
  b(s) = 1.0;
  return b;
}

Belief TwoPoint(double p) {
  Belief b(2);
  b << p, 1.0 - p;
  return b;
}

void CheckSimplex(const Belief& p, int dim, const std::string& what) {
  if (p.size() != dim) {
    throw ProcessError(what + " has dimension " + std::to_string(p.size()) +
                       ", expected " + std::to_string(dim));
  }
  if (p.minCoeff() < -kSplitTolerance || std::abs(p.sum() - 1.0) > kSplitTolerance) {
    throw ProcessError(what + " is not a probability vector");
  }
}

std::string Num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Finite label set visited after the flow phase, if any.
std::vector<Belief> Support(const BeliefProcess& process) {
  switch (process.recipe) {
    case Recipe::kDeterministicFlow:
      return {};
    case Recipe::kFullyRevealing: {
      std::vector<Belief> out;
      for (int s = 0; s < process.rate.rows(); ++s) out.push_back(Vertex(process.rate.rows(), s));
      return out;
    }
    case Recipe::kTwoStateOptimal:
      return {TwoPoint(process.two_state.p_lo), TwoPoint(process.two_state.p_hi)};
    case Recipe::kCustom:
      return process.support;
  }
  return {};
}

Matrix TwoPointGenerator(const TwoStateParams& t) {
  Matrix g(2, 2);
  g << -t.rate_lo_hi, t.rate_lo_hi, t.rate_hi_lo, -t.rate_hi_lo;
  return g;
}

double FlowEnd(const BeliefProcess& process) {
  switch (process.recipe) {
    case Recipe::kDeterministicFlow:
      return std::numeric_limits<double>::infinity();
    case Recipe::kTwoStateOptimal:
      return process.two_state.theta;
    default:
      return 0.0;
  }
}

}  // namespace

// --- Static splitting ---------------------------------------------------

SplittingPlan StaticSplit(const Belief& p, const Vector& weights,
                          const std::vector<Belief>& posteriors) {
  const int dim = static_cast<int>(p.size());
  if (weights.size() != static_cast<int>(posteriors.size()) || posteriors.empty()) {
    throw ProcessError("splitting needs one weight per posterior");
  }
  if (weights.minCoeff() < 0.0 || std::abs(weights.sum() - 1.0) > kSplitTolerance) {
    throw ProcessError("splitting weights must be a probability vector");
  }
  SplittingPlan plan;
  plan.weights = weights;
  plan.posteriors = posteriors;
  plan.joint = Matrix::Zero(weights.size(), dim);
  Belief bary = Belief::Zero(dim);
  for (int l = 0; l < weights.size(); ++l) {
    CheckSimplex(posteriors[l], dim, "posterior " + std::to_string(l));
    bary += weights(l) * posteriors[l];
    plan.joint.row(l) = weights(l) * posteriors[l].transpose();
  }
  const double err = (bary - p).cwiseAbs().maxCoeff();
  if (err > kSplitTolerance) {
    throw ProcessError("posteriors do not average to the prior (error " + Num(err) + ")");
  }
  return plan;
}

// --- Dynamic splitting ----------------------------------------------------

BeliefTree::BeliefTree(const Belief& root) {
  Node n;
  n.belief = root;
  nodes.push_back(std::move(n));
}

int BeliefTree::AddChild(int parent, double prob, const Belief& belief) {
  if (parent < 0 || parent >= static_cast<int>(nodes.size())) {
    throw ProcessError("unknown parent node " + std::to_string(parent));
  }
  Node n;
  n.belief = belief;
  n.prob = prob;
  n.parent = parent;
  n.depth = nodes[parent].depth + 1;
  nodes.push_back(std::move(n));
  const int id = static_cast<int>(nodes.size()) - 1;
  nodes[parent].children.push_back(id);
  return id;
}

int BeliefTree::Depth() const {
  int d = 0;
  for (const Node& n : nodes) d = std::max(d, n.depth);
  return d;
}

double BeliefTree::PathProbability(int node) const {
  double p = 1.0;
  for (int v = node; v > 0; v = nodes[v].parent) p *= nodes[v].prob;
  return p;
}

std::string BeliefTree::Label(int node) const {
  std::vector<int> pos;
  for (int v = node; v > 0; v = nodes[v].parent) {
    const auto& sib = nodes[nodes[v].parent].children;
    pos.push_back(static_cast<int>(std::find(sib.begin(), sib.end(), v) - sib.begin()));
  }
  std::string out = "root";
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) out += "/" + std::to_string(*it);
  return out;
}

double DynamicSplitting::Nu(int node, int s, int child_pos, int s_next) const {
  return pi(s, s_next) * mu[node](child_pos, s_next);
}

DynamicSplitting DynamicSplit(const BeliefTree& tree, const Matrix& pi) {
  const int dim = static_cast<int>(pi.rows());
  if (pi.cols() != dim) throw ProcessError("transition matrix must be square");
  if (pi.minCoeff() < 0.0 ||
      (pi.rowwise().sum() - Vector::Ones(dim)).cwiseAbs().maxCoeff() > kSplitTolerance) {
    throw ProcessError("transition matrix must be row-stochastic");
  }
  DynamicSplitting out{pi, tree, {}, 0};
  out.mu.resize(tree.nodes.size());
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    const auto& node = tree.nodes[v];
    CheckSimplex(node.belief, dim, "belief at " + tree.Label(static_cast<int>(v)));
    if (node.children.empty()) continue;
    const Belief target = pi.transpose() * node.belief;
    Belief mean = Belief::Zero(dim);
    double mass = 0.0;
    for (int c : node.children) {
      if (tree.nodes[c].prob < 0.0) {
        throw ProcessError("negative branch probability below " + tree.Label(static_cast<int>(v)));
      }
      mass += tree.nodes[c].prob;
      mean += tree.nodes[c].prob * tree.nodes[c].belief;
    }
    if (std::abs(mass - 1.0) > kSplitTolerance) {
      throw ProcessError("branch probabilities below " + tree.Label(static_cast<int>(v)) +
                         " sum to " + Num(mass));
    }
    const double err = (mean - target).cwiseAbs().maxCoeff();
    if (err > kSplitTolerance) {
      throw ProcessError("martingale condition fails at node " + tree.Label(static_cast<int>(v)) +
                         " (error " + Num(err) + ")");
    }
    Matrix mu(node.children.size(), dim);
    for (int s = 0; s < dim; ++s) {
      if (target(s) <= kTiny) {
        // Never reached: any kernel will do.
        for (std::size_t c = 0; c < node.children.size(); ++c) {
          mu(c, s) = tree.nodes[node.children[c]].prob;
        }
        ++out.pruned;
        continue;
      }
      for (std::size_t c = 0; c < node.children.size(); ++c) {
        const auto& child = tree.nodes[node.children[c]];
        mu(c, s) = child.prob * child.belief(s) / target(s);
      }
    }
    out.mu[v] = std::move(mu);
  }
  return out;
}

SplitVerification VerifyDynamicSplit(const DynamicSplitting& split) {
  const BeliefTree& tree = split.tree;
  const int dim = static_cast<int>(split.pi.rows());
  // joint[v](s) = P(q^m = path to v, omega_m = s). Children always follow
  // their parent in the node list.
  std::vector<Vector> joint(tree.nodes.size());
  joint[0] = tree.nodes[0].belief;
  SplitVerification out;
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    const auto& node = tree.nodes[v];
    if (v > 0) {
      const int parent = node.parent;
      const auto& sib = tree.nodes[parent].children;
      const int pos = static_cast<int>(std::find(sib.begin(), sib.end(), static_cast<int>(v)) -
                                       sib.begin());
      joint[v] = Vector::Zero(dim);
      for (int s = 0; s < dim; ++s) {
        for (int t = 0; t < dim; ++t) joint[v](t) += joint[parent](s) * split.Nu(parent, s, pos, t);
      }
    }
    const double mass = joint[v].sum();
    out.c1_residual = std::max(out.c1_residual,
                               std::abs(mass - tree.PathProbability(static_cast<int>(v))));
    if (mass > kTiny) {
      out.c2_residual = std::max(out.c2_residual,
                                 (joint[v] / mass - node.belief).cwiseAbs().maxCoeff());
    }
    if (!node.children.empty()) {
      const Belief target = split.pi.transpose() * node.belief;
      for (int s = 0; s < dim; ++s) {
        if (target(s) <= kTiny) continue;
        out.mu_residual = std::max(out.mu_residual, std::abs(split.mu[v].col(s).sum() - 1.0));
      }
    }
  }
  return out;
}

// --- Belief processes ---------------------------------------------------

BeliefProcess DeterministicFlowProcess(const Matrix& rate, const Belief& p) {
  CheckSimplex(p, static_cast<int>(rate.rows()), "initial belief");
  BeliefProcess out;
  out.recipe = Recipe::kDeterministicFlow;
  out.rate = rate;
  out.p = p;
  return out;
}

BeliefProcess FullyRevealingProcess(const Matrix& rate, const Belief& p) {
  BeliefProcess out = DeterministicFlowProcess(rate, p);
  out.recipe = Recipe::kFullyRevealing;
  return out;
}

BeliefProcess TwoStateOptimalProcess(double rho12, double rho21, double p_lo, double p_hi,
                                     double p) {
  if (rho12 < 0.0 || rho21 < 0.0 || rho12 + rho21 <= 0.0) {
    throw ProcessError("two-state rates must be nonnegative and not both zero");
  }
  if (!(0.0 <= p_lo && p_lo < p_hi && p_hi <= 1.0) || p < 0.0 || p > 1.0) {
    throw ProcessError("need 0 <= p_lo < p_hi <= 1 and p in [0, 1]");
  }
  const double kappa = rho12 + rho21;
  const double p_inf = rho21 / kappa;
  if (!(p_lo < p_inf && p_inf < p_hi)) {
    throw ProcessError("the interval [" + Num(p_lo) + ", " + Num(p_hi) +
                       "] must contain the invariant belief " + Num(p_inf) + " in its interior");
  }
  TwoStateParams t;
  t.rho12 = rho12;
  t.rho21 = rho21;
  t.p_lo = p_lo;
  t.p_hi = p_hi;
  t.p_star_inf = p_inf;
  const double width = p_hi - p_lo;
  t.rate_lo_hi = ((1.0 - p_lo) * rho21 - p_lo * rho12) / width;
  t.rate_hi_lo = (p_hi * rho12 - (1.0 - p_hi) * rho21) / width;
  double entry = p;
  if (p < p_lo) {
    t.theta = std::log((p_inf - p) / (p_inf - p_lo)) / kappa;
    entry = p_lo;
  } else if (p > p_hi) {
    t.theta = std::log((p - p_inf) / (p_hi - p_inf)) / kappa;
    entry = p_hi;
  }
  t.weight_lo = (p_hi - entry) / width;

  BeliefProcess out;
  out.recipe = Recipe::kTwoStateOptimal;
  out.rate = Matrix(2, 2);
  out.rate << -rho12, rho12, rho21, -rho21;
  out.p = TwoPoint(p);
  out.two_state = t;
  return out;
}

BeliefProcess CustomProcess(const Matrix& rate, const std::vector<Belief>& support,
                            const Matrix& jump_rates, const Vector& initial_weights) {
  const int dim = static_cast<int>(rate.rows());
  const int k = static_cast<int>(support.size());
  if (k == 0 || jump_rates.rows() != k || jump_rates.cols() != k || initial_weights.size() != k) {
    throw ProcessError("custom process needs a k-point support, a k x k generator and k weights");
  }
  std::vector<Violation> v;
  ValidateGenerator(jump_rates, "jump_rates", &v);
  if (!v.empty()) throw ProcessError("jump rates: " + FormatViolations(v));
  Belief p = Belief::Zero(dim);
  for (int i = 0; i < k; ++i) {
    CheckSimplex(support[i], dim, "support point " + std::to_string(i));
    p += initial_weights(i) * support[i];
  }
  if (initial_weights.minCoeff() < 0.0 ||
      std::abs(initial_weights.sum() - 1.0) > kSplitTolerance) {
    throw ProcessError("initial weights must be a probability vector");
  }
  BeliefProcess out;
  out.recipe = Recipe::kCustom;
  out.rate = rate;
  out.p = p;
  out.support = support;
  out.jump_rates = jump_rates;
  out.initial_weights = initial_weights;
  return out;
}

BeliefPath SampleBeliefPath(const BeliefProcess& process, double horizon, Rng& rng) {
  BeliefPath path;
  path.flow_start = process.p;
  path.flow_until = std::min(FlowEnd(process), horizon);
  if (process.recipe == Recipe::kDeterministicFlow || path.flow_until >= horizon) {
    path.flow_until = horizon;
    return path;
  }
  const std::vector<Belief> support = Support(process);
  Matrix generator;
  int start = 0;
  switch (process.recipe) {
    case Recipe::kFullyRevealing:
      generator = process.rate;
      start = SampleIndex(process.p, rng);
      break;
    case Recipe::kTwoStateOptimal: {
      generator = TwoPointGenerator(process.two_state);
      Vector w(2);
      w << process.two_state.weight_lo, 1.0 - process.two_state.weight_lo;
      start = SampleIndex(w, rng);
      break;
    }
    default:
      generator = process.jump_rates;
      start = SampleIndex(process.initial_weights, rng);
      break;
  }
  const ChainPath jumps = SamplePath(generator, start, horizon - path.flow_until, rng);
  for (std::size_t i = 0; i < jumps.times.size(); ++i) {
    path.times.push_back(path.flow_until + jumps.times[i]);
    path.labels.push_back(jumps.states[i]);
    path.values.push_back(support[jumps.states[i]]);
  }
  return path;
}

Belief BeliefAt(const BeliefProcess& process, const BeliefPath& path, double t) {
  if (path.times.empty() || t < path.times.front()) {
    return FlowEvaluator(process.rate)(process.p, std::min(t, path.flow_until));
  }
  const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
  return path.values[static_cast<std::size_t>(it - path.times.begin()) - 1];
}

MonteCarloEstimate EvaluateP1(const BeliefProcess& process, const UEvaluator& u, double r,
                              const EvaluateOptions& options) {
  if (!(r > 0.0)) throw ProcessError("discount rate must be positive");
  if (options.paths <= 0) throw ProcessError("need at least one path");
  if (!(options.tail > 0.0 && options.tail < 1.0)) throw ProcessError("tail must lie in (0, 1)");
  const double horizon = -std::log(options.tail) / r;
  const double flow_end = FlowEnd(process);

  // Common deterministic prefix, integrated in tau = 1 - e^{-rt}.
  double prefix = 0.0;
  if (flow_end > 0.0) {
    const double tau_end = std::isinf(flow_end) ? 1.0 : -std::expm1(-r * flow_end);
    const FlowEvaluator flow(process.rate);
    prefix = tau_end * IntegrateUnit([&](double x) {
               const double t = -std::log1p(-tau_end * x) / r;
               return u(flow(process.p, t));
             });
  }
  MonteCarloEstimate est;
  est.paths = options.paths;
  if (std::isinf(flow_end)) {
    est.mean = prefix;
    return est;
  }
  const std::vector<Belief> support = Support(process);
  std::vector<double> u_support(support.size());
  double u_max = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    u_support[i] = u(support[i]);
    u_max = std::max(u_max, std::abs(u_support[i]));
  }
  std::vector<double> samples(options.paths);
#pragma omp parallel for schedule(static)
  for (int n = 0; n < options.paths; ++n) {
    Rng rng(PathSeed(options.seed, static_cast<std::uint64_t>(n)));
    const BeliefPath path = SampleBeliefPath(process, horizon, rng);
    double total = prefix;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
      const double lo = std::exp(-r * path.times[i]);
      const double hi = i + 1 < path.times.size() ? std::exp(-r * path.times[i + 1]) : 0.0;
      total += u_support[path.labels[i]] * (lo - hi);
    }
    samples[n] = total;
  }
  double sum = 0.0;
  for (double x : samples) sum += x;
  est.mean = sum / options.paths;
  double ss = 0.0;
  for (double x : samples) ss += (x - est.mean) * (x - est.mean);
  if (options.paths > 1) {
    est.half_width = 1.96 * std::sqrt(ss / (options.paths - 1) / options.paths);
  }
  // The last segment is extended past the horizon.
  est.truncation = 2.0 * options.tail * u_max;
  return est;
}

MartingaleReport MartingaleConsistencyCheck(const BeliefProcess& process,
                                            const std::vector<double>& t_list,
                                            const std::vector<double>& h_list, int paths,
                                            std::uint64_t seed) {
  if (t_list.empty() || h_list.empty() || paths <= 0) {
    throw ProcessError("martingale check needs times, lags and paths");
  }
  double horizon = 0.0;
  for (double t : t_list) {
    for (double h : h_list) {
      if (t < 0.0 || h <= 0.0) throw ProcessError("times must be >= 0 and lags > 0");
      horizon = std::max(horizon, t + h);
    }
  }
  std::vector<BeliefPath> sampled(paths);
#pragma omp parallel for schedule(static)
  for (int n = 0; n < paths; ++n) {
    Rng rng(PathSeed(seed, static_cast<std::uint64_t>(n)));
    sampled[n] = SampleBeliefPath(process, horizon, rng);
  }
  constexpr int kMinCount = 30;
  constexpr int kUniformBins = 20;
  MartingaleReport report;
  for (double h : h_list) {
    const Matrix ph = Transition(process.rate, h);
    for (double t : t_list) {
      std::vector<double> x(paths), d(paths);
      for (int n = 0; n < paths; ++n) {
        const Belief now = BeliefAt(process, sampled[n], t);
        const Belief later = BeliefAt(process, sampled[n], t + h);
        x[n] = now(0);
        d[n] = later(0) - (ph.transpose() * now)(0);
      }
      // Exact-value bins for finitely supported p_t, uniform bins otherwise.
      std::map<long long, std::vector<int>> bins;
      std::set<long long> distinct;
      for (double v : x) distinct.insert(std::llround(v * 1e9));
      const double lo = *std::min_element(x.begin(), x.end());
      const double hi = *std::max_element(x.begin(), x.end());
      const bool exact = distinct.size() <= 32;
      for (int n = 0; n < paths; ++n) {
        long long key = std::llround(x[n] * 1e9);
        if (!exact) {
          key = std::min<long long>(kUniformBins - 1,
                                    static_cast<long long>((x[n] - lo) / (hi - lo) * kUniformBins));
        }
        bins[key].push_back(n);
      }
      for (const auto& [key, members] : bins) {
        MartingaleCell cell;
        cell.t = t;
        cell.h = h;
        cell.count = static_cast<int>(members.size());
        cell.bin_center = exact ? key * 1e-9 : lo + (key + 0.5) * (hi - lo) / kUniformBins;
        double sum = 0.0;
        for (int n : members) sum += d[n];
        cell.mean = sum / cell.count;
        double ss = 0.0;
        for (int n : members) ss += (d[n] - cell.mean) * (d[n] - cell.mean);
        cell.std_error = cell.count > 1 ? std::sqrt(ss / (cell.count - 1) / cell.count) : 0.0;
        cell.pass = cell.count < kMinCount ||
                    std::abs(cell.mean) <= 3.0 * cell.std_error + 1e-10;
        report.pass = report.pass && cell.pass;
        report.cells.push_back(cell);
      }
    }
  }
  return report;
}

OptimalityReport VerifyOptimalityConditions(const BeliefProcess& process,
                                            const ObstacleField& v, double tol, int paths,
                                            std::uint64_t seed) {
  const BeliefGrid& grid = v.field.grid;
  if (grid.dim() != process.rate.rows()) {
    throw ProcessError("value field and process have different state counts");
  }
  const double spacing = 1.0 / grid.resolution();
  std::vector<Belief> pde_points;
  for (int i = 0; i < grid.size(); ++i) {
    if (v.tags[i] == ActiveTag::kPde) pde_points.push_back(grid.Point(i));
  }
  OptimalityReport report;
  auto membership = [&](const Belief& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const Belief& q : pde_points) best = std::min(best, (q - b).cwiseAbs().maxCoeff());
    ++report.beliefs_checked;
    if (best > report.worst_membership) {
      report.worst_membership = best;
      report.worst_membership_belief = b;
    }
  };
  auto chord = [&](const Belief& before, const Belief& after) {
    const Belief dir = after - before;
    const double len = dir.cwiseAbs().maxCoeff();
    if (len <= 0.0) return;
    const double eps = std::min(1.0, spacing / len);
    const double slope = (v.field(before + eps * dir) - v.field(before)) / eps;
    const double gap = std::abs(v.field(after) - v.field(before) - slope);
    report.worst_chord = std::max(report.worst_chord, gap);
    ++report.jumps_checked;
  };

  // Deterministic part of the trajectory.
  const double flow_end = std::min(FlowEnd(process), 50.0);
  const FlowEvaluator flow(process.rate);
  constexpr int kFlowSamples = 64;
  // A process that splits at time zero never sits at the prior, so only a
  // nonempty flow prefix is checked; the split itself is one of the chords.
  if (flow_end > 0.0) {
    for (int k = 0; k <= kFlowSamples; ++k) membership(flow(process.p, flow_end * k / kFlowSamples));
  }
  if (process.recipe != Recipe::kDeterministicFlow) {
    const std::vector<Belief> support = Support(process);
    const Belief entry = flow(process.p, FlowEnd(process));
    std::set<int> visited;
    std::set<std::pair<int, int>> moves;
    for (int n = 0; n < paths; ++n) {
      Rng rng(PathSeed(seed, static_cast<std::uint64_t>(n)));
      const BeliefPath path = SampleBeliefPath(process, FlowEnd(process) + 50.0, rng);
      for (std::size_t i = 0; i < path.labels.size(); ++i) {
        visited.insert(path.labels[i]);
        moves.insert({i == 0 ? -1 : path.labels[i - 1], path.labels[i]});
      }
    }
    for (int l : visited) membership(support[l]);
    for (const auto& [from, to] : moves) chord(from < 0 ? entry : support[from], support[to]);
  }
  report.membership_ok = report.worst_membership <= spacing * (1.0 + 1e-9);
  report.chords_ok = report.worst_chord <= tol;
  return report;
}

// --- Game play ----------------------------------------------------------

namespace {

// Law of the informed player's belief label at each stage: support points,
// the initial weights on stage 0, and stage-to-stage transitions.
struct StagePlan {
  std::vector<std::vector<Belief>> support;
  Vector initial;
  std::vector<Matrix> transition;  // transition[k]: stage k -> k + 1
};

StagePlan BuildStagePlan(const GameSpec& spec, const PlayConfig& config, int rounds,
                         const Matrix& p_step) {
  const int dim = spec.NumStates();
  const double step = 1.0 / config.n;
  const Matrix& rate = spec.rate.exogenous;
  const FlowEvaluator flow(rate);
  StagePlan plan;
  plan.support.resize(rounds);
  plan.transition.resize(rounds > 0 ? rounds - 1 : 0);
  auto deterministic = [&](int k) {
    plan.support[k] = {flow(spec.initial_belief, k * step)};
    if (k + 1 < rounds) plan.transition[k] = Matrix::Ones(1, 1);
  };

  Strategy1 strategy = config.strategy;
  BeliefProcess two_state;
  if (strategy == Strategy1::kSplittingOptimal) {
    if (dim != 2) throw ProcessError("the splitting strategy needs exactly two states");
    double lo = config.p_lo;
    double hi = config.p_hi;
    if (std::isnan(lo) || std::isnan(hi)) {
      // Contact points of u and cav u around the invariant belief.
      const UModel model = BuildUModel(spec, 200);
      const double p_inf = InvariantMeasure(rate)(0);
      lo = 0.0;
      hi = 1.0;
      for (int i = 0; i < model.u.grid.size(); ++i) {
        const double x = model.u.grid.Point(i)(0);
        if (model.cav_u.At(i) - model.u.At(i) > 1e-9) continue;
        if (x <= p_inf) lo = std::max(lo, x);
        if (x >= p_inf) hi = std::min(hi, x);
      }
      if (hi - lo < 1e-12) strategy = Strategy1::kNonRevealing;
    }
    if (strategy == Strategy1::kSplittingOptimal) {
      two_state = TwoStateOptimalProcess(rate(0, 1), rate(1, 0), lo, hi, spec.initial_belief(0));
    }
  }

  switch (strategy) {
    case Strategy1::kNonRevealing:
      for (int k = 0; k < rounds; ++k) deterministic(k);
      plan.initial = Vector::Ones(1);
      break;
    case Strategy1::kFullyRevealing:
      plan.support[0] = {spec.initial_belief};
      plan.initial = Vector::Ones(1);
      for (int k = 1; k < rounds; ++k) {
        for (int s = 0; s < dim; ++s) plan.support[k].push_back(Vertex(dim, s));
      }
      if (rounds > 1) plan.transition[0] = (p_step.transpose() * spec.initial_belief).transpose();
      for (int k = 1; k + 1 < rounds; ++k) plan.transition[k] = p_step;
      break;
    case Strategy1::kSplittingOptimal: {
      const TwoStateParams& t = two_state.two_state;
      const Matrix jump = TwoPointGenerator(t);
      const std::vector<Belief> pair = {TwoPoint(t.p_lo), TwoPoint(t.p_hi)};
      Vector entry(2);
      entry << t.weight_lo, 1.0 - t.weight_lo;
      const Matrix q_step = Transition(jump, step);
      for (int k = 0; k < rounds; ++k) {
        if (k * step < t.theta) {
          deterministic(k);
          if (k + 1 < rounds && (k + 1) * step >= t.theta) {
            plan.transition[k] =
                (Transition(jump, (k + 1) * step - t.theta).transpose() * entry).transpose();
          }
        } else {
          plan.support[k] = pair;
          if (k + 1 < rounds) plan.transition[k] = q_step;
        }
      }
      plan.initial = t.theta > 0.0 ? Vector::Ones(1) : entry;
      break;
    }
  }
  return plan;
}

}  // namespace

PlayResult PlayGame(const GameSpec& spec, const PlayConfig& config) {
  if (!spec.rate.ActionIndependent()) {
    throw ProcessError("game play supports action-independent transitions only");
  }
  if (config.n <= 0 || config.paths <= 0 || config.rounds < 0) {
    throw ProcessError("need n > 0, paths > 0 and rounds >= 0");
  }
  const int dim = spec.NumStates();
  const int na = spec.NumActions1();
  const int nb = spec.NumActions2();
  const double r = spec.discount;
  const double lambda = -std::expm1(-r / config.n);
  int rounds = config.rounds;
  if (rounds == 0) {
    rounds = lambda >= 1.0 ? 1
                           : static_cast<int>(std::ceil(std::log(1e-4) / std::log1p(-lambda)));
  }
  const Matrix p_step = Transition(spec.rate.exogenous, 1.0 / config.n);
  const StagePlan plan = BuildStagePlan(spec, config, rounds, p_step);

  // alpha[k][i]: optimal one-shot strategy at support point i of stage k.
  // mu[k][i](s', j): law of the next label given the next state.
  std::vector<std::vector<Vector>> alpha(rounds);
  std::vector<std::vector<Matrix>> mu(rounds);
  for (int k = 0; k < rounds; ++k) {
    for (const Belief& b : plan.support[k]) {
      alpha[k].push_back(SolveMatrixGame(spec.AverageGame(b)).x);
    }
    if (k + 1 >= rounds) continue;
    const auto& next = plan.support[k + 1];
    for (std::size_t i = 0; i < plan.support[k].size(); ++i) {
      const Belief target = p_step.transpose() * plan.support[k][i];
      Matrix m = Matrix::Zero(dim, next.size());
      for (int s = 0; s < dim; ++s) {
        for (std::size_t j = 0; j < next.size(); ++j) {
          m(s, j) = target(s) > kTiny ? plan.transition[k](i, j) * next[j](s) / target(s)
                                      : plan.transition[k](i, j);
        }
      }
      mu[k].push_back(std::move(m));
    }
  }

  std::vector<double> samples(config.paths);
  std::vector<long long> zero_counts(config.paths, 0);
#pragma omp parallel for schedule(static)
  for (int n = 0; n < config.paths; ++n) {
    Rng rng(PathSeed(config.seed, static_cast<std::uint64_t>(n)));
    int s = SampleIndex(spec.initial_belief, rng);
    Vector initial_given_s(plan.initial.size());
    for (int j = 0; j < plan.initial.size(); ++j) {
      initial_given_s(j) = plan.initial(j) * plan.support[0][j](s);
    }
    int label = SampleIndex(initial_given_s, rng);
    // filter(s, i) = P(s_k = s, label_k = i | a_0 .. a_{k-1}).
    Matrix filter(dim, plan.support[0].size());
    for (std::size_t j = 0; j < plan.support[0].size(); ++j) {
      filter.col(j) = plan.initial(j) * plan.support[0][j];
    }
    double total = 0.0;
    double weight = lambda;
    for (int k = 0; k < rounds; ++k) {
      const Belief p2 = filter.rowwise().sum();
      const Vector label_mass = filter.colwise().sum().transpose();
      Vector xbar = Vector::Zero(na);
      for (int i = 0; i < label_mass.size(); ++i) xbar += label_mass(i) * alpha[k][i];
      const Vector cost = spec.AverageGame(p2).transpose() * xbar;
      int b = 0;
      for (int c = 1; c < nb; ++c) {
        if (cost(c) < cost(b) - 1e-12) b = c;
      }
      const int a = SampleIndex(alpha[k][label], rng);
      total += weight * spec.payoff[s](a, b);
      weight *= 1.0 - lambda;
      if (k + 1 >= rounds) break;

      Matrix posterior = filter;
      for (int i = 0; i < posterior.cols(); ++i) posterior.col(i) *= alpha[k][i](a);
      const double z = posterior.sum();
      if (z > kTiny) {
        posterior /= z;
      } else {
        posterior = filter;
        ++zero_counts[n];
      }
      s = SampleIndex(p_step.row(s).transpose(), rng);
      label = SampleIndex(mu[k][label].row(s).transpose(), rng);
      const Matrix spread = posterior.transpose() * p_step;  // (i, s')
      Matrix next = Matrix::Zero(dim, plan.support[k + 1].size());
      for (int i = 0; i < spread.rows(); ++i) {
        for (int t = 0; t < dim; ++t) next.row(t) += spread(i, t) * mu[k][i].row(t);
      }
      filter = std::move(next);
    }
    samples[n] = total;
  }

  PlayResult result;
  result.rounds = rounds;
  result.payoff.paths = config.paths;
  double sum = 0.0;
  for (double x : samples) sum += x;
  result.payoff.mean = sum / config.paths;
  double ss = 0.0;
  for (double x : samples) ss += (x - result.payoff.mean) * (x - result.payoff.mean);
  if (config.paths > 1) {
    result.payoff.half_width = 1.96 * std::sqrt(ss / (config.paths - 1) / config.paths);
  }
  result.tail_bound = std::pow(1.0 - lambda, rounds) * spec.MaxAbsPayoff();
  result.payoff.truncation = result.tail_bound;
  for (long long c : zero_counts) result.zero_probability += c;
  return result;
}

}  // namespace asymgame
