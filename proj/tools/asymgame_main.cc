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


// Command-line front end. Every solver command writes one CSV file and a
// JSON run manifest next to it.

#include <omp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "asymgame/analysis.h"
#include "asymgame/chain.h"
#include "asymgame/envelope.h"
#include "asymgame/game_model.h"
#include "asymgame/hj.h"
#include "asymgame/instances.h"
#include "asymgame/matrix_game.h"
#include "asymgame/process_sim.h"
#include "asymgame/shapley_dp.h"

namespace asymgame {
namespace {

constexpr char kVersion[] = "0.1.0";

constexpr int kExitValidation = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitError = 3;

// Shortest round-trip decimal form; independent of the locale.
std::string Num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string Join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") != std::string::npos) {
      out += '"';
      for (char ch : c) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    } else {
      out += c;
    }
  }
  return out;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  void Row(const std::vector<std::string>& cells) { rows_.push_back(Join(cells)); }
  void Write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SpecError(SpecError::Kind::kIo, "cannot write " + path);
    out << Join(header_) << "\r\n";
    for (const auto& r : rows_) out << r << "\r\n";
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

std::vector<std::string> CoordHeader(int dim, const std::string& prefix = "p") {
  std::vector<std::string> h;
  for (int s = 0; s < dim; ++s) h.push_back(prefix + std::to_string(s));
  return h;
}

std::vector<std::string> Coords(const Belief& p) {
  std::vector<std::string> c;
  for (int s = 0; s < p.size(); ++s) c.push_back(Num(p(s)));
  return c;
}

Belief ToBelief(const std::vector<double>& v) {
  Belief p(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p(i) = v[i];
  return p;
}

struct Run {
  std::string command;
  std::string spec_path;
  std::string out;
  std::string manifest;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json diagnostics = nlohmann::json::object();
  std::vector<std::string> outputs;
  std::string spec_hash;
  std::uint64_t seed = 42;
  bool converged = true;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void WriteManifest() const {
    nlohmann::json m;
    m["command"] = command;
    m["spec"] = spec_path;
    m["spec_hash"] = spec_hash;
    m["parameters"] = parameters;
    m["seed"] = seed;
    m["tool_version"] = kVersion;
    m["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m["outputs"] = outputs;
    m["converged"] = converged;
    m["diagnostics"] = diagnostics;
    const std::string path = manifest.empty() ? out + ".manifest.json" : manifest;
    std::ofstream f(path);
    if (!f) throw SpecError(SpecError::Kind::kIo, "cannot write " + path);
    f << m.dump(2) << "\n";
  }
};

std::string HashOf(const AnySpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a(ToJson(spec).dump())));
  return buf;
}

template <typename T>
const T& Require(const AnySpec& spec, const std::string& what) {
  if (const T* s = std::get_if<T>(&spec)) return *s;
  throw SpecError(SpecError::Kind::kValidation, what);
}

// Most commands accept a payoff-matrix game or an abstract u.
UModel ModelOf(const AnySpec& spec, int resolution) {
  if (const auto* g = std::get_if<GameSpec>(&spec)) return BuildUModel(*g, resolution);
  if (const auto* a = std::get_if<AbstractU>(&spec)) return BuildUModel(*a);
  throw SpecError(SpecError::Kind::kValidation, "this command needs a one-sided spec");
}

Hamiltonian HamiltonianOf(const AnySpec& spec) {
  if (const auto* g = std::get_if<GameSpec>(&spec)) return Hamiltonian::FromSpec(*g);
  if (const auto* a = std::get_if<AbstractU>(&spec)) return Hamiltonian::FromAbstract(*a);
  return Hamiltonian::TwoSided(std::get<GameSpecTwoSided>(spec));
}

Belief InitialBelief(const AnySpec& spec) {
  if (const auto* g = std::get_if<GameSpec>(&spec)) return g->initial_belief;
  if (const auto* a = std::get_if<AbstractU>(&spec)) return a->initial_belief;
  return std::get<GameSpecTwoSided>(spec).initial_belief1;
}

Matrix RateOf(const AnySpec& spec) {
  if (const auto* g = std::get_if<GameSpec>(&spec)) {
    if (!g->rate.ActionIndependent()) {
      throw SpecError(SpecError::Kind::kValidation, "this command needs exogenous transitions");
    }
    return g->rate.exogenous;
  }
  return Require<AbstractU>(spec, "this command needs a one-sided spec").rate;
}

double DiscountOf(const AnySpec& spec) {
  return std::visit([](const auto& s) { return s.discount; }, spec);
}

// Contact points of u and cav u bracketing the invariant belief (two states).
std::pair<double, double> ContactInterval(const UModel& model) {
  const double p_inf = InvariantMeasure(model.rate)(0);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < model.u.grid.size(); ++i) {
    const double x = model.u.grid.Point(i)(0);
    if (model.cav_u.At(i) - model.u.At(i) > 1e-9) continue;
    if (x <= p_inf) lo = std::max(lo, x);
    if (x >= p_inf) hi = std::min(hi, x);
  }
  return {lo, hi};
}

void WriteField(const ValueField& f, const std::vector<ActiveTag>* tags, const std::string& path) {
  auto header = CoordHeader(f.grid.dim());
  header.push_back("value");
  if (tags) header.push_back("tag");
  Csv csv(header);
  for (int i = 0; i < f.grid.size(); ++i) {
    auto row = Coords(f.grid.Point(i));
    row.push_back(Num(f.At(i)));
    if (tags) row.push_back((*tags)[i] == ActiveTag::kPde ? "pde" : "obstacle");
    csv.Row(row);
  }
  csv.Write(path);
}

int Main(int argc, char** argv) {
  CLI::App app{"Continuous-time asymmetric-information games: bounds, DP and HJ solvers"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker cap (default: ASYMGAME_THREADS or all cores)");
  app.set_version_flag("--version", kVersion);

  Run run;
  std::string spec_path;
  auto add_spec = [&](CLI::App* sub) {
    sub->add_option("spec", spec_path, "Game specification (JSON)")->required();
  };
  auto add_out = [&](CLI::App* sub, const std::string& def) {
    run.out = def;
    sub->add_option("--out", run.out, "CSV output path")->capture_default_str();
    sub->add_option("--manifest", run.manifest, "Manifest path (default: <out>.manifest.json)");
  };

  // Shared parameters with the documented defaults.
  int grid = 200;
  int n = 32;
  int xgrid = 40;
  double tol = 1e-6;
  std::uint64_t seed = 42;
  int paths = 10000;
  std::vector<double> belief;
  std::vector<double> belief2;
  std::vector<double> times;
  std::vector<int> n_list = {8, 16, 32, 64};
  double horizon = 10.0;
  int hj_grid = 1000;
  double hj_tol = 1e-8;
  std::string grid2 = "200x200";
  std::string process_name = "two-state-optimal";
  std::string strategy_name = "splitting";
  double p_lo = std::nan("");
  double p_hi = std::nan("");
  int rounds = 0;
  double r_example = 1.0;
  double pi_example = 1.0;
  bool closed_form = false;
  std::string order_name = "cav-vex";

  auto* validate = app.add_subcommand("validate", "Check a spec and list violations");
  add_spec(validate);

  auto* value = app.add_subcommand("value", "Value and optimal strategies of the average game");
  add_spec(value);
  value->add_option("--belief", belief, "Belief, comma separated")->delimiter(',');
  value->add_option("--belief2", belief2, "Second belief (two-sided specs)")->delimiter(',');

  auto* flow = app.add_subcommand("flow", "Belief flow p*_t = P_t^T p");
  add_spec(flow);
  add_out(flow, "flow.csv");
  times = {0.0, 0.5, 1.0, 2.0};
  flow->add_option("--t", times, "Times, comma separated")->delimiter(',')->capture_default_str();
  flow->add_option("--belief", belief, "Initial belief (default: spec)")->delimiter(',');

  auto* chain = app.add_subcommand("simulate-chain", "Sample state paths of the chain");
  add_spec(chain);
  add_out(chain, "chain.csv");
  chain->add_option("--paths", paths, "Number of paths")->capture_default_str();
  chain->add_option("--seed", seed, "Master seed")->capture_default_str();
  chain->add_option("--horizon", horizon, "Time horizon")->capture_default_str();

  auto* cav = app.add_subcommand("cav", "u and cav u on the belief grid");
  add_spec(cav);
  add_out(cav, "cav.csv");
  cav->add_option("--resolution", grid, "Grid resolution m")->capture_default_str();

  auto* bounds = app.add_subcommand("bounds", "Lower and upper bounds on the belief grid");
  add_spec(bounds);
  add_out(bounds, "bounds.csv");
  bounds->add_option("--resolution", grid, "Grid resolution m")->capture_default_str();

  auto* dp = app.add_subcommand("dp", "Value of the discretized game by value iteration");
  add_spec(dp);
  add_out(dp, "vn.csv");
  dp->add_option("--n", n, "Stages per unit time")->capture_default_str();
  dp->add_option("--grid", grid, "Belief grid resolution")->capture_default_str();
  dp->add_option("--xgrid", xgrid, "Strategy grid resolution")->capture_default_str();
  dp->add_option("--tol", tol, "Stopping tolerance")->capture_default_str();

  auto* hj = app.add_subcommand("hj", "Obstacle problem for the limit value");
  add_spec(hj);
  add_out(hj, "v.csv");
  hj->add_option("--grid", grid, "Belief grid resolution")->capture_default_str();
  hj->add_option("--tol", hj_tol, "Sweep tolerance")->capture_default_str();

  auto* hj2 = app.add_subcommand("hj2", "Double obstacle problem (two-sided information)");
  add_spec(hj2);
  add_out(hj2, "v2.csv");
  hj2->add_option("--grid", grid2, "Product grid m1xm2")->capture_default_str();
  hj2->add_option("--tol", hj_tol, "Sweep tolerance")->capture_default_str();
  hj2->add_option("--order", order_name, "Projection order: cav-vex or vex-cav")
      ->check(CLI::IsMember({"cav-vex", "vex-cav"}))
      ->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo value of a belief process");
  add_spec(simulate);
  add_out(simulate, "simulate.csv");
  simulate->add_option("--process", process_name, "deterministic-flow, fully-revealing, two-state-optimal")
      ->check(CLI::IsMember({"deterministic-flow", "fully-revealing", "two-state-optimal"}))
      ->capture_default_str();
  simulate->add_option("--paths", paths, "Number of paths")->capture_default_str();
  simulate->add_option("--seed", seed, "Master seed")->capture_default_str();
  simulate->add_option("--p-lo", p_lo, "Lower jump point (default: contact point of cav u)");
  simulate->add_option("--p-hi", p_hi, "Upper jump point (default: contact point of cav u)");
  simulate->add_option("--resolution", grid, "Grid for u")->capture_default_str();

  auto* play = app.add_subcommand("play", "Simulate the discretized game");
  add_spec(play);
  add_out(play, "play.csv");
  play->add_option("--n", n, "Stages per unit time")->capture_default_str();
  play->add_option("--strategy", strategy_name, "splitting, non-revealing, fully-revealing")
      ->check(CLI::IsMember({"splitting", "non-revealing", "fully-revealing"}))
      ->capture_default_str();
  play->add_option("--paths", paths, "Number of paths")->capture_default_str();
  play->add_option("--seed", seed, "Master seed")->capture_default_str();
  play->add_option("--rounds", rounds, "Stages (0: automatic)")->capture_default_str();
  play->add_option("--p-lo", p_lo, "Lower support point of the splitting");
  play->add_option("--p-hi", p_hi, "Upper support point of the splitting");

  auto* convergence = app.add_subcommand("convergence", "Distance of v_n to the HJ field");
  add_spec(convergence);
  add_out(convergence, "convergence.csv");
  convergence->add_option("--n", n_list, "Stage counts")->delimiter(',')->capture_default_str();
  convergence->add_option("--grid", grid, "DP grid")->capture_default_str();
  convergence->add_option("--xgrid", xgrid, "Strategy grid")->capture_default_str();
  convergence->add_option("--tol", tol, "DP tolerance")->capture_default_str();
  convergence->add_option("--hj-grid", hj_grid, "HJ reference grid")->capture_default_str();
  convergence->add_flag("--closed-form", closed_form,
                        "Also compare with the closed form of the symmetric switching game");

  auto* repro = app.add_subcommand("repro-example", "Full pipeline on the switching example");
  add_out(repro, "repro.csv");
  repro->add_option("--r", r_example, "Discount rate")->capture_default_str();
  repro->add_option("--pi", pi_example, "Switching rate")->capture_default_str();
  repro->add_option("--n", n_list, "Stage counts")->delimiter(',')->capture_default_str();
  repro->add_option("--grid", grid, "DP grid")->capture_default_str();
  repro->add_option("--xgrid", xgrid, "Strategy grid")->capture_default_str();
  repro->add_option("--tol", tol, "DP tolerance")->capture_default_str();
  repro->add_option("--hj-grid", hj_grid, "HJ grid")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (threads <= 0) {
    if (const char* env = std::getenv("ASYMGAME_THREADS")) threads = std::atoi(env);
  }
  if (threads > 0) omp_set_num_threads(threads);

  CLI::App* sub = app.get_subcommands().front();
  run.command = sub->get_name();
  run.spec_path = spec_path;
  run.seed = seed;
  run.parameters["threads"] = threads;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "--manifest") continue;
    const auto res = opt->results();
    std::string key = opt->get_name();
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (!res.empty()) {
      run.parameters[key] = CLI::detail::join(res, ",");
    } else {
      run.parameters[key] = opt->get_default_str();
    }
  }

  try {
    AnySpec spec;
    if (run.command != "repro-example") {
      spec = LoadSpec(spec_path);
      run.spec_hash = HashOf(spec);
    }

    if (run.command == "validate") {
      std::cout << "ok " << run.spec_hash << "\n";
      return 0;
    }

    if (run.command == "value") {
      if (const auto* two = std::get_if<GameSpecTwoSided>(&spec)) {
        const Belief p1 = belief.empty() ? two->initial_belief1 : ToBelief(belief);
        const Belief p2 = belief2.empty() ? two->initial_belief2 : ToBelief(belief2);
        const auto sol = SolveMatrixGame(two->AverageGame(p1, p2));
        std::cout << "value," << Num(sol.value) << "\n";
        return 0;
      }
      const Belief p = belief.empty() ? InitialBelief(spec) : ToBelief(belief);
      if (const auto* a = std::get_if<AbstractU>(&spec)) {
        const UModel model = BuildUModel(*a);
        std::cout << "value," << Num(model.u(p)) << "\n";
        return 0;
      }
      const auto& g = std::get<GameSpec>(spec);
      const auto sol = SolveMatrixGame(g.AverageGame(p));
      std::cout << "value," << Num(sol.value) << "\n";
      for (int a = 0; a < sol.x.size(); ++a) std::cout << "x," << g.actions1[a] << "," << Num(sol.x(a)) << "\n";
      for (int b = 0; b < sol.y.size(); ++b) std::cout << "y," << g.actions2[b] << "," << Num(sol.y(b)) << "\n";
      return 0;
    }

    if (run.command == "flow") {
      const Matrix rate = RateOf(spec);
      const Belief p = belief.empty() ? InitialBelief(spec) : ToBelief(belief);
      auto header = CoordHeader(p.size());
      header.insert(header.begin(), "t");
      Csv csv(header);
      for (double t : times) {
        auto row = Coords(BeliefFlow(rate, p, t));
        row.insert(row.begin(), Num(t));
        csv.Row(row);
      }
      csv.Write(run.out);
    } else if (run.command == "simulate-chain") {
      const Matrix rate = RateOf(spec);
      const Belief p = InitialBelief(spec);
      auto header = std::vector<std::string>{"path", "initial_state", "final_state", "jumps"};
      for (int s = 0; s < p.size(); ++s) header.push_back("time_in_" + std::to_string(s));
      Csv csv(header);
      for (int k = 0; k < paths; ++k) {
        Rng rng(PathSeed(seed, static_cast<std::uint64_t>(k)));
        const double u = Uniform01(rng);
        int s0 = 0;
        for (double acc = p(0); s0 + 1 < p.size() && u >= acc; acc += p(++s0)) {
        }
        const ChainPath path = SamplePath(rate, s0, horizon, rng);
        std::vector<double> occupation(p.size(), 0.0);
        for (std::size_t i = 0; i < path.times.size(); ++i) {
          const double end = i + 1 < path.times.size() ? path.times[i + 1] : horizon;
          occupation[path.states[i]] += end - path.times[i];
        }
        std::vector<std::string> row = {std::to_string(k), std::to_string(s0),
                                        std::to_string(path.states.back()),
                                        std::to_string(path.NumJumps())};
        for (double o : occupation) row.push_back(Num(o));
        csv.Row(row);
      }
      csv.Write(run.out);
    } else if (run.command == "cav") {
      const UModel model = ModelOf(spec, grid);
      auto header = CoordHeader(model.u.grid.dim());
      header.push_back("u");
      header.push_back("cav_u");
      Csv csv(header);
      for (int i = 0; i < model.u.grid.size(); ++i) {
        auto row = Coords(model.u.grid.Point(i));
        row.push_back(Num(model.u.At(i)));
        row.push_back(Num(model.cav_u.At(i)));
        csv.Row(row);
      }
      csv.Write(run.out);
    } else if (run.command == "bounds") {
      const UModel model = ModelOf(spec, grid);
      const auto rows = SandwichReport(model, model.u.grid);
      auto header = CoordHeader(model.u.grid.dim());
      for (const char* h : {"lower_nonrevealing", "lower_fully_revealing", "upper", "ordered"}) {
        header.push_back(h);
      }
      Csv csv(header);
      int disordered = 0;
      for (const auto& row : rows) {
        auto cells = Coords(row.p);
        cells.push_back(Num(row.lower_nonrevealing));
        cells.push_back(Num(row.lower_fully_revealing));
        cells.push_back(Num(row.upper));
        cells.push_back(row.ordered ? "1" : "0");
        disordered += row.ordered ? 0 : 1;
        csv.Row(cells);
      }
      run.diagnostics["disordered_points"] = disordered;
      csv.Write(run.out);
    } else if (run.command == "dp") {
      const auto& g = Require<GameSpec>(spec, "dp needs a payoff-matrix spec");
      DPConfig config;
      config.n = n;
      config.grid_resolution = grid;
      config.xgrid = xgrid;
      config.tolerance = tol;
      const DPResult res = SolveVn(g, config);
      run.converged = res.converged;
      run.diagnostics["iterations"] = res.iterations;
      run.diagnostics["residual"] = res.residual;
      run.diagnostics["lambda"] = res.lambda;
      run.diagnostics["clamped_posteriors"] = res.clamped_posteriors;
      run.diagnostics["concave"] = res.concavity.concave;
      run.diagnostics["cav_raise"] = res.cav_raise;
      WriteField(res.field, nullptr, run.out);
    } else if (run.command == "hj") {
      if (std::holds_alternative<GameSpecTwoSided>(spec)) {
        throw SpecError(SpecError::Kind::kValidation, "use hj2 for two-sided specs");
      }
      const Hamiltonian h = HamiltonianOf(spec);
      BeliefGrid g(h.num_states(), std::holds_alternative<AbstractU>(spec)
                                       ? std::get<AbstractU>(spec).grid_resolution
                                       : grid);
      SchemeConfig config;
      config.tolerance = hj_tol;
      const ObstacleField v = SolveObstacle(h, g, config);
      run.converged = v.converged;
      run.diagnostics["iterations"] = v.iterations;
      run.diagnostics["last_change"] = v.last_change;
      run.diagnostics["dtau"] = v.dtau;
      run.diagnostics["error_bound"] = v.ErrorBound(h.discount());
      run.diagnostics["oscillation"] = v.oscillation;
      WriteField(v.field, &v.tags, run.out);
    } else if (run.command == "hj2") {
      const auto& two = Require<GameSpecTwoSided>(spec, "hj2 needs a two-sided spec");
      ProductGrid g;
      const auto x = grid2.find('x');
      if (x == std::string::npos) {
        g.m1 = g.m2 = std::stoi(grid2);
      } else {
        g.m1 = std::stoi(grid2.substr(0, x));
        g.m2 = std::stoi(grid2.substr(x + 1));
      }
      DoubleObstacleConfig config;
      config.tolerance = hj_tol;
      config.order = order_name == "cav-vex" ? ProjectionOrder::kCavThenVex
                                            : ProjectionOrder::kVexThenCav;
      const DoubleObstacleField v = SolveDoubleObstacle(Hamiltonian::TwoSided(two), g, config);
      run.converged = v.converged;
      run.diagnostics["iterations"] = v.iterations;
      run.diagnostics["last_change"] = v.last_change;
      run.diagnostics["oscillation"] = v.oscillation;
      run.diagnostics["concavity_violation"] = v.concavity_violation;
      run.diagnostics["convexity_violation"] = v.convexity_violation;
      run.diagnostics["notes"] = v.diagnostics;
      Csv csv({"p1", "p2", "value", "tag"});
      for (int i = 0; i <= g.m1; ++i) {
        for (int j = 0; j <= g.m2; ++j) {
          csv.Row({Num(static_cast<double>(i) / g.m1), Num(static_cast<double>(j) / g.m2),
                   Num(v.At(i, j)),
                   v.tags[g.Index(i, j)] == ActiveTag::kPde ? "pde" : "obstacle"});
        }
      }
      csv.Write(run.out);
    } else if (run.command == "simulate") {
      const UModel model = ModelOf(spec, grid);
      const Belief p = model.initial_belief;
      BeliefProcess process;
      if (process_name == "deterministic-flow") {
        process = DeterministicFlowProcess(model.rate, p);
      } else if (process_name == "fully-revealing") {
        process = FullyRevealingProcess(model.rate, p);
      } else {
        if (p.size() != 2) {
          throw SpecError(SpecError::Kind::kValidation, "two-state-optimal needs two states");
        }
        if (std::isnan(p_lo) || std::isnan(p_hi)) {
          const auto [lo, hi] = ContactInterval(model);
          if (std::isnan(p_lo)) p_lo = lo;
          if (std::isnan(p_hi)) p_hi = hi;
        }
        process = TwoStateOptimalProcess(model.rate(0, 1), model.rate(1, 0), p_lo, p_hi, p(0));
        run.parameters["p-lo"] = p_lo;
        run.parameters["p-hi"] = p_hi;
      }
      EvaluateOptions options;
      options.paths = paths;
      options.seed = seed;
      const auto u = [&](const Belief& b) { return model.u(b); };
      const MonteCarloEstimate est = EvaluateP1(process, u, model.discount, options);
      const MartingaleReport mart =
          MartingaleConsistencyCheck(process, {0.5, 1.0, 2.0}, {0.1, 0.5}, paths, seed);
      Csv csv({"process", "mean", "half_width", "truncation", "upper_bound",
               "lower_nonrevealing", "lower_fully_revealing", "martingale_pass"});
      csv.Row({process_name, Num(est.mean), Num(est.half_width), Num(est.truncation),
               Num(UpperBound(model, p)), Num(LowerBoundNonRevealing(model, p)),
               Num(LowerBoundFullyRevealing(model, p)), mart.pass ? "1" : "0"});
      csv.Write(run.out);
    } else if (run.command == "play") {
      const auto& g = Require<GameSpec>(spec, "play needs a payoff-matrix spec");
      PlayConfig config;
      config.n = n;
      config.paths = paths;
      config.seed = seed;
      config.rounds = rounds;
      config.p_lo = p_lo;
      config.p_hi = p_hi;
      config.strategy = strategy_name == "splitting"       ? Strategy1::kSplittingOptimal
                        : strategy_name == "non-revealing" ? Strategy1::kNonRevealing
                                                           : Strategy1::kFullyRevealing;
      const PlayResult res = PlayGame(g, config);
      run.diagnostics["zero_probability_updates"] = res.zero_probability;
      if (res.zero_probability > 0) {
        std::cerr << "note: " << res.zero_probability
                  << " zero-probability observations kept the prior belief\n";
      }
      Csv csv({"strategy", "n", "rounds", "mean", "half_width", "tail_bound"});
      csv.Row({strategy_name, std::to_string(n), std::to_string(res.rounds),
               Num(res.payoff.mean), Num(res.payoff.half_width), Num(res.tail_bound)});
      csv.Write(run.out);
    } else if (run.command == "convergence" || run.command == "repro-example") {
      GameSpec g;
      std::function<double(const Belief&)> exact;
      if (run.command == "repro-example") {
        g = SwitchingExample(r_example, pi_example, 0.5);
        run.spec_hash = HashOf(AnySpec(g));
        closed_form = true;
      } else {
        g = Require<GameSpec>(spec, "convergence needs a payoff-matrix spec");
      }
      if (closed_form) {
        const Matrix& rate = g.rate.exogenous;
        if (g.NumStates() != 2 || std::abs(rate(0, 1) - rate(1, 0)) > 1e-12) {
          throw SpecError(SpecError::Kind::kValidation,
                          "the closed form needs a symmetric two-state chain");
        }
        const double rr = g.discount, pi = rate(0, 1);
        exact = [rr, pi](const Belief& p) { return ClosedFormExample(p(0), rr, pi); };
      }
      const Hamiltonian h = Hamiltonian::FromSpec(g);
      const ObstacleField v = SolveObstacle(h, BeliefGrid(g.NumStates(), hj_grid), {});
      run.converged = v.converged;
      run.diagnostics["hj_iterations"] = v.iterations;
      run.diagnostics["hj_error_bound"] = v.ErrorBound(g.discount);
      DPConfig config;
      config.grid_resolution = grid;
      config.xgrid = xgrid;
      config.tolerance = tol;
      const ConvergenceTable table = ConvergenceStudy(g, n_list, config, &v.field, exact);
      run.diagnostics["monotone"] = table.monotone;
      for (const auto& row : table.rows) run.converged = run.converged && row.converged;

      if (run.command == "convergence") {
        Csv csv({"n", "distance_hj", "distance_closed_form", "value_at_initial", "iterations",
                 "converged"});
        for (const auto& row : table.rows) {
          csv.Row({std::to_string(row.n), Num(row.distance_reference),
                   Num(row.distance_closed_form), Num(row.value_at_initial),
                   std::to_string(row.iterations), row.converged ? "1" : "0"});
        }
        csv.Write(run.out);
      } else {
        // Comparison table on a coarse belief grid; the DP fields are rerun
        // here because ConvergenceStudy returns only their summaries.
        const UModel model = BuildUModel(g, grid);
        std::vector<ValueField> vn;
        for (int k : n_list) {
          DPConfig c = config;
          c.n = k;
          vn.push_back(SolveVn(g, c).field);
        }
        std::vector<std::string> header = {"p", "closed_form", "hj"};
        for (int k : n_list) header.push_back("dp_n" + std::to_string(k));
        for (const char* c : {"lower_nonrevealing", "lower_fully_revealing", "upper"}) {
          header.push_back(c);
        }
        Csv csv(header);
        double hj_error = 0.0;
        for (int i = 0; i < v.field.grid.size(); ++i) {
          hj_error = std::max(hj_error, std::abs(v.field.At(i) - exact(v.field.grid.Point(i))));
        }
        for (int i = 0; i <= 20; ++i) {
          Belief p(2);
          p << i / 20.0, 1.0 - i / 20.0;
          std::vector<std::string> row = {Num(p(0)), Num(exact(p)), Num(v.field(p))};
          for (const auto& f : vn) row.push_back(Num(f(p)));
          row.push_back(Num(LowerBoundNonRevealing(model, p)));
          row.push_back(Num(LowerBoundFullyRevealing(model, p)));
          row.push_back(Num(UpperBound(model, p)));
          csv.Row(row);
        }
        run.diagnostics["hj_sup_error_closed_form"] = hj_error;
        std::cout << "hj sup error vs closed form: " << Num(hj_error) << "\n";
        for (const auto& row : table.rows) {
          std::cout << "n=" << row.n << " distance to hj: " << Num(row.distance_reference) << "\n";
        }
        csv.Write(run.out);
      }
    }
    run.outputs.push_back(run.out);
    run.WriteManifest();
    if (!run.converged) {
      std::cerr << "solver did not converge; see " << run.out << ".manifest.json\n";
      return kExitNonConvergence;
    }
    return 0;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace
}  // namespace asymgame

int main(int argc, char** argv) { return asymgame::Main(argc, argv); }
