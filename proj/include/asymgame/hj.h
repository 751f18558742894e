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


#ifndef ASYMGAME_HJ_H_
#define ASYMGAME_HJ_H_

// Hamiltonians of the limit game and a monotone grid scheme for the obstacle
// problems
//
//   min{ r v + H(p, Dv) ; -lambda_max(D^2 v) } = 0                on Delta(S),
//
// and, for incomplete information on both sides, the double obstacle version
// in which v must be concave in p1 and convex in p2.
//
// Scheme: explicit pseudo-time steps of r v + H = 0 with upwind differences,
// each followed by a projection onto concave (and, two-sided, convex) grid
// functions. Every map in the loop is monotone and commutes with constants,
// so one sweep contracts the sup-norm by (1 - r dtau) and the fixed point does
// not depend on dtau.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "asymgame/envelope.h"
#include "asymgame/game_model.h"

namespace asymgame {

class HJError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class HamiltonianKind { kExogenous, kEndogenous, kTwoSided };

struct Saddle {
  double value = 0.0;  // H(p, xi)
  Vector x;            // minimizer of H (player 1)
  Vector y;            // maximizer of H (player 2)
};

class Hamiltonian {
 public:
  // H(p, xi) = -<R^T p, xi> - r u(p) for a given u.
  static Hamiltonian Exogenous(Matrix rate, double discount,
                               std::function<double(const Belief&)> u);
  // Exogenous kind when the rates do not depend on actions (u by LP),
  // endogenous kind otherwise.
  static Hamiltonian FromSpec(const GameSpec& spec);
  static Hamiltonian FromAbstract(const AbstractU& spec);
  static Hamiltonian TwoSided(const GameSpecTwoSided& spec);

  HamiltonianKind kind() const { return kind_; }
  double discount() const { return discount_; }
  int num_states() const { return num_states_; }
  int num_states2() const { return num_states2_; }

  // One-sided kinds. xi lives in R^S; only differences of its entries matter.
  double Eval(const Belief& p, const Vector& xi) const;
  Saddle SaddleAt(const Belief& p, const Vector& xi) const;
  // Matrix H(a, b) whose min_x max_y is H(p, xi).
  Matrix HamiltonianMatrix(const Belief& p, const Vector& xi) const;

  // Two-sided kind.
  double Eval(const Belief& p1, const Belief& p2, const Vector& xi1,
              const Vector& xi2) const;
  Saddle SaddleAt(const Belief& p1, const Belief& p2, const Vector& xi1,
                  const Vector& xi2) const;
  Matrix HamiltonianMatrix(const Belief& p1, const Belief& p2,
                           const Vector& xi1, const Vector& xi2) const;

  // u(p), respectively u(p1, p2): value of the average game.
  double U(const Belief& p) const;
  double U(const Belief& p1, const Belief& p2) const;

  // Generator R(x, y) = sum x_a y_b R(a, b) (one-sided), R1(x), R2(y).
  Matrix MixedGenerator(const Vector& x, const Vector& y) const;
  Matrix MixedGenerator1(const Vector& x) const;
  Matrix MixedGenerator2(const Vector& y) const;
  // Generators over which the drift ranges (one per action pair, or one).
  std::vector<Matrix> GeneratorFamily() const;
  std::vector<Matrix> GeneratorFamily1() const;
  std::vector<Matrix> GeneratorFamily2() const;

  // max over action pairs of |R(a, b)^T p|_2: Lipschitz constant of H in xi.
  double LipschitzBound(const Belief& p) const;

  // True when the drift does not depend on actions (u can be tabulated).
  bool ActionIndependent() const { return action_independent_; }

 private:
  HamiltonianKind kind_ = HamiltonianKind::kExogenous;
  double discount_ = 1.0;
  int num_states_ = 0;
  int num_states2_ = 0;
  bool action_independent_ = true;
  Matrix rate_;
  std::function<double(const Belief&)> u_;
  std::shared_ptr<const GameSpec> spec_;
  std::shared_ptr<const GameSpecTwoSided> spec2_;
};

enum class ActiveTag : std::uint8_t { kPde, kObstacle };

struct SchemeConfig {
  double tolerance = 1e-8;     // sup-norm change per sweep
  int max_iterations = 4000000;
  double cfl = 0.4;
  double obstacle_threshold = 1e-10;
  std::optional<ValueField> initial;  // default: cav u
  int oscillation_window = 100;
};

struct ObstacleField {
  ValueField field;
  std::vector<ActiveTag> tags;
  int iterations = 0;
  double last_change = 0.0;
  double dtau = 0.0;
  bool converged = false;
  bool oscillation = false;
  // Sup-norm distance to the exact fixed point is at most last_change / (r dtau).
  double ErrorBound(double r) const { return last_change / (r * dtau); }
};

ObstacleField SolveObstacle(const Hamiltonian& h, const BeliefGrid& grid,
                            const SchemeConfig& config = {});

// Gradient estimate at a grid point (central differences, one-sided at the
// boundary), in coordinates where the last component is zero.
Vector GridGradient(const ValueField& f, int index);

struct ResidualReport {
  double worst_pde = 0.0;        // max |r v + H| over pde-active points
  int worst_pde_index = -1;
  double worst_obstacle = 0.0;   // max (-(r v + H))_+ over obstacle points
  int worst_obstacle_index = -1;
  bool Passes(double tol) const { return worst_pde <= tol && worst_obstacle <= tol; }
};

ResidualReport ResidualCheck(const ObstacleField& field, const Hamiltonian& h);

// --- Two-sided ------------------------------------------------------------

// Product grid on [0,1]^2: index i * (m2 + 1) + j is the pair
// (p1, p2) = (i / m1, j / m2), each the probability of the first state.
struct ProductGrid {
  int m1 = 0;
  int m2 = 0;
  int size() const { return (m1 + 1) * (m2 + 1); }
  int Index(int i, int j) const { return i * (m2 + 1) + j; }
};

struct DoubleObstacleField {
  ProductGrid grid;
  std::vector<double> values;
  std::vector<ActiveTag> tags;
  int iterations = 0;
  double last_change = 0.0;
  double dtau = 0.0;
  bool converged = false;
  bool oscillation = false;
  std::string diagnostics;
  double concavity_violation = 0.0;  // worst second difference along p1
  double convexity_violation = 0.0;  // worst negative second difference along p2

  double At(int i, int j) const { return values[grid.Index(i, j)]; }
  // Bilinear interpolation.
  double operator()(double p1, double p2) const;
};

enum class ProjectionOrder { kCavThenVex, kVexThenCav };

struct DoubleObstacleConfig {
  double tolerance = 1e-7;
  int max_iterations = 2000000;
  double cfl = 0.4;
  double obstacle_threshold = 1e-10;
  int oscillation_window = 100;
  ProjectionOrder order = ProjectionOrder::kCavThenVex;
};

DoubleObstacleField SolveDoubleObstacle(const Hamiltonian& h, const ProductGrid& grid,
                                        const DoubleObstacleConfig& config = {});

}  // namespace asymgame

#endif  // ASYMGAME_HJ_H_
