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


#include "asymgame/hj.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "asymgame/matrix_game.h"

namespace asymgame {
namespace {

struct Move {
  int neighbor = 0;
  double coef = 0.0;  // |flux| / h
};

// Lattice offset of the vertex delta_s in grid coordinates.
std::array<int, 2> VertexOffset(int dim, int s) {
  if (s == dim - 1) return {0, 0};
  return s == 0 ? std::array<int, 2>{1, 0} : std::array<int, 2>{0, 1};
}

// Upwind moves for the drift R^T p, split into net pairwise fluxes
// f_{ss'} = p_s R(s,s') - p_{s'} R(s',s) along the edge directions
// delta_{s'} - delta_s. A positive flux always points into the simplex.
int BuildMoves(const BeliefGrid& grid, int index, const Belief& p, const Matrix& g,
               std::array<Move, 3>* moves) {
  const int dim = grid.dim();
  const auto c = grid.Coords(index);
  int count = 0;
  for (int s = 0; s < dim; ++s) {
    for (int t = s + 1; t < dim; ++t) {
      double flux = p(s) * g(s, t) - p(t) * g(t, s);
      int from = s;
      int to = t;
      if (flux < 0.0) {
        flux = -flux;
        std::swap(from, to);
      }
      if (flux == 0.0) continue;
      const auto a = VertexOffset(dim, to);
      const auto b = VertexOffset(dim, from);
      const int nb = grid.Index(c[0] + a[0] - b[0], c[1] + a[1] - b[1]);
      if (nb < 0) continue;  // only reachable through round-off at the boundary
      (*moves)[count++] = {nb, flux * grid.resolution()};
    }
  }
  return count;
}

double MaxStencilWeight(const BeliefGrid& grid, const std::vector<Matrix>& family) {
  double worst = 0.0;
  std::array<Move, 3> moves;
  for (int i = 0; i < grid.size(); ++i) {
    const Belief p = grid.Point(i);
    for (const Matrix& g : family) {
      const int n = BuildMoves(grid, i, p, g, &moves);
      double sum = 0.0;
      for (int k = 0; k < n; ++k) sum += moves[k].coef;
      worst = std::max(worst, sum);
    }
  }
  return worst;
}

double PseudoTimeStep(double r, double stencil_weight, double cfl) {
  const double cap = 0.5 / r;
  if (stencil_weight <= 0.0) return cap;
  return std::min(cap, cfl / stencil_weight);
}

Belief TwoPoint(double p) {
  Belief b(2);
  b << p, 1.0 - p;
  return b;
}

// Tracks runs of non-decreasing sweep changes.
class OscillationDetector {
 public:
  explicit OscillationDetector(int window) : window_(window) {}
  bool Update(double change, double tol) {
    if (change > tol && change >= previous_) {
      ++run_;
    } else {
      run_ = 0;
    }
    previous_ = change;
    return run_ >= window_;
  }

 private:
  int window_;
  int run_ = 0;
  double previous_ = std::numeric_limits<double>::infinity();
};

}  // namespace

// --- Hamiltonian -------------------------------------------------------------

Hamiltonian Hamiltonian::Exogenous(Matrix rate, double discount,
                                   std::function<double(const Belief&)> u) {
  Hamiltonian h;
  h.kind_ = HamiltonianKind::kExogenous;
  h.discount_ = discount;
  h.num_states_ = static_cast<int>(rate.rows());
  h.rate_ = std::move(rate);
  h.u_ = std::move(u);
  return h;
}

Hamiltonian Hamiltonian::FromSpec(const GameSpec& spec) {
  Hamiltonian h;
  h.spec_ = std::make_shared<const GameSpec>(spec);
  h.discount_ = spec.discount;
  h.num_states_ = spec.NumStates();
  h.action_independent_ = spec.rate.ActionIndependent();
  if (h.action_independent_) {
    h.kind_ = HamiltonianKind::kExogenous;
    h.rate_ = spec.rate.Generator(0, 0);
    auto shared = h.spec_;
    h.u_ = [shared](const Belief& p) { return AverageGameValue(*shared, p); };
  } else {
    h.kind_ = HamiltonianKind::kEndogenous;
  }
  return h;
}

Hamiltonian Hamiltonian::FromAbstract(const AbstractU& spec) {
  auto table = std::make_shared<ValueField>(BeliefGrid(spec.NumStates(), spec.grid_resolution));
  table->values = spec.values;
  return Exogenous(spec.rate, spec.discount,
                   [table](const Belief& p) { return (*table)(p); });
}

Hamiltonian Hamiltonian::TwoSided(const GameSpecTwoSided& spec) {
  if (spec.NumStates1() != 2 || spec.NumStates2() != 2) {
    throw HJError("two-sided solver needs two states on each side");
  }
  Hamiltonian h;
  h.kind_ = HamiltonianKind::kTwoSided;
  h.spec2_ = std::make_shared<const GameSpecTwoSided>(spec);
  h.discount_ = spec.discount;
  h.num_states_ = spec.NumStates1();
  h.num_states2_ = spec.NumStates2();
  h.action_independent_ = spec.RatesActionIndependent();
  return h;
}

Matrix Hamiltonian::HamiltonianMatrix(const Belief& p, const Vector& xi) const {
  if (kind_ == HamiltonianKind::kTwoSided) throw HJError("one-sided call on two-sided H");
  if (!spec_) {
    Matrix m(1, 1);
    m(0, 0) = -(rate_.transpose() * p).dot(xi) - discount_ * u_(p);
    return m;
  }
  const Matrix g = spec_->AverageGame(p);
  Matrix m(g.rows(), g.cols());
  for (int a = 0; a < m.rows(); ++a) {
    for (int b = 0; b < m.cols(); ++b) {
      m(a, b) = -(spec_->rate.Generator(a, b).transpose() * p).dot(xi) - discount_ * g(a, b);
    }
  }
  return m;
}

Saddle Hamiltonian::SaddleAt(const Belief& p, const Vector& xi) const {
  const MatrixGameSolution sol = SolveMatrixGame(-HamiltonianMatrix(p, xi));
  return {-sol.value, sol.x, sol.y};
}

double Hamiltonian::Eval(const Belief& p, const Vector& xi) const {
  if (kind_ == HamiltonianKind::kExogenous) {
    return -(rate_.transpose() * p).dot(xi) - discount_ * u_(p);
  }
  return SaddleAt(p, xi).value;
}

Matrix Hamiltonian::HamiltonianMatrix(const Belief& p1, const Belief& p2, const Vector& xi1,
                                      const Vector& xi2) const {
  if (kind_ != HamiltonianKind::kTwoSided) throw HJError("two-sided call on one-sided H");
  const Matrix g = spec2_->AverageGame(p1, p2);
  Matrix m(g.rows(), g.cols());
  for (int a = 0; a < m.rows(); ++a) {
    const double d1 = (spec2_->rate1[a].transpose() * p1).dot(xi1);
    for (int b = 0; b < m.cols(); ++b) {
      const double d2 = (spec2_->rate2[b].transpose() * p2).dot(xi2);
      m(a, b) = -d1 - d2 - discount_ * g(a, b);
    }
  }
  return m;
}

Saddle Hamiltonian::SaddleAt(const Belief& p1, const Belief& p2, const Vector& xi1,
                             const Vector& xi2) const {
  const MatrixGameSolution sol = SolveMatrixGame(-HamiltonianMatrix(p1, p2, xi1, xi2));
  return {-sol.value, sol.x, sol.y};
}

double Hamiltonian::Eval(const Belief& p1, const Belief& p2, const Vector& xi1,
                         const Vector& xi2) const {
  return SaddleAt(p1, p2, xi1, xi2).value;
}

double Hamiltonian::U(const Belief& p) const {
  if (kind_ == HamiltonianKind::kExogenous) return u_(p);
  if (kind_ == HamiltonianKind::kEndogenous) return AverageGameValue(*spec_, p);
  throw HJError("one-sided call on two-sided H");
}

double Hamiltonian::U(const Belief& p1, const Belief& p2) const {
  if (kind_ != HamiltonianKind::kTwoSided) throw HJError("two-sided call on one-sided H");
  return SolveMatrixGame(spec2_->AverageGame(p1, p2)).value;
}

Matrix Hamiltonian::MixedGenerator(const Vector& x, const Vector& y) const {
  if (kind_ == HamiltonianKind::kExogenous) return rate_;
  if (kind_ == HamiltonianKind::kTwoSided) throw HJError("one-sided call on two-sided H");
  Matrix out = Matrix::Zero(num_states_, num_states_);
  for (int a = 0; a < x.size(); ++a) {
    for (int b = 0; b < y.size(); ++b) {
      const double w = x(a) * y(b);
      if (w != 0.0) out += w * spec_->rate.Generator(a, b);
    }
  }
  return out;
}

Matrix Hamiltonian::MixedGenerator1(const Vector& x) const {
  Matrix out = Matrix::Zero(num_states_, num_states_);
  for (int a = 0; a < x.size(); ++a) out += x(a) * spec2_->rate1[a];
  return out;
}

Matrix Hamiltonian::MixedGenerator2(const Vector& y) const {
  Matrix out = Matrix::Zero(num_states2_, num_states2_);
  for (int b = 0; b < y.size(); ++b) out += y(b) * spec2_->rate2[b];
  return out;
}

std::vector<Matrix> Hamiltonian::GeneratorFamily() const {
  if (kind_ == HamiltonianKind::kExogenous) return {rate_};
  std::vector<Matrix> out;
  for (const auto& row : spec_->rate.endogenous) {
    for (const Matrix& g : row) out.push_back(g);
  }
  return out;
}

std::vector<Matrix> Hamiltonian::GeneratorFamily1() const { return spec2_->rate1; }
std::vector<Matrix> Hamiltonian::GeneratorFamily2() const { return spec2_->rate2; }

double Hamiltonian::LipschitzBound(const Belief& p) const {
  double c = 0.0;
  for (const Matrix& g : GeneratorFamily()) c = std::max(c, (g.transpose() * p).norm());
  return c;
}

// --- One-sided scheme ------------------------------------------------------

Vector GridGradient(const ValueField& f, int index) {
  const BeliefGrid& grid = f.grid;
  const int dim = grid.dim();
  const double m = grid.resolution();
  const auto c = grid.Coords(index);
  Vector xi = Vector::Zero(dim);
  for (int k = 0; k + 1 < dim; ++k) {
    const int di = k == 0 ? 1 : 0;
    const int dj = k == 1 ? 1 : 0;
    const int fwd = grid.Index(c[0] + di, c[1] + dj);
    const int bwd = grid.Index(c[0] - di, c[1] - dj);
    if (fwd >= 0 && bwd >= 0) {
      xi(k) = (f.values[fwd] - f.values[bwd]) * m / 2.0;
    } else if (fwd >= 0) {
      xi(k) = (f.values[fwd] - f.values[index]) * m;
    } else if (bwd >= 0) {
      xi(k) = (f.values[index] - f.values[bwd]) * m;
    } else {
      // Vertex of the triangle: neither neighbour along this axis exists, so
      // take the forward difference from the point one step along the other.
      const int bi = c[0] - (1 - di), bj = c[1] - (1 - dj);
      const int base = grid.Index(bi, bj);
      const int ahead = grid.Index(bi + di, bj + dj);
      if (base >= 0 && ahead >= 0) xi(k) = (f.values[ahead] - f.values[base]) * m;
    }
  }
  return xi;
}

ObstacleField SolveObstacle(const Hamiltonian& h, const BeliefGrid& grid,
                            const SchemeConfig& config) {
  if (h.kind() == HamiltonianKind::kTwoSided) {
    throw HJError("use SolveDoubleObstacle for two-sided games");
  }
  if (grid.dim() != h.num_states()) throw HJError("grid dimension does not match the game");
  if (grid.dim() < 2 || grid.dim() > 3) throw HJError("obstacle solver supports 2 or 3 states");
  const double r = h.discount();
  const int n = grid.size();
  const bool frozen = h.kind() == HamiltonianKind::kExogenous;

  std::vector<Belief> points(n);
  for (int i = 0; i < n; ++i) points[i] = grid.Point(i);

  // Tabulated u and, for exogenous rates, the fixed upwind stencil.
  std::vector<double> u(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n; ++i) u[i] = h.U(points[i]);
  std::vector<std::array<Move, 3>> moves(n);
  std::vector<int> move_count(n, 0);
  std::vector<double> payoff = u;
  if (frozen) {
    const Matrix g = h.MixedGenerator(Vector(), Vector());
    for (int i = 0; i < n; ++i) move_count[i] = BuildMoves(grid, i, points[i], g, &moves[i]);
  }

  ObstacleField out;
  out.dtau = PseudoTimeStep(r, MaxStencilWeight(grid, h.GeneratorFamily()), config.cfl);
  if (config.initial.has_value()) {
    if (config.initial->grid.size() != n) throw HJError("initial field has the wrong grid");
    out.field = *config.initial;
  } else {
    ValueField uf(grid);
    uf.values = u;
    out.field = Cav(uf);
  }
  out.tags.assign(n, ActiveTag::kPde);

  ValueField stepped(grid);
  OscillationDetector detector(config.oscillation_window);
  const double dt = out.dtau;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const std::vector<double>& v = out.field.values;
    if (!frozen) {
#pragma omp parallel for schedule(dynamic, 16)
      for (int i = 0; i < n; ++i) {
        const Saddle sad = h.SaddleAt(points[i], GridGradient(out.field, i));
        const Matrix g = h.MixedGenerator(sad.x, sad.y);
        move_count[i] = BuildMoves(grid, i, points[i], g, &moves[i]);
        // -H at the saddle equals <drift, xi> + r g(p, x*, y*).
        const Vector drift = g.transpose() * points[i];
        payoff[i] = (-sad.value - drift.dot(GridGradient(out.field, i))) / r;
      }
    }
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      double adv = 0.0;
      for (int k = 0; k < move_count[i]; ++k) {
        adv += moves[i][k].coef * (v[moves[i][k].neighbor] - v[i]);
      }
      stepped.values[i] = v[i] - dt * (r * v[i] - adv - r * payoff[i]);
    }
    ValueField next = Cav(stepped);
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      change = std::max(change, std::abs(next.values[i] - v[i]));
      out.tags[i] = next.values[i] - stepped.values[i] > config.obstacle_threshold
                        ? ActiveTag::kObstacle
                        : ActiveTag::kPde;
    }
    out.field = std::move(next);
    out.iterations = it;
    out.last_change = change;
    if (change <= config.tolerance) {
      out.converged = true;
      break;
    }
    if (detector.Update(change, config.tolerance)) {
      out.oscillation = true;
      break;
    }
  }
  return out;
}

ResidualReport ResidualCheck(const ObstacleField& field, const Hamiltonian& h) {
  ResidualReport report;
  const BeliefGrid& grid = field.field.grid;
  const double r = h.discount();
  for (int i = 0; i < grid.size(); ++i) {
    const double res =
        r * field.field.values[i] + h.Eval(grid.Point(i), GridGradient(field.field, i));
    if (field.tags[i] == ActiveTag::kPde) {
      if (std::abs(res) > report.worst_pde) {
        report.worst_pde = std::abs(res);
        report.worst_pde_index = i;
      }
    } else if (-res > report.worst_obstacle) {
      report.worst_obstacle = -res;
      report.worst_obstacle_index = i;
    }
  }
  return report;
}

// --- Two-sided scheme ------------------------------------------------------

double DoubleObstacleField::operator()(double p1, double p2) const {
  const double x = std::clamp(p1, 0.0, 1.0) * grid.m1;
  const double y = std::clamp(p2, 0.0, 1.0) * grid.m2;
  const int i = std::clamp(static_cast<int>(std::floor(x)), 0, grid.m1 - 1);
  const int j = std::clamp(static_cast<int>(std::floor(y)), 0, grid.m2 - 1);
  const double fx = x - i;
  const double fy = y - j;
  return (1 - fx) * (1 - fy) * At(i, j) + fx * (1 - fy) * At(i + 1, j) +
         (1 - fx) * fy * At(i, j + 1) + fx * fy * At(i + 1, j + 1);
}

DoubleObstacleField SolveDoubleObstacle(const Hamiltonian& h, const ProductGrid& grid,
                                        const DoubleObstacleConfig& config) {
  if (h.kind() != HamiltonianKind::kTwoSided) throw HJError("two-sided Hamiltonian required");
  if (grid.m1 < 2 || grid.m2 < 2) throw HJError("two-sided grid needs resolution >= 2");
  const double r = h.discount();
  const int n = grid.size();
  const int m1 = grid.m1;
  const int m2 = grid.m2;
  const bool frozen = h.ActionIndependent();

  std::vector<Belief> p1(m1 + 1), p2(m2 + 1);
  for (int i = 0; i <= m1; ++i) p1[i] = TwoPoint(static_cast<double>(i) / m1);
  for (int j = 0; j <= m2; ++j) p2[j] = TwoPoint(static_cast<double>(j) / m2);

  std::vector<double> u(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (int k = 0; k < n; ++k) u[k] = h.U(p1[k / (m2 + 1)], p2[k % (m2 + 1)]);

  // Net flux out of the first state, per side: f > 0 moves p down one cell.
  auto flux = [](const Belief& p, const Matrix& g) { return p(0) * g(0, 1) - p(1) * g(1, 0); };
  std::vector<double> f1(n, 0.0), f2(n, 0.0), payoff = u;
  auto max_flux = [&](const std::vector<Matrix>& family, const std::vector<Belief>& pts) {
    double worst = 0.0;
    for (const Belief& p : pts) {
      for (const Matrix& g : family) worst = std::max(worst, std::abs(flux(p, g)));
    }
    return worst;
  };
  const double weight = max_flux(h.GeneratorFamily1(), p1) * m1 +
                        max_flux(h.GeneratorFamily2(), p2) * m2;
  if (frozen) {
    const Matrix g1 = h.GeneratorFamily1()[0];
    const Matrix g2 = h.GeneratorFamily2()[0];
    for (int k = 0; k < n; ++k) {
      f1[k] = flux(p1[k / (m2 + 1)], g1);
      f2[k] = flux(p2[k % (m2 + 1)], g2);
    }
  }

  DoubleObstacleField out;
  out.grid = grid;
  out.dtau = PseudoTimeStep(r, weight, config.cfl);
  out.values = u;
  out.tags.assign(n, ActiveTag::kPde);
  std::vector<double> stepped(n), projected(n);
  std::vector<double> line1(m1 + 1), line2(m2 + 1);
  OscillationDetector detector(config.oscillation_window);
  const double dt = out.dtau;

  auto gradient = [&](const std::vector<double>& v, int i, int j, Vector* xi1, Vector* xi2) {
    *xi1 = Vector::Zero(2);
    *xi2 = Vector::Zero(2);
    const int ip = std::min(i + 1, m1), im = std::max(i - 1, 0);
    const int jp = std::min(j + 1, m2), jm = std::max(j - 1, 0);
    (*xi1)(0) = (v[grid.Index(ip, j)] - v[grid.Index(im, j)]) * m1 / (ip - im);
    (*xi2)(0) = (v[grid.Index(i, jp)] - v[grid.Index(i, jm)]) * m2 / (jp - jm);
  };

  auto project_cav = [&](std::vector<double>* w) {
    for (int j = 0; j <= m2; ++j) {
      for (int i = 0; i <= m1; ++i) line1[i] = (*w)[grid.Index(i, j)];
      const auto hull = ConcaveMajorant1D(line1);
      for (int i = 0; i <= m1; ++i) (*w)[grid.Index(i, j)] = hull[i];
    }
  };
  auto project_vex = [&](std::vector<double>* w) {
    for (int i = 0; i <= m1; ++i) {
      for (int j = 0; j <= m2; ++j) line2[j] = (*w)[grid.Index(i, j)];
      const auto hull = ConvexMinorant1D(line2);
      for (int j = 0; j <= m2; ++j) (*w)[grid.Index(i, j)] = hull[j];
    }
  };

  for (int it = 1; it <= config.max_iterations; ++it) {
    const std::vector<double>& v = out.values;
    if (!frozen) {
#pragma omp parallel for schedule(dynamic, 16)
      for (int k = 0; k < n; ++k) {
        const int i = k / (m2 + 1), j = k % (m2 + 1);
        Vector xi1, xi2;
        gradient(v, i, j, &xi1, &xi2);
        const Saddle sad = h.SaddleAt(p1[i], p2[j], xi1, xi2);
        const Matrix g1 = h.MixedGenerator1(sad.x);
        const Matrix g2 = h.MixedGenerator2(sad.y);
        f1[k] = flux(p1[i], g1);
        f2[k] = flux(p2[j], g2);
        const double drift = (g1.transpose() * p1[i]).dot(xi1) + (g2.transpose() * p2[j]).dot(xi2);
        payoff[k] = (-sad.value - drift) / r;
      }
    }
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n; ++k) {
      const int i = k / (m2 + 1), j = k % (m2 + 1);
      double adv = 0.0;
      if (f1[k] > 0.0 && i > 0) adv += f1[k] * m1 * (v[grid.Index(i - 1, j)] - v[k]);
      if (f1[k] < 0.0 && i < m1) adv -= f1[k] * m1 * (v[grid.Index(i + 1, j)] - v[k]);
      if (f2[k] > 0.0 && j > 0) adv += f2[k] * m2 * (v[grid.Index(i, j - 1)] - v[k]);
      if (f2[k] < 0.0 && j < m2) adv -= f2[k] * m2 * (v[grid.Index(i, j + 1)] - v[k]);
      stepped[k] = v[k] - dt * (r * v[k] - adv - r * payoff[k]);
    }
    projected = stepped;
    if (config.order == ProjectionOrder::kCavThenVex) {
      project_cav(&projected);
      project_vex(&projected);
    } else {
      project_vex(&projected);
      project_cav(&projected);
    }
    double change = 0.0;
    for (int k = 0; k < n; ++k) {
      change = std::max(change, std::abs(projected[k] - v[k]));
      out.tags[k] = std::abs(projected[k] - stepped[k]) > config.obstacle_threshold
                        ? ActiveTag::kObstacle
                        : ActiveTag::kPde;
    }
    out.values.swap(projected);
    out.iterations = it;
    out.last_change = change;
    if (change <= config.tolerance) {
      out.converged = true;
      break;
    }
    if (detector.Update(change, config.tolerance)) {
      out.oscillation = true;
      out.diagnostics = "projections cycled for " + std::to_string(config.oscillation_window) +
                        " rounds with sup-norm change " + std::to_string(change) +
                        " at iteration " + std::to_string(it);
      break;
    }
  }

  for (int j = 0; j <= m2; ++j) {
    for (int i = 1; i < m1; ++i) {
      const double d2 = out.At(i - 1, j) - 2 * out.At(i, j) + out.At(i + 1, j);
      out.concavity_violation = std::max(out.concavity_violation, d2);
    }
  }
  for (int i = 0; i <= m1; ++i) {
    for (int j = 1; j < m2; ++j) {
      const double d2 = out.At(i, j - 1) - 2 * out.At(i, j) + out.At(i, j + 1);
      out.convexity_violation = std::max(out.convexity_violation, -d2);
    }
  }
  return out;
}

}  // namespace asymgame
