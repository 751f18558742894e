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


#include "asymgame/chain.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>

namespace asymgame {
namespace {

// Coefficients of the (6,6) Pade approximant to exp.
constexpr std::array<double, 7> kPade6 = {
    1.0,
    1.0 / 2.0,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
};

void ProjectStochastic(Matrix* p) {
  for (int i = 0; i < p->rows(); ++i) {
    auto row = p->row(i);
    row = row.cwiseMax(0.0);
    const double s = row.sum();
    if (s > 0.0) row /= s;
  }
}

void ProjectSimplex(Belief* p) {
  *p = p->cwiseMax(0.0);
  const double s = p->sum();
  if (s > 0.0) *p /= s;
}

std::vector<bool> Reachable(const Matrix& r, bool reverse) {
  const int n = static_cast<int>(r.rows());
  std::vector<bool> seen(n, false);
  std::vector<int> stack = {0};
  seen[0] = true;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      const double rate = reverse ? r(j, i) : r(i, j);
      if (j != i && rate > 0.0 && !seen[j]) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

int SampleJumpTarget(const Matrix& r, int s, double total, Rng& rng) {
  const double target = Uniform01(rng) * total;
  double acc = 0.0;
  int last = s;
  for (int j = 0; j < r.cols(); ++j) {
    if (j == s || r(s, j) <= 0.0) continue;
    acc += r(s, j);
    last = j;
    if (target < acc) return j;
  }
  return last;
}

}  // namespace

Matrix MatrixExponential(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix x = a / std::ldexp(1.0, squarings);
  const Matrix id = Matrix::Identity(n, n);
  Matrix power = id;
  Matrix num = kPade6[0] * id;
  Matrix den = kPade6[0] * id;
  for (int k = 1; k < static_cast<int>(kPade6.size()); ++k) {
    power = power * x;
    num += kPade6[k] * power;
    den += ((k % 2) ? -kPade6[k] : kPade6[k]) * power;
  }
  Matrix f = den.partialPivLu().solve(num);
  for (int i = 0; i < squarings; ++i) f = f * f;
  return f;
}

Matrix Transition(const Matrix& r, double t) {
  if (!(t >= 0.0)) throw ChainError("transition: negative time " + std::to_string(t));
  if (t == 0.0) return Matrix::Identity(r.rows(), r.cols());
  Matrix p = MatrixExponential(t * r);
  ProjectStochastic(&p);
  return p;
}

Belief BeliefFlow(const Matrix& r, const Belief& p, double t) {
  Belief q = Transition(r, t).transpose() * p;
  ProjectSimplex(&q);
  return q;
}

bool IsIrreducible(const Matrix& r) {
  if (r.rows() <= 1) return true;
  const auto fwd = Reachable(r, false);
  const auto bwd = Reachable(r, true);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

Belief InvariantMeasure(const Matrix& r) {
  const int n = static_cast<int>(r.rows());
  if (!IsIrreducible(r)) {
    throw ChainError("invariant measure: generator is reducible, stationary law not unique");
  }
  Matrix a = r.transpose();
  a.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  Belief pi = a.fullPivLu().solve(rhs);
  ProjectSimplex(&pi);
  return pi;
}

std::uint64_t HashMatrix(const Matrix& m) {
  std::string bytes(sizeof(double) * m.size() + 2 * sizeof(Eigen::Index), '\0');
  const Eigen::Index dims[2] = {m.rows(), m.cols()};
  std::memcpy(bytes.data(), dims, sizeof(dims));
  std::memcpy(bytes.data() + sizeof(dims), m.data(), sizeof(double) * m.size());
  return Fnv1a(bytes);
}

Matrix SemigroupCache::Get(const Matrix& r, double t) {
  const Key key{HashMatrix(r), std::bit_cast<std::uint64_t>(t)};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end() && it->second.generator == r) return it->second.transition;
  }
  Matrix p = Transition(r, t);
  std::lock_guard<std::mutex> lock(mu_);
  entries_.insert_or_assign(key, Entry{r, p});
  return p;
}

std::size_t SemigroupCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

void SemigroupCache::Clear() {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.clear();
}

SemigroupCache& GlobalSemigroupCache() {
  static SemigroupCache* cache = new SemigroupCache();
  return *cache;
}

double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double Exponential(Rng& rng, double rate) {
  return -std::log1p(-Uniform01(rng)) / rate;
}

std::uint64_t PathSeed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

int ChainPath::StateAt(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto idx = std::max<std::ptrdiff_t>(0, (it - times.begin()) - 1);
  return states[idx];
}

ChainPath SamplePath(const Matrix& r, int s0, double horizon, Rng& rng) {
  ChainPath path;
  path.horizon = horizon;
  path.times.push_back(0.0);
  path.states.push_back(s0);
  double t = 0.0;
  int s = s0;
  while (true) {
    const double total = -r(s, s);
    if (total <= 0.0) break;
    t += Exponential(rng, total);
    if (t >= horizon) break;
    s = SampleJumpTarget(r, s, total, rng);
    path.times.push_back(t);
    path.states.push_back(s);
  }
  return path;
}

ChainPath SamplePath(const RateData& rate, const ActionSchedule& schedule,
                     int s0, double horizon, Rng& rng) {
  ChainPath path;
  path.horizon = horizon;
  path.times.push_back(0.0);
  path.states.push_back(s0);
  int s = s0;
  const int segments = static_cast<int>(schedule.start.size());
  for (int k = 0; k < segments; ++k) {
    const double begin = schedule.start[k];
    if (begin >= horizon) break;
    const double end = std::min(horizon, k + 1 < segments ? schedule.start[k + 1] : horizon);
    const Matrix& r = rate.Generator(schedule.a[k], schedule.b[k]);
    double t = begin;
    while (true) {
      const double total = -r(s, s);
      if (total <= 0.0) break;
      t += Exponential(rng, total);
      if (t >= end) break;
      s = SampleJumpTarget(r, s, total, rng);
      path.times.push_back(t);
      path.states.push_back(s);
    }
  }
  return path;
}

}  // namespace asymgame
