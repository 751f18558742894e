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


#ifndef ASYMGAME_CHAIN_H_
#define ASYMGAME_CHAIN_H_

// Continuous-time Markov chain tools: P_t = exp(tR), the belief flow
// p*_t = P_t^T p, invariant measures and exact path sampling.

#include <cstdint>
#include <mutex>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "asymgame/game_model.h"

namespace asymgame {

class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// exp(tR) by scaling and squaring with a diagonal (6,6) Pade approximant.
// Round-off negatives are clamped to zero and rows renormalized, so the result
// is exactly row-stochastic in floating point. Throws ChainError if t < 0.
Matrix Transition(const Matrix& r, double t);

// Unprojected matrix exponential (any square matrix).
Matrix MatrixExponential(const Matrix& a);

// p*_t = P_t^T p, projected back onto the simplex.
Belief BeliefFlow(const Matrix& r, const Belief& p, double t);

// True when the directed graph of positive off-diagonal rates is strongly
// connected.
bool IsIrreducible(const Matrix& r);

// Unique pi with R^T pi = 0 and sum(pi) = 1. Throws ChainError if R is
// reducible.
Belief InvariantMeasure(const Matrix& r);

// Thread-safe memo of P_t keyed on (hash of R, exact t).
class SemigroupCache {
 public:
  Matrix Get(const Matrix& r, double t);
  std::size_t size() const;
  void Clear();

 private:
  struct Key {
    std::uint64_t hash;
    std::uint64_t t_bits;
    bool operator==(const Key& o) const {
      return hash == o.hash && t_bits == o.t_bits;
    }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return static_cast<std::size_t>(k.hash ^ (k.t_bits * 0x9E3779B97F4A7C15ull));
    }
  };
  struct Entry {
    Matrix generator;
    Matrix transition;
  };
  mutable std::mutex mu_;
  std::unordered_map<Key, Entry, KeyHash> entries_;
};

// Process-wide cache used by the solvers.
SemigroupCache& GlobalSemigroupCache();
std::uint64_t HashMatrix(const Matrix& m);

// --- Sampling ---------------------------------------------------------------

using Rng = std::mt19937_64;

// Uniform on [0, 1) with 53 random bits; identical on every platform.
double Uniform01(Rng& rng);
// Exponential with the given rate via inversion.
double Exponential(Rng& rng, double rate);
// Independent per-path seed derived from a master seed (splitmix64).
std::uint64_t PathSeed(std::uint64_t seed, std::uint64_t index);

// One trajectory on [0, horizon]. times[0] = 0 and states[i] is the state on
// [times[i], times[i+1]) (the last segment ends at horizon).
struct ChainPath {
  std::vector<double> times;
  std::vector<int> states;
  double horizon = 0.0;

  int StateAt(double t) const;
  int NumJumps() const { return static_cast<int>(times.size()) - 1; }
};

// Gillespie simulation under a fixed generator.
ChainPath SamplePath(const Matrix& r, int s0, double horizon, Rng& rng);

// Piecewise-constant action schedule: on [start[i], start[i+1]) the pair
// (a[i], b[i]) is played. start[0] must be 0.
struct ActionSchedule {
  std::vector<double> start;
  std::vector<int> a;
  std::vector<int> b;
};

// Gillespie simulation for action-dependent generators. Holding times restart
// at schedule switches, which is exact by memorylessness.
ChainPath SamplePath(const RateData& rate, const ActionSchedule& schedule,
                     int s0, double horizon, Rng& rng);

}  // namespace asymgame

#endif  // ASYMGAME_CHAIN_H_
