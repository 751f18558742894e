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

#ifndef ASYMGAME_GAME_MODEL_H_
#define ASYMGAME_GAME_MODEL_H_

// Game-instance data shared by every solver, plus the JSON interchange
// format. Payoff units are dimensionless; the discount rate r has units of
// inverse time, as do all transition rates.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace asymgame {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A point of the simplex over a finite state set. Entry s is the probability
// of state s. Beliefs are plain vectors; Validate* helpers enforce the
// simplex invariant where data enters the system.
using Belief = Eigen::VectorXd;

inline constexpr double kBeliefTolerance = 1e-12;
inline constexpr double kRenormalizeTolerance = 1e-9;
inline constexpr double kRateTolerance = 1e-12;

enum class RateKind { kExogenous, kEndogenous };

// Generator of the state chain. Exogenous generators are a single |S|x|S|
// matrix; endogenous ones carry one matrix per action pair (a, b).
struct RateData {
  RateKind kind = RateKind::kExogenous;
  Matrix exogenous;
  // endogenous[a][b] is the generator R(.,.;a,b).
  std::vector<std::vector<Matrix>> endogenous;

  const Matrix& Generator(int a, int b) const {
    return kind == RateKind::kExogenous ? exogenous : endogenous[a][b];
  }
  // True when no entry depends on the action pair.
  bool ActionIndependent() const;
};

struct GameSpec {
  std::vector<std::string> states;
  std::vector<std::string> actions1;
  std::vector<std::string> actions2;
  // payoff[s](a, b) = g(s, a, b), paid by player 2 to player 1.
  std::vector<Matrix> payoff;
  RateData rate;
  double discount = 1.0;
  Belief initial_belief;

  int NumStates() const { return static_cast<int>(states.size()); }
  int NumActions1() const { return static_cast<int>(actions1.size()); }
  int NumActions2() const { return static_cast<int>(actions2.size()); }

  // g(p, ., .) = sum_s p(s) g(s, ., .).
  Matrix AverageGame(const Belief& p) const;
  double MaxAbsPayoff() const;
};

// Incomplete information on both sides: player i observes and controls the
// chain on S^i.
struct GameSpecTwoSided {
  std::vector<std::string> states1;
  std::vector<std::string> states2;
  std::vector<std::string> actions1;
  std::vector<std::string> actions2;
  // payoff[s1][s2](a, b).
  std::vector<std::vector<Matrix>> payoff;
  // rate1[a] is R^1(.,.;a); rate2[b] is R^2(.,.;b).
  std::vector<Matrix> rate1;
  std::vector<Matrix> rate2;
  double discount = 1.0;
  Belief initial_belief1;
  Belief initial_belief2;

  int NumStates1() const { return static_cast<int>(states1.size()); }
  int NumStates2() const { return static_cast<int>(states2.size()); }
  int NumActions1() const { return static_cast<int>(actions1.size()); }
  int NumActions2() const { return static_cast<int>(actions2.size()); }

  Matrix AverageGame(const Belief& p1, const Belief& p2) const;
  bool RatesActionIndependent() const;
};

// A game given directly through its one-shot value function u, sampled on the
// regular simplex grid of resolution grid_resolution (see envelope.h for the
// point ordering). Used for instances whose payoff matrix is not available.
struct AbstractU {
  std::vector<std::string> states;
  Matrix rate;  // exogenous generator
  double discount = 1.0;
  Belief initial_belief;
  int grid_resolution = 0;
  std::vector<double> values;

  int NumStates() const { return static_cast<int>(states.size()); }
};

using AnySpec = std::variant<GameSpec, GameSpecTwoSided, AbstractU>;

struct Violation {
  std::string field;
  std::string message;
};

class SpecError : public std::runtime_error {
 public:
  enum class Kind { kParse, kValidation, kDimension, kIo };
  SpecError(Kind kind, const std::string& what,
            std::vector<Violation> violations = {})
      : std::runtime_error(what),
        kind_(kind),
        violations_(std::move(violations)) {}
  Kind kind() const { return kind_; }
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  Kind kind_;
  std::vector<Violation> violations_;
};

// Total functions: an empty result means every invariant holds.
std::vector<Violation> Validate(const GameSpec& spec);
std::vector<Violation> Validate(const GameSpecTwoSided& spec);
std::vector<Violation> Validate(const AbstractU& spec);
std::vector<Violation> Validate(const AnySpec& spec);

// Appends generator violations (row sums, off-diagonal signs) for `r`.
void ValidateGenerator(const Matrix& r, const std::string& field,
                       std::vector<Violation>* out);
void ValidateBelief(const Belief& p, int dim, const std::string& field,
                    std::vector<Violation>* out);

// Throws SpecError on malformed input or violated invariants. Beliefs within
// kRenormalizeTolerance of the simplex are renormalized.
AnySpec ParseSpec(const nlohmann::json& doc);
AnySpec LoadSpec(const std::filesystem::path& path);

nlohmann::json ToJson(const AnySpec& spec);
void SaveSpec(const std::filesystem::path& path, const AnySpec& spec);

std::string FormatViolations(const std::vector<Violation>& violations);

// Stable 64-bit FNV-1a digest, used for run manifests and cache keys.
std::uint64_t Fnv1a(const std::string& bytes);

}  // namespace asymgame

#endif  // ASYMGAME_GAME_MODEL_H_
