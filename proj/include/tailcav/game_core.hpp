// Copyright 2026 The tailcav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Game model for zero-sum repeated games with incomplete information on one
// side: the state of nature is drawn once from the prior and told only to
// Player I. Histories are public.

#ifndef TAILCAV_GAME_CORE_HPP_
#define TAILCAV_GAME_CORE_HPP_

#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace tailcav {

enum class ErrorCode {
  kValidation,
  kUnsupportedOracle,
  kNullHistory,
  kNotLassoEvaluable,
  kInfeasiblePlan,
  kDegenerateGrid,
  kOutOfDomain,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Simplex membership tolerance for beliefs and mixed actions.
inline constexpr double kProbabilityTolerance = 1e-12;

// Off-turn action under alternating timing.
inline constexpr int kDummy = -1;

enum class Timing { kSimultaneous, kAlternating };

// Who chooses an action at a given stage.
enum class Mover { kBoth, kPlayerI, kPlayerII };

// A probability vector over the states of nature.
class Belief {
 public:
  // Throws Error(kValidation) unless entries are >= 0 and sum to 1 within
  // kProbabilityTolerance.
  explicit Belief(Eigen::VectorXd weights);
  Belief(std::initializer_list<double> weights);

  // Divides nonnegative weights by their sum. Throws Error(kNullHistory) if
  // the sum is zero.
  static Belief Normalized(const Eigen::VectorXd& weights);
  static Belief Vertex(Eigen::Index num_states, Eigen::Index k);
  static Belief Uniform(Eigen::Index num_states);
  // Two-state belief (p, 1 - p); p is the probability of the first state.
  static Belief TwoState(double p);

  Eigen::Index size() const { return weights_.size(); }
  double operator[](Eigen::Index k) const { return weights_[k]; }
  const Eigen::VectorXd& weights() const { return weights_; }

  double L1Distance(const Belief& other) const;

  friend bool operator==(const Belief& a, const Belief& b) {
    return a.weights_ == b.weights_;
  }

 private:
  Eigen::VectorXd weights_;
};

struct ActionPair {
  int i = 0;
  int j = 0;
  friend auto operator<=>(const ActionPair&, const ActionPair&) = default;
};

class PublicHistory {
 public:
  PublicHistory() = default;
  PublicHistory(std::initializer_list<ActionPair> pairs) : pairs_(pairs) {}
  explicit PublicHistory(std::vector<ActionPair> pairs)
      : pairs_(std::move(pairs)) {}

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const ActionPair& operator[](std::size_t t) const { return pairs_[t]; }
  void push_back(ActionPair pair) { pairs_.push_back(pair); }
  void reserve(std::size_t n) { pairs_.reserve(n); }
  std::span<const ActionPair> pairs() const { return pairs_; }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  // First n pairs (n clipped to size()).
  PublicHistory Prefix(std::size_t n) const;
  PublicHistory Slice(std::size_t from, std::size_t to) const;

  friend bool operator==(const PublicHistory&, const PublicHistory&) = default;

 private:
  std::vector<ActionPair> pairs_;
};

PublicHistory Concat(const PublicHistory& h, const PublicHistory& h2);

// Ultimately periodic infinite play: prefix, then cycle repeated forever.
class LassoPlay {
 public:
  // Throws Error(kValidation) on an empty cycle.
  LassoPlay(PublicHistory prefix, PublicHistory cycle);

  const PublicHistory& prefix() const { return prefix_; }
  const PublicHistory& cycle() const { return cycle_; }
  // Pair played at stage t of the infinite play.
  const ActionPair& At(std::size_t t) const;

 private:
  PublicHistory prefix_;
  PublicHistory cycle_;
};

// First t pairs of the infinite play denoted by the lasso.
PublicHistory Unroll(const LassoPlay& lasso, std::size_t t);

struct GameSpec {
  std::vector<std::string> states;
  std::vector<std::string> actions_i;
  std::vector<std::string> actions_j;
  Eigen::VectorXd prior;
  Timing timing = Timing::kSimultaneous;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_actions_i() const { return static_cast<int>(actions_i.size()); }
  int num_actions_j() const { return static_cast<int>(actions_j.size()); }

  Mover MoverAt(std::size_t stage) const {
    if (timing == Timing::kSimultaneous) return Mover::kBoth;
    return stage % 2 == 0 ? Mover::kPlayerI : Mover::kPlayerII;
  }
  // Number of stages after which the move pattern repeats.
  std::size_t period() const {
    return timing == Timing::kAlternating ? 2 : 1;
  }

  // Index lookups; throw Error(kValidation) on unknown names.
  int StateIndex(std::string_view name) const;
  int ActionI(std::string_view name) const;
  int ActionJ(std::string_view name) const;

  // Prior as a validated Belief.
  Belief PriorBelief() const { return Belief(prior); }
};

struct ValidationReport {
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

ValidationReport ValidateSpec(const GameSpec& spec);

// Throws Error(kValidation) listing every violation.
void RequireValid(const GameSpec& spec);

// Checks action ranges and, under alternating timing, that the off-turn
// coordinate of every pair is the dummy action. `first_stage` is the stage
// index of h[0].
ValidationReport ValidateHistory(const GameSpec& spec, const PublicHistory& h,
                                 std::size_t first_stage = 0);

// Game of the examples: K = {k1, k2}, I = J = {l, r}, alternating moves.
GameSpec Example1Spec(double p_k1 = 0.5);

}  // namespace tailcav

#endif  // TAILCAV_GAME_CORE_HPP_
