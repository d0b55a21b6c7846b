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

// Strategy representation.
//
// A strategy is an immutable object shared across episodes. Each episode
// starts its own Agent, which consumes the public history one pair at a time
// and returns the mixed action at the current stage. An agent's output is a
// deterministic function of the history it has observed (and of the state,
// for Player I), so the functional form sigma(k, h) is recovered by replay;
// the simulator does all sampling. Agents may refer into their strategy,
// which must outlive them.

#ifndef TAILCAV_STRATEGY_HPP_
#define TAILCAV_STRATEGY_HPP_

#include <cstdint>
#include <cstring>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tailcav/game_core.hpp"

namespace tailcav {

using Distribution = Eigen::VectorXd;

// Memory state of a finite-memory agent. Two agents of the same strategy
// with equal keys behave identically on every continuation.
using MemoryKey = std::vector<std::uint64_t>;

inline void AppendKey(MemoryKey& key, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  key.push_back(bits);
}
inline void AppendKey(MemoryKey& key, const Eigen::VectorXd& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) AppendKey(key, v[k]);
}
inline void AppendKey(MemoryKey& key, const MemoryKey& sub) {
  key.push_back(sub.size());
  key.insert(key.end(), sub.begin(), sub.end());
}

struct BlockTrace;

class Agent {
 public:
  virtual ~Agent() = default;

  // Mixed action at the current stage. Called only on the owner's turns;
  // the reference stays valid until the next Next() or Observe().
  virtual const Distribution& Next() = 0;
  // Called once per stage with the realized pair, on every stage.
  virtual void Observe(const ActionPair& pair) = 0;
  // Empty when the agent has no finite-memory form.
  virtual std::optional<MemoryKey> Memory() const { return std::nullopt; }
  // Belief and block trace, for agents that track Player II's posterior.
  virtual const BlockTrace* Trace() const { return nullptr; }
};

class InformedStrategy {
 public:
  virtual ~InformedStrategy() = default;
  virtual std::unique_ptr<Agent> Start(int state) const = 0;
  virtual std::string Describe() const = 0;
};

class UninformedStrategy {
 public:
  virtual ~UninformedStrategy() = default;
  virtual std::unique_ptr<Agent> Start() const = 0;
  virtual std::string Describe() const = 0;
};

using InformedPtr = std::shared_ptr<const InformedStrategy>;
using UninformedPtr = std::shared_ptr<const UninformedStrategy>;

// sigma(k, h): the mixed action Player I would choose after h, by replay.
Distribution Behavior(const InformedStrategy& sigma, int state,
                      const PublicHistory& h);
// tau(h).
Distribution Behavior(const UninformedStrategy& tau, const PublicHistory& h);

Distribution PureAction(int num_actions, int action);
bool IsPure(const Distribution& dist);

// Throws Error(kValidation) unless entries are >= 0 and sum to 1 within
// kProbabilityTolerance.
void RequireDistribution(const Distribution& dist, const std::string& what);

// History-independent strategies; one memory state. StationaryNonRevealing
// plays the same mixed action in every state.
InformedPtr StationaryPerState(std::vector<Distribution> per_state);
InformedPtr StationaryNonRevealing(Distribution dist);
UninformedPtr Stationary(Distribution dist);

// Deterministic-transition, possibly randomized-output finite automaton.
class MachineTable {
 public:
  // Matches any action, including the dummy, in SetTransition.
  static constexpr int kAny = -2;

  // Every memory state outputs `initial_output` and loops on every pair
  // until configured otherwise.
  MachineTable(int num_memory, int num_actions_i, int num_actions_j,
               const Distribution& initial_output);

  void SetOutput(int memory, Distribution dist);
  // Later calls override earlier ones on the pairs they match.
  void SetTransition(int memory, int i, int j, int to);
  void SetInitial(int memory);

  int num_memory() const { return static_cast<int>(outputs_.size()); }
  int initial() const { return initial_; }
  const Distribution& Output(int memory) const { return outputs_[memory]; }
  int Step(int memory, const ActionPair& pair) const;

 private:
  int PairIndex(const ActionPair& pair) const {
    return (pair.i + 1) * (num_actions_j_ + 1) + (pair.j + 1);
  }

  int num_actions_i_;
  int num_actions_j_;
  int initial_ = 0;
  std::vector<Distribution> outputs_;
  std::vector<std::vector<int>> next_;
};

UninformedPtr Machine(MachineTable table, std::string name = "machine");
InformedPtr Machine(std::vector<MachineTable> per_state,
                    std::string name = "machine");

// Machine for Player II with `num_memory` states: each state's probability
// of action 0 is 0, 1 or uniform on (0, 1) with equal chance, and each own
// move of Player II jumps to a uniformly drawn memory state. Moves of
// Player I are ignored.
MachineTable RandomMachineII(int num_memory, int num_actions_i,
                             int num_actions_j, std::uint64_t seed);

}  // namespace tailcav

#endif  // TAILCAV_STRATEGY_HPP_
