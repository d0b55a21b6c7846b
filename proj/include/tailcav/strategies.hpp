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

// Constructions on top of the strategy layer:
//   * the splitting strategy, which reveals a signal once at the outset and
//     then plays non-revealingly, guaranteeing cav u(p);
//   * the block response, Player II's reply to a known informed strategy
//     that re-optimizes the non-revealing game whenever the posterior moves;
//   * the exploit for the first example, which guarantees about 1/2 against
//     any fixed strategy of Player II.

#ifndef TAILCAV_STRATEGIES_HPP_
#define TAILCAV_STRATEGIES_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tailcav/belief_engine.hpp"
#include "tailcav/game_core.hpp"
#include "tailcav/payoffs.hpp"
#include "tailcav/solvers.hpp"
#include "tailcav/strategy.hpp"

namespace tailcav {

// Non-revealing game oracle: the value u, subgame-optimal play for
// Player II, and a non-revealing guarantee strategy for Player I.
class NrOracle {
 public:
  virtual ~NrOracle() = default;
  virtual double Value(const Belief& p) const = 0;
  // Strategy for Player II, started at `onset`, for the non-revealing game
  // with prior p.
  virtual UninformedPtr Respond(const Belief& p,
                                const PublicHistory& onset) const = 0;
  // State-independent strategy for Player I guaranteeing Value(p).
  virtual InformedPtr Guarantee(const Belief& p) const = 0;
  // Known kinks of u for two-state games, as probabilities of the first
  // state; added to sampling grids.
  virtual std::vector<double> Breakpoints() const { return {}; }
  virtual std::string name() const = 0;
};

using NrOraclePtr = std::shared_ptr<const NrOracle>;

// Long-run average payoff: stationary optimal mixed actions of the
// p-averaged stage game.
NrOraclePtr AverageOracle(std::vector<Eigen::MatrixXd> stage);

// Both examples: u is UExample1; Player II always plays r below p = 2/3
// and always l from 2/3 on; Player I always plays l up to 1/3 and r above.
NrOraclePtr Example1Oracle(const GameSpec& spec);

// Samples u on SimplexGrid(|K|, mesh, oracle breakpoints) and concavifies.
ConcaveEnvelope EnvelopeFromOracle(const NrOracle& oracle, int num_states,
                                   double mesh);

struct SplitPlan {
  Belief prior;
  std::vector<Belief> posteriors;
  std::vector<double> weights;
  // Non-revealing continuation of Player I after each signal.
  std::vector<InformedPtr> continuations;
};

// Reveals a signal s with P(s | k) = weights[s] * posteriors[s](k) / p(k)
// through Player I's first ceil(log_|I| m) moves (digits in base |I|, most
// significant first), then plays continuations[s] forever. Throws
// Error(kInfeasiblePlan) with the residual when sum_s weights[s] *
// posteriors[s] differs from the prior by more than 1e-10.
InformedPtr MakeSplitting(const GameSpec& spec, const SplitPlan& plan);

// Number of Player I moves used to encode m signals.
int SignalLength(int num_signals, int num_actions_i);

// Player I's action sequence encoding signal s.
std::vector<int> EncodeSignal(int s, int num_signals, int num_actions_i);

// Split achieving envelope(p) with at most |K| posteriors; continuations
// come from oracle.Guarantee.
SplitPlan OptimalSplitForCav(const Belief& p, const ConcaveEnvelope& envelope,
                             const NrOracle& oracle);

struct BlockResponseOptions {
  double epsilon = 0.05;
  // 0 selects SelectDelta(epsilon, |K|, payoff_range).
  double delta = 0.0;
  double payoff_range = 1.0;
  // Recursion budget at boundary stages; 0 means |K|.
  int depth = 0;
  // Record the posterior at every stage in the agent's trace.
  bool record_beliefs = false;
};

// Player II's block response to sigma at prior p: tracks the posterior
// against sigma, plays oracle.Respond at the block-start belief within each
// block, re-queries the oracle at every new block, and at the boundary stage
// renormalizes by xi_delta, drops the states outside K_delta and restarts on
// the restricted game with one less level of depth. On a null history the
// agent keeps its last belief and block strategy.
UninformedPtr MakeBlockResponse(const GameSpec& spec, InformedPtr sigma,
                                const Belief& p, NrOraclePtr oracle,
                                const BlockResponseOptions& options);

struct ExploitOptions {
  // Stage at which Player I classifies the history under state k2.
  std::size_t decision_stage = 64;
  int rollouts = 16;
  std::size_t rollout_horizon = 512;
  std::uint64_t seed = 0;
};

// Player I's reply to tau in the two-state examples: under k1 always r;
// under k2, r until the decision stage, then classify the history by
// Monte Carlo continuations of (always r, tau): if f(k1, continuation) is
// -1 (Player II keeps playing l) in at least half of them, keep playing r,
// else play l forever. Continuations are lasso-evaluated when they close a
// cycle. Sub-seeds derive from (seed, history), so the strategy is a
// deterministic function of (k, h).
InformedPtr MakeExample1Exploit(const GameSpec& spec, const PayoffEvaluator& f,
                                UninformedPtr tau,
                                const ExploitOptions& options);

struct NamedUninformed {
  std::string name;
  UninformedPtr strategy;
};

// Player II panel for the first example: always r, always l, l once then r,
// period-2 alternator, and a seeded 3-state random machine.
std::vector<NamedUninformed> Example1Panel(const GameSpec& spec,
                                           std::uint64_t machine_seed);

}  // namespace tailcav

#endif  // TAILCAV_STRATEGIES_HPP_
