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

// Player II's posterior over the state, and the block machinery built on it.
//
// The posterior after h under (p, sigma) weighs each state by
// p(k) * prod_t sigma(k, h_t)(i_t) and normalizes. It ignores Player II's
// actions and the true state. A block is a run of stages over which the
// posterior stays within L1 distance delta * epsilon of its value at the
// block start; the run ends early at the first stage where some active state
// has posterior mass at most delta / |K| (the boundary stage).

#ifndef TAILCAV_BELIEF_ENGINE_HPP_
#define TAILCAV_BELIEF_ENGINE_HPP_

#include <memory>
#include <optional>
#include <vector>

#include "tailcav/game_core.hpp"
#include "tailcav/strategy.hpp"

namespace tailcav {

// Active states of a (possibly restricted) game.
using StateMask = std::vector<bool>;

StateMask FullMask(Eigen::Index num_states);

// Incremental Bayes posterior against a fixed informed strategy. Keeps one
// agent of sigma per state with positive prior mass.
class PosteriorState {
 public:
  PosteriorState(const InformedStrategy& sigma, const Belief& prior);

  // Continues from existing per-state agents (moved in), e.g. after a
  // restriction to fewer states. Agents of states with zero mass may be null.
  PosteriorState(std::vector<std::unique_ptr<Agent>> agents,
                 const Belief& belief, std::size_t stage);

  // Updates on the pair of stage t. Throws Error(kNullHistory) when the
  // pair has probability 0 under every state, and leaves the state intact.
  void Observe(const ActionPair& pair);

  const Belief& belief() const { return belief_; }
  std::size_t stage() const { return stage_; }
  // sigma(k, h_t) for the current history; k must have positive mass.
  const Distribution& StateBehavior(int k);

  // Keys of the per-state agents; empty if any agent is not finite-memory.
  std::optional<MemoryKey> Memory() const;

  // Releases the per-state agents; the object is unusable afterwards.
  std::vector<std::unique_ptr<Agent>> ReleaseAgents();

 private:
  std::vector<std::unique_ptr<Agent>> agents_;
  Belief belief_;
  std::size_t stage_ = 0;
  Eigen::VectorXd scratch_;
};

// pi(p, sigma, h). Throws Error(kNullHistory) when h has probability 0.
Belief Posterior(const Belief& p, const InformedStrategy& sigma,
                 const PublicHistory& h);

// K_delta(p) = { k active : p(k) > delta / |active| }.
std::vector<int> SupportAbove(const Belief& p, double delta);
std::vector<int> SupportAbove(const Belief& p, double delta,
                              const StateMask& active);

// xi_delta(p): zero outside K_delta(p), proportional to p inside.
Belief RenormalizeXi(const Belief& p, double delta);
Belief RenormalizeXi(const Belief& p, double delta, const StateMask& active);

// True iff K_delta(p) is a strict subset of the active states.
bool IsBoundary(const Belief& p, double delta);
bool IsBoundary(const Belief& p, double delta, const StateMask& active);

enum class BlockEvent { kContinue, kNewBlock, kTheta };

const char* ToString(BlockEvent event);

class BlockTracker {
 public:
  // Requires 0 < epsilon < 1 and 0 < delta < epsilon^2.
  BlockTracker(double epsilon, double delta, const Belief& start,
               std::size_t start_stage = 0, StateMask active = {});

  // Classifies the posterior of stage `stage`. The boundary check runs
  // first. NewBlock restarts the block at `belief`; after Theta the tracker
  // must not be stepped again.
  BlockEvent Step(const Belief& belief, std::size_t stage);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  int block_index() const { return block_index_; }
  const Belief& block_start_belief() const { return block_start_belief_; }
  std::size_t block_start_stage() const { return block_start_stage_; }
  bool theta_reached() const { return theta_reached_; }
  const StateMask& active() const { return active_; }

 private:
  double epsilon_;
  double delta_;
  int block_index_ = 0;
  Belief block_start_belief_;
  std::size_t block_start_stage_;
  bool theta_reached_ = false;
  StateMask active_;
};

// delta for a given epsilon: min(epsilon^2 / 2, epsilon / (|K| * L)) where L
// is the payoff range. Beliefs within delta in L_inf then have cav values
// within epsilon, because u and cav u are L-Lipschitz in L1.
double SelectDelta(double epsilon, int num_states, double payoff_range);

// || sum_i P(i | h) pi(p, sigma, h + (i, j0)) - pi(p, sigma, h) ||_1 with
// P(i | h) = sum_k pi(p, sigma, h)(k) sigma(k, h)(i). `spec` fixes who moves
// at stage |h|; if Player I does not move the residual is 0 by construction.
double MartingaleResidual(const GameSpec& spec, const Belief& p,
                          const InformedStrategy& sigma,
                          const PublicHistory& h);

// One row of a belief trajectory.
struct TraceRow {
  std::size_t stage = 0;
  Eigen::VectorXd belief;
  int block_index = 0;
  BlockEvent event = BlockEvent::kContinue;
  // Recursion level: 0 in the original game, +1 per boundary restriction.
  int level = 0;
};

struct BlockTrace {
  // Rows at NewBlock and Theta events.
  std::vector<TraceRow> events;
  // Every stage, when recording is on.
  std::vector<TraceRow> rows;
  // Beliefs at which the non-revealing oracle was queried, in order, with
  // the number of active states at query time.
  std::vector<std::pair<Eigen::VectorXd, int>> oracle_queries;
  bool frozen = false;

  int NewBlockCount() const;
  std::optional<std::size_t> ThetaStage() const;
};

}  // namespace tailcav

#endif  // TAILCAV_BELIEF_ENGINE_HPP_
