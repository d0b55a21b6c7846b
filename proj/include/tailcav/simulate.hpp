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

// Seeded Monte Carlo episodes and payoff estimates.
//
// Episode n uses seed DeriveSeed(master_seed, n, "episode"); nature, Player I
// and Player II draw from streams derived from it. Estimates sum in episode
// order, so results do not depend on the thread count.

#ifndef TAILCAV_SIMULATE_HPP_
#define TAILCAV_SIMULATE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tailcav/belief_engine.hpp"
#include "tailcav/game_core.hpp"
#include "tailcav/payoffs.hpp"
#include "tailcav/strategies.hpp"
#include "tailcav/strategy.hpp"

namespace tailcav {

struct SimConfig {
  std::size_t horizon = 10000;
  std::size_t episodes = 10000;
  std::uint64_t master_seed = 0;
  bool lasso_detection = true;
  // Rollouts per classification for exploit strategies built from this
  // config (see ExploitOptionsFor).
  int exploit_rollouts = 16;
  // Play every state with positive prior mass on common random numbers and
  // record the prior-weighted payoff. Removes nature's draw from the
  // variance; k* is still drawn and picks the state whose trace is reported.
  bool average_over_states = false;
  std::optional<int> forced_state;
  // Keep Player II's per-stage trace rows (needs a tracing agent).
  bool record_trajectory = false;
  int threads = 1;
};

void ValidateConfig(const SimConfig& config);

struct EpisodeResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  int state = 0;
  double payoff = 0.0;
  // Every played state closed a lasso.
  bool exact = false;
  bool randomized = false;
  // Player II's block statistics in `state`; zero without a tracing agent.
  int blocks = 0;
  std::optional<std::size_t> theta_stage;
  bool frozen = false;
  // Payoff per state when averaging over states, else only `state` is set.
  std::vector<double> state_payoffs;
  std::vector<TraceRow> trajectory;
  std::vector<TraceRow> events;
  PublicHistory history;
};

EpisodeResult RunEpisode(const GameSpec& spec, const PayoffEvaluator& f,
                         const InformedStrategy& sigma,
                         const UninformedStrategy& tau, const SimConfig& config,
                         std::size_t index);

struct SimResult {
  double mean = 0.0;
  double stddev = 0.0;
  double ci95 = 0.0;
  // NaN for states never drawn (or of zero prior mass when averaging).
  std::vector<double> per_state_means;
  double blocks_mean = 0.0;
  int blocks_max = 0;
  double theta_hit_rate = 0.0;
  double exact_fraction = 0.0;
  double randomized_fraction = 0.0;
  std::vector<EpisodeResult> episodes;
};

SimResult EstimatePayoff(const GameSpec& spec, const PayoffEvaluator& f,
                         const InformedStrategy& sigma,
                         const UninformedStrategy& tau,
                         const SimConfig& config);

struct NamedInformed {
  std::string name;
  InformedPtr strategy;
};

struct PanelEntry {
  std::string name;
  SimResult result;
};

// One-sided bound over a finite panel: min over Player II's panel (or max
// over Player I's), with the extremal member.
struct PanelBound {
  double value = 0.0;
  std::size_t extremal = 0;
  std::vector<PanelEntry> entries;
};

// min over tau in the panel of E[f] under (sigma_for(tau), tau).
PanelBound PanelMin(const GameSpec& spec, const PayoffEvaluator& f,
                    const std::function<InformedPtr(const UninformedPtr&)>& sigma_for,
                    const std::vector<NamedUninformed>& taus,
                    const SimConfig& config);

// max over sigma in the panel of E[f] under (sigma, tau_for(sigma)).
PanelBound PanelMax(const GameSpec& spec, const PayoffEvaluator& f,
                    const std::vector<NamedInformed>& sigmas,
                    const std::function<UninformedPtr(const InformedPtr&)>& tau_for,
                    const SimConfig& config);

ExploitOptions ExploitOptionsFor(const SimConfig& config);

}  // namespace tailcav

#endif  // TAILCAV_SIMULATE_HPP_
