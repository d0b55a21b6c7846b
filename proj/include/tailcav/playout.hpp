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

#ifndef TAILCAV_PLAYOUT_HPP_
#define TAILCAV_PLAYOUT_HPP_

#include <optional>

#include "tailcav/game_core.hpp"
#include "tailcav/payoffs.hpp"
#include "tailcav/seeding.hpp"
#include "tailcav/strategy.hpp"

namespace tailcav {

struct PlayoutOptions {
  std::size_t horizon = 10000;
  bool lasso_detection = true;
};

struct PlayoutResult {
  double payoff = 0.0;
  // Payoff is the exact value on a detected lasso.
  bool exact = false;
  // Some stage had a mover whose mixed action was not pure.
  bool randomized = false;
  std::optional<LassoPlay> lasso;
  PublicHistory history;
};

// Plays `state` forward from `history` (already observed by both agents)
// until the horizon or until the joint memory state (stage phase, state,
// both agents' keys) repeats over a run of pure stages. A repeat closes a
// lasso and the payoff is exact; otherwise it is the truncated surrogate.
PlayoutResult Playout(const GameSpec& spec, const PayoffEvaluator& f,
                      int state, Agent& sigma, Agent& tau, Rng& rng_i,
                      Rng& rng_j, const PlayoutOptions& options,
                      PublicHistory history = {});

}  // namespace tailcav

#endif  // TAILCAV_PLAYOUT_HPP_
