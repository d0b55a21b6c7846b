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

// JSON game specs and strategy descriptors, CSV and JSON result writers.
//
// Game spec:
//   {"states": ["k1", "k2"], "actions_i": ["l", "r"], "actions_j": ["l", "r"],
//    "prior": [0.5, 0.5], "timing": "alternating",
//    "payoff": {"kind": "example1"}}
// Payoff kinds: example1, example2 ("threshold"), average ("matrices", one
// |I| x |J| array per state), buchi / cobuchi ("targets": [[i, j], ...]),
// parity ("priorities": [{"pair": [i, j], "priority": n}], "default": n).
// Actions in pairs are names, indices, or "-" for the dummy action.

#ifndef TAILCAV_JSON_IO_HPP_
#define TAILCAV_JSON_IO_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "tailcav/game_core.hpp"
#include "tailcav/payoffs.hpp"
#include "tailcav/simulate.hpp"
#include "tailcav/strategies.hpp"

namespace tailcav {

using Json = nlohmann::json;

struct GameDefinition {
  GameSpec spec;
  PayoffEvaluator payoff;
  std::string payoff_kind;
  // Stage matrices of an "average" payoff.
  std::vector<Eigen::MatrixXd> stage;
};

// Throw Error(kValidation) on schema violations.
GameDefinition ParseGame(const Json& j);
GameDefinition LoadGame(const std::string& path);
Json ReadJsonFile(const std::string& path);

// Throws Error(kUnsupportedOracle) "no u-oracle for payoff family ..." for
// families without one.
NrOraclePtr OracleFor(const GameDefinition& game);

struct DescriptorContext {
  const GameDefinition* game = nullptr;
  // Defaults for descriptors that leave them out.
  double epsilon = 0.05;
  double mesh = 0.01;
  std::uint64_t seed = 0;
  int exploit_rollouts = 16;
};

// Descriptors: {"kind": "stationary" | "splitting" | "block_response" |
// "example1_exploit" | "machine", ...}; see the README for the fields.
InformedPtr ParseInformed(const Json& j, const DescriptorContext& ctx);
UninformedPtr ParseUninformed(const Json& j, const DescriptorContext& ctx);

Json SplitToJson(const Split& split);
Json SummaryJson(const SimResult& result);

// seed,k_star,payoff,exact,blocks,theta_stage
void WriteEpisodesCsv(std::ostream& out, const SimResult& result,
                      const GameSpec& spec);
// stage,p_<state>...,block_index,event,level
void WriteTrajectoryCsv(std::ostream& out, const std::vector<TraceRow>& rows,
                        const GameSpec& spec);

}  // namespace tailcav

#endif  // TAILCAV_JSON_IO_HPP_
