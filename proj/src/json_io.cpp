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

#include "tailcav/json_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include "tailcav/solvers.hpp"

namespace tailcav {
namespace {

[[noreturn]] void Invalid(const std::string& what) {
  throw Error(ErrorCode::kValidation, what);
}

const Json& Field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    Invalid(where + ": missing \"" + key + "\"");
  }
  return j.at(key);
}

std::vector<std::string> Names(const Json& j, const char* key) {
  const Json& arr = Field(j, key, "game spec");
  if (!arr.is_array()) Invalid(std::string("\"") + key + "\" must be an array");
  std::vector<std::string> out;
  for (const auto& x : arr) {
    if (!x.is_string()) Invalid(std::string("\"") + key + "\" must hold strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

int ActionRef(const Json& j, const std::vector<std::string>& names,
              bool allow_any) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "-") return kDummy;
    if (allow_any && s == "*") return MachineTable::kAny;
    for (std::size_t a = 0; a < names.size(); ++a) {
      if (names[a] == s) return static_cast<int>(a);
    }
    Invalid("unknown action \"" + s + "\"");
  }
  if (j.is_number_integer()) {
    const int a = j.get<int>();
    if (a == kDummy || (allow_any && a == MachineTable::kAny) ||
        (a >= 0 && a < static_cast<int>(names.size()))) {
      return a;
    }
  }
  Invalid("bad action reference " + j.dump());
}

ActionPair PairRef(const Json& j, const GameSpec& spec) {
  if (!j.is_array() || j.size() != 2) Invalid("pair must be [i, j]");
  return {ActionRef(j[0], spec.actions_i, false),
          ActionRef(j[1], spec.actions_j, false)};
}

Eigen::MatrixXd Matrix(const Json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    Invalid("stage matrix must have one row per action of Player I");
  }
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) {
      Invalid("stage matrix row must have one entry per action of Player II");
    }
    for (int c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) Invalid("stage matrix entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

Distribution Dist(const Json& j, const std::vector<std::string>& names) {
  const int n = static_cast<int>(names.size());
  if (j.is_string() || j.is_number_integer()) {
    const int a = ActionRef(j, names, false);
    if (a < 0) Invalid("a mixed action cannot be the dummy");
    return PureAction(n, a);
  }
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    Invalid("mixed action needs one probability per action");
  }
  Distribution d(n);
  for (int a = 0; a < n; ++a) {
    if (!j[a].is_number()) Invalid("probabilities must be numbers");
    d[a] = j[a].get<double>();
  }
  RequireDistribution(d, "mixed action");
  return d;
}

Belief BeliefFrom(const Json& j, int num_states) {
  if (j.is_number() && num_states == 2) return Belief::TwoState(j.get<double>());
  if (!j.is_array() || static_cast<int>(j.size()) != num_states) {
    Invalid("belief needs one entry per state");
  }
  Eigen::VectorXd w(num_states);
  for (int k = 0; k < num_states; ++k) w[k] = j[k].get<double>();
  return Belief(w);
}

std::string Kind(const Json& j) {
  const Json& kind = Field(j, "kind", "descriptor");
  if (!kind.is_string()) Invalid("\"kind\" must be a string");
  return kind.get<std::string>();
}

template <typename T>
T Get(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    Invalid(std::string("bad value for \"") + key + "\"");
  }
}

MachineTable ParseMachine(const Json& j, const GameSpec& spec, bool player_i,
                          std::uint64_t seed) {
  const auto& own = player_i ? spec.actions_i : spec.actions_j;
  if (j.contains("random")) {
    if (player_i) Invalid("random machines are for Player II only");
    return RandomMachineII(Get<int>(j, "random", 3), spec.num_actions_i(),
                           spec.num_actions_j(), Get<std::uint64_t>(j, "seed", seed));
  }
  const Json& outputs = Field(j, "outputs", "machine");
  if (!outputs.is_array() || outputs.empty()) Invalid("machine needs outputs");
  const int memory = static_cast<int>(outputs.size());
  MachineTable table(memory, spec.num_actions_i(), spec.num_actions_j(),
                     Dist(outputs[0], own));
  for (int m = 1; m < memory; ++m) table.SetOutput(m, Dist(outputs[m], own));
  const int initial = Get<int>(j, "initial", 0);
  if (initial < 0 || initial >= memory) Invalid("machine initial state out of range");
  table.SetInitial(initial);
  if (j.contains("rules")) {
    for (const auto& rule : j.at("rules")) {
      const int from = Get<int>(rule, "from", -1);
      const int to = Get<int>(rule, "to", -1);
      if (from < 0 || from >= memory || to < 0 || to >= memory) {
        Invalid("machine rule states out of range");
      }
      const int i = rule.contains("i") ? ActionRef(rule["i"], spec.actions_i, true)
                                       : MachineTable::kAny;
      const int jj = rule.contains("j") ? ActionRef(rule["j"], spec.actions_j, true)
                                        : MachineTable::kAny;
      table.SetTransition(from, i, jj, to);
    }
  }
  return table;
}

const GameDefinition& GameOf(const DescriptorContext& ctx) {
  if (!ctx.game) Invalid("descriptor needs a game");
  return *ctx.game;
}

}  // namespace

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Invalid("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    Invalid(path + ": " + e.what());
  }
}

GameDefinition ParseGame(const Json& j) {
  if (!j.is_object()) Invalid("game spec must be a JSON object");
  GameSpec spec;
  spec.states = Names(j, "states");
  spec.actions_i = Names(j, "actions_i");
  spec.actions_j = Names(j, "actions_j");
  const Json& prior = Field(j, "prior", "game spec");
  if (!prior.is_array()) Invalid("\"prior\" must be an array");
  spec.prior.resize(prior.size());
  for (std::size_t k = 0; k < prior.size(); ++k) {
    if (!prior[k].is_number()) Invalid("prior entries must be numbers");
    spec.prior[k] = prior[k].get<double>();
  }
  const std::string timing = Get<std::string>(j, "timing", "simultaneous");
  if (timing == "simultaneous") {
    spec.timing = Timing::kSimultaneous;
  } else if (timing == "alternating") {
    spec.timing = Timing::kAlternating;
  } else {
    Invalid("timing must be \"simultaneous\" or \"alternating\"");
  }
  RequireValid(spec);

  const Json& payoff = Field(j, "payoff", "game spec");
  const std::string kind = Kind(payoff);
  auto ell = [](const std::vector<std::string>& names) {
    for (std::size_t a = 0; a < names.size(); ++a) {
      if (names[a] == "l") return static_cast<int>(a);
    }
    return 0;
  };
  std::vector<Eigen::MatrixXd> stage;
  auto make = [&]() -> PayoffEvaluator {
    if (kind == "example1" || kind == "example2") {
      if (spec.num_states() != 2) Invalid(kind + " needs exactly two states");
      if (kind == "example1") {
        return PayoffEvaluator::Example1(ell(spec.actions_i), ell(spec.actions_j));
      }
      return PayoffEvaluator::Example2(ell(spec.actions_i), ell(spec.actions_j),
                                       Get<double>(payoff, "threshold", 0.1));
    }
    if (kind == "average") {
      const Json& ms = Field(payoff, "matrices", "average payoff");
      if (!ms.is_array() || static_cast<int>(ms.size()) != spec.num_states()) {
        Invalid("average payoff needs one matrix per state");
      }
      for (const auto& m : ms) {
        stage.push_back(Matrix(m, spec.num_actions_i(), spec.num_actions_j()));
      }
      return PayoffEvaluator::LimsupAverage(stage);
    }
    if (kind == "buchi" || kind == "cobuchi") {
      std::set<ActionPair> targets;
      for (const auto& p : Field(payoff, "targets", kind)) {
        targets.insert(PairRef(p, spec));
      }
      return kind == "buchi" ? PayoffEvaluator::Buchi(targets)
                             : PayoffEvaluator::CoBuchi(targets);
    }
    if (kind == "parity") {
      std::map<ActionPair, int> priorities;
      for (const auto& e : Field(payoff, "priorities", kind)) {
        priorities[PairRef(Field(e, "pair", "priority"), spec)] =
            Get<int>(e, "priority", 0);
      }
      return PayoffEvaluator::Parity(priorities, Get<int>(payoff, "default", 1));
    }
    Invalid("unknown payoff kind \"" + kind + "\"");
  };
  PayoffEvaluator f = make();
  return GameDefinition{std::move(spec), std::move(f), kind, std::move(stage)};
}

GameDefinition LoadGame(const std::string& path) {
  return ParseGame(ReadJsonFile(path));
}

NrOraclePtr OracleFor(const GameDefinition& game) {
  if (game.payoff_kind == "average") return AverageOracle(game.stage);
  if (game.payoff_kind == "example1" || game.payoff_kind == "example2") {
    try {
      return Example1Oracle(game.spec);
    } catch (const Error&) {
      throw Error(ErrorCode::kUnsupportedOracle,
                  "no u-oracle for payoff family " + game.payoff_kind +
                      " without actions named l and r");
    }
  }
  throw Error(ErrorCode::kUnsupportedOracle,
              "no u-oracle for payoff family " + game.payoff_kind);
}

InformedPtr ParseInformed(const Json& j, const DescriptorContext& ctx) {
  const GameDefinition& game = GameOf(ctx);
  const GameSpec& spec = game.spec;
  const std::string kind = Kind(j);
  if (kind == "stationary") {
    if (j.contains("per_state")) {
      const Json& rows = j.at("per_state");
      if (!rows.is_array() || static_cast<int>(rows.size()) != spec.num_states()) {
        Invalid("\"per_state\" needs one mixed action per state");
      }
      std::vector<Distribution> per_state;
      for (const auto& r : rows) per_state.push_back(Dist(r, spec.actions_i));
      return StationaryPerState(std::move(per_state));
    }
    return StationaryNonRevealing(Dist(Field(j, "dist", "stationary"), spec.actions_i));
  }
  if (kind == "splitting") {
    const Belief prior = spec.PriorBelief();
    if (!j.contains("posteriors")) {
      const auto oracle = OracleFor(game);
      const auto env = EnvelopeFromOracle(*oracle, spec.num_states(),
                                          Get<double>(j, "mesh", ctx.mesh));
      return MakeSplitting(spec, OptimalSplitForCav(prior, env, *oracle));
    }
    SplitPlan plan{prior, {}, {}, {}};
    for (const auto& q : j.at("posteriors")) {
      plan.posteriors.push_back(BeliefFrom(q, spec.num_states()));
    }
    plan.weights = Get<std::vector<double>>(j, "weights", {});
    if (j.contains("continuations")) {
      for (const auto& c : j.at("continuations")) {
        plan.continuations.push_back(ParseInformed(c, ctx));
      }
    } else {
      const auto oracle = OracleFor(game);
      for (const auto& q : plan.posteriors) {
        plan.continuations.push_back(oracle->Guarantee(q));
      }
    }
    return MakeSplitting(spec, plan);
  }
  if (kind == "example1_exploit") {
    ExploitOptions options;
    options.decision_stage = Get<std::size_t>(j, "decision_stage", options.decision_stage);
    options.rollouts = Get<int>(j, "rollouts", ctx.exploit_rollouts);
    options.rollout_horizon =
        Get<std::size_t>(j, "rollout_horizon", options.rollout_horizon);
    options.seed = Get<std::uint64_t>(j, "seed", ctx.seed);
    return MakeExample1Exploit(spec, game.payoff,
                               ParseUninformed(Field(j, "tau", kind), ctx), options);
  }
  if (kind == "machine") {
    const Json& rows = Field(j, "per_state", "informed machine");
    if (!rows.is_array() || static_cast<int>(rows.size()) != spec.num_states()) {
      Invalid("informed machine needs one table per state");
    }
    std::vector<MachineTable> tables;
    for (const auto& r : rows) tables.push_back(ParseMachine(r, spec, true, ctx.seed));
    return Machine(std::move(tables), Get<std::string>(j, "name", "machine"));
  }
  if (kind == "block_response") {
    Invalid("block_response is a strategy of Player II");
  }
  Invalid("unknown strategy kind \"" + kind + "\"");
}

UninformedPtr ParseUninformed(const Json& j, const DescriptorContext& ctx) {
  const GameDefinition& game = GameOf(ctx);
  const GameSpec& spec = game.spec;
  const std::string kind = Kind(j);
  if (kind == "stationary") {
    return Stationary(Dist(Field(j, "dist", "stationary"), spec.actions_j));
  }
  if (kind == "machine") {
    return Machine(ParseMachine(j, spec, false, ctx.seed),
                   Get<std::string>(j, "name", "machine"));
  }
  if (kind == "block_response") {
    BlockResponseOptions options;
    options.epsilon = Get<double>(j, "epsilon", ctx.epsilon);
    options.delta = Get<double>(j, "delta", 0.0);
    options.payoff_range = Get<double>(j, "payoff_range", game.payoff.bounds().range());
    options.depth = Get<int>(j, "depth", 0);
    options.record_beliefs = Get<bool>(j, "record_beliefs", false);
    const Belief p = j.contains("prior") ? BeliefFrom(j["prior"], spec.num_states())
                                         : spec.PriorBelief();
    return MakeBlockResponse(spec, ParseInformed(Field(j, "sigma", kind), ctx), p,
                             OracleFor(game), options);
  }
  if (kind == "splitting" || kind == "example1_exploit") {
    Invalid(kind + " is a strategy of Player I");
  }
  Invalid("unknown strategy kind \"" + kind + "\"");
}

Json SplitToJson(const Split& split) {
  Json out;
  out["value"] = split.value;
  out["weights"] = split.weights;
  out["values"] = split.values;
  Json posteriors = Json::array();
  for (const auto& q : split.points) {
    posteriors.push_back(std::vector<double>(q.weights().data(),
                                             q.weights().data() + q.size()));
  }
  out["posteriors"] = posteriors;
  return out;
}

Json SummaryJson(const SimResult& r) {
  auto finite_or_null = [](double x) -> Json {
    return std::isfinite(x) ? Json(x) : Json(nullptr);
  };
  Json out;
  out["episodes"] = r.episodes.size();
  out["mean_payoff"] = r.mean;
  out["stddev"] = r.stddev;
  out["ci95_halfwidth"] = r.ci95;
  Json per_state = Json::array();
  for (double m : r.per_state_means) per_state.push_back(finite_or_null(m));
  out["per_state_means"] = per_state;
  out["block_count_stats"] = {{"mean", r.blocks_mean}, {"max", r.blocks_max}};
  out["theta_hit_rate"] = r.theta_hit_rate;
  out["exact_fraction"] = r.exact_fraction;
  out["randomized_fraction"] = r.randomized_fraction;
  return out;
}

void WriteEpisodesCsv(std::ostream& out, const SimResult& result,
                      const GameSpec& spec) {
  out << "seed,k_star,payoff,exact,blocks,theta_stage\n";
  out.precision(17);
  for (const auto& ep : result.episodes) {
    out << ep.seed << ',' << spec.states[ep.state] << ',' << ep.payoff << ','
        << (ep.exact ? 1 : 0) << ',' << ep.blocks << ',';
    if (ep.theta_stage) out << *ep.theta_stage;
    out << '\n';
  }
}

void WriteTrajectoryCsv(std::ostream& out, const std::vector<TraceRow>& rows,
                        const GameSpec& spec) {
  out << "stage";
  for (const auto& s : spec.states) out << ",p_" << s;
  out << ",block_index,event,level\n";
  out.precision(17);
  for (const auto& row : rows) {
    out << row.stage;
    for (Eigen::Index k = 0; k < row.belief.size(); ++k) out << ',' << row.belief[k];
    out << ',' << row.block_index << ',' << ToString(row.event) << ','
        << row.level << '\n';
  }
}

}  // namespace tailcav
