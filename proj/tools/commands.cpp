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

#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "tailcav/belief_engine.hpp"
#include "tailcav/json_io.hpp"
#include "tailcav/seeding.hpp"
#include "tailcav/simulate.hpp"
#include "tailcav/solvers.hpp"
#include "tailcav/strategies.hpp"

namespace tailcav::cli {
namespace {

struct Flags {
  std::string spec;
  std::uint64_t seed = 0;
  std::size_t horizon = 10000;
  std::size_t episodes = 10000;
  double mesh = 0.01;
  double epsilon = 0.05;
  std::string out;
  int threads = 1;
};

void AddCommon(CLI::App* cmd, Flags& f) {
  cmd->add_option("--spec", f.spec, "game spec JSON file");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--horizon", f.horizon, "stages per episode")->check(CLI::PositiveNumber);
  cmd->add_option("--episodes", f.episodes, "episodes")->check(CLI::PositiveNumber);
  cmd->add_option("--mesh", f.mesh, "grid step on the simplex");
  cmd->add_option("--epsilon", f.epsilon, "block response epsilon");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
}

std::filesystem::path OutPath(const Flags& f, const std::string& name) {
  std::filesystem::create_directories(f.out);
  return std::filesystem::path(f.out) / name;
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::kValidation, "cannot write " + path.string());
  return file;
}

GameDefinition RequireGame(const Flags& f) {
  if (f.spec.empty()) throw Error(ErrorCode::kValidation, "--spec is required");
  return LoadGame(f.spec);
}

// Inline JSON when it starts with '{', else a file.
Json DescriptorArg(const std::string& arg, const char* what) {
  if (arg.empty()) {
    throw Error(ErrorCode::kValidation, std::string(what) + " is required");
  }
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && arg[first] == '{') {
    try {
      return Json::parse(arg);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kValidation, std::string(what) + ": " + e.what());
    }
  }
  return ReadJsonFile(arg);
}

std::vector<double> ParseNumbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t\r", used) != std::string::npos) throw 0;
    } catch (...) {
      throw Error(ErrorCode::kValidation, "not a number: \"" + item + "\"");
    }
  }
  return out;
}

Belief QueryBelief(const std::string& text, int num_states) {
  const auto xs = ParseNumbers(text);
  Eigen::VectorXd w(num_states);
  if (num_states == 2 && xs.size() == 1) {
    w << xs[0], 1.0 - xs[0];
  } else if (static_cast<int>(xs.size()) == num_states) {
    for (int k = 0; k < num_states; ++k) w[k] = xs[k];
  } else {
    throw Error(ErrorCode::kValidation, "--p needs one entry per state");
  }
  try {
    return Belief(w);
  } catch (const Error&) {
    throw Error(ErrorCode::kOutOfDomain, "query p outside the simplex");
  }
}

// ---------------------------------------------------------------------------

int NrValue(const Flags& f, bool breakpoints, std::ostream& out) {
  const GameDefinition game = RequireGame(f);
  const auto oracle = OracleFor(game);
  const int n = game.spec.num_states();
  const auto grid = SimplexGrid(n, f.mesh,
                                breakpoints && n == 2 ? oracle->Breakpoints()
                                                      : std::vector<double>{});
  std::ostringstream csv;
  csv << std::setprecision(17);
  if (n == 2) {
    csv << "p,u\n";
  } else {
    for (const auto& s : game.spec.states) csv << "p_" << s << ',';
    csv << "u\n";
  }
  for (const auto& q : grid) {
    if (n == 2) {
      csv << q[0];
    } else {
      for (int k = 0; k < n; ++k) csv << (k ? "," : "") << q[k];
    }
    csv << ',' << oracle->Value(q) << '\n';
  }
  if (!f.out.empty()) OpenOut(OutPath(f, "nrvalue.csv")) << csv.str();
  out << csv.str();
  return kExitOk;
}

// Reads p,u or p_1,...,p_K,u rows.
void ReadSamples(const std::string& path, std::vector<Belief>& grid,
                 std::vector<double>& values) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kValidation, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kValidation, path + " is empty");
  const std::size_t columns =
      static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 2) throw Error(ErrorCode::kValidation, "samples need p and u columns");
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto xs = ParseNumbers(line);
    if (xs.size() != columns) {
      throw Error(ErrorCode::kValidation, "ragged sample row: " + line);
    }
    Eigen::VectorXd w;
    if (columns == 2) {
      w = Eigen::Vector2d(xs[0], 1.0 - xs[0]);
    } else {
      w = Eigen::Map<const Eigen::VectorXd>(xs.data(), columns - 1);
    }
    grid.emplace_back(w);
    values.push_back(xs.back());
  }
}

int Cav(const Flags& f, const std::string& samples, const std::string& p_text,
        std::ostream& out) {
  std::vector<Belief> grid;
  std::vector<double> values;
  int num_states = 0;
  if (!samples.empty()) {
    ReadSamples(samples, grid, values);
    if (grid.empty()) throw Error(ErrorCode::kDegenerateGrid, "no samples");
    num_states = static_cast<int>(grid[0].size());
  } else {
    const GameDefinition game = RequireGame(f);
    const auto oracle = OracleFor(game);
    num_states = game.spec.num_states();
    grid = SimplexGrid(num_states, f.mesh,
                       num_states == 2 ? oracle->Breakpoints() : std::vector<double>{});
    for (const auto& q : grid) values.push_back(oracle->Value(q));
  }
  const ConcaveEnvelope env(grid, values);
  Json report;
  if (!p_text.empty()) {
    const Belief p = QueryBelief(p_text, num_states);
    const Split split = env.SplitAt(p);
    report["p"] = std::vector<double>(p.weights().data(), p.weights().data() + p.size());
    report["cav"] = split.value;
    report["split"] = SplitToJson(split);
  }
  if (num_states == 2) {
    Json bps = Json::array();
    for (const auto& bp : env.breakpoints()) bps.push_back({bp.x(), bp.y()});
    report["breakpoints"] = bps;
    if (!f.out.empty()) {
      auto csv = OpenOut(OutPath(f, "cav_breakpoints.csv"));
      csv << std::setprecision(17) << "p,cav\n";
      for (const auto& bp : env.breakpoints()) csv << bp.x() << ',' << bp.y() << '\n';
    }
  }
  if (!f.out.empty()) OpenOut(OutPath(f, "cav.json")) << report.dump(2) << '\n';
  out << report.dump(2) << '\n';
  return kExitOk;
}

// Posterior path of episode 0 against sigma when Player II keeps no trace.
std::vector<TraceRow> PosteriorRows(const GameSpec& spec,
                                    const InformedStrategy& sigma,
                                    const PublicHistory& h) {
  std::vector<TraceRow> rows;
  PosteriorState state(sigma, spec.PriorBelief());
  rows.push_back({0, state.belief().weights(), 0, BlockEvent::kContinue, 0});
  for (const auto& pair : h) {
    state.Observe(pair);
    rows.push_back({state.stage(), state.belief().weights(), 0,
                    BlockEvent::kContinue, 0});
  }
  return rows;
}

int Simulate(const Flags& f, const std::string& sigma_arg,
             const std::string& tau_arg, bool average, const std::string& state,
             std::ostream& out) {
  const GameDefinition game = RequireGame(f);
  const Json sigma_json = DescriptorArg(sigma_arg, "--sigma");
  Json tau_json = DescriptorArg(tau_arg, "--tau");
  DescriptorContext ctx{&game, f.epsilon, f.mesh, f.seed, 16};
  const InformedPtr sigma = ParseInformed(sigma_json, ctx);
  const UninformedPtr tau = ParseUninformed(tau_json, ctx);

  SimConfig config;
  config.horizon = f.horizon;
  config.episodes = f.episodes;
  config.master_seed = f.seed;
  config.average_over_states = average;
  config.threads = f.threads;
  if (!state.empty()) config.forced_state = game.spec.StateIndex(state);
  const SimResult result = EstimatePayoff(game.spec, game.payoff, *sigma, *tau, config);

  Json summary = SummaryJson(result);
  summary["sigma"] = sigma->Describe();
  summary["tau"] = tau->Describe();
  summary["payoff"] = game.payoff.name();
  summary["horizon"] = f.horizon;
  summary["seed"] = f.seed;
  summary["average_over_states"] = average;
  summary["note"] =
      "episodes with exact=0 use the finite-horizon surrogate of the payoff";
  out << summary.dump(2) << '\n';
  if (f.out.empty()) return kExitOk;

  OpenOut(OutPath(f, "summary.json")) << summary.dump(2) << '\n';
  {
    auto csv = OpenOut(OutPath(f, "episodes.csv"));
    WriteEpisodesCsv(csv, result, game.spec);
  }
  // Episode 0 again, recording every stage.
  if (tau_json.value("kind", "") == "block_response") tau_json["record_beliefs"] = true;
  const UninformedPtr tau_rec = ParseUninformed(tau_json, ctx);
  SimConfig rec = config;
  rec.record_trajectory = true;
  const EpisodeResult ep = RunEpisode(game.spec, game.payoff, *sigma, *tau_rec, rec, 0);
  std::vector<TraceRow> rows = ep.trajectory;
  if (rows.empty()) {
    try {
      rows = PosteriorRows(game.spec, *sigma, ep.history);
    } catch (const Error&) {
      // Null history against sigma; leave the trajectory empty.
    }
  }
  auto csv = OpenOut(OutPath(f, "trajectory.csv"));
  WriteTrajectoryCsv(csv, rows, game.spec);
  return kExitOk;
}

int Example1Gap(const Flags& f, const std::string& variant, std::ostream& out) {
  const GameSpec spec = Example1Spec(0.5);
  PayoffEvaluator payoff = variant == "example2" ? PayoffEvaluator::Example2()
                                                 : PayoffEvaluator::Example1();
  if (variant != "example1" && variant != "example2") {
    throw Error(ErrorCode::kValidation, "--variant must be example1 or example2");
  }
  SimConfig config;
  config.horizon = f.horizon;
  config.episodes = f.episodes;
  config.master_seed = f.seed;
  config.average_over_states = true;
  config.threads = f.threads;

  const auto oracle = Example1Oracle(spec);
  const auto env = EnvelopeFromOracle(*oracle, 2, f.mesh);
  const Belief p = spec.PriorBelief();
  const InformedPtr split = MakeSplitting(spec, OptimalSplitForCav(p, env, *oracle));
  BlockResponseOptions options;
  options.epsilon = f.epsilon;
  options.payoff_range = payoff.bounds().range();
  const UninformedPtr tau_star = MakeBlockResponse(spec, split, p, oracle, options);
  const SimResult maxmin = EstimatePayoff(spec, payoff, *split, *tau_star, config);

  const ExploitOptions exploit = ExploitOptionsFor(config);
  const PanelBound minmax = PanelMin(
      spec, payoff,
      [&](const UninformedPtr& tau) {
        return MakeExample1Exploit(spec, payoff, tau, exploit);
      },
      Example1Panel(spec, DeriveSeed(f.seed, 0, "panel")), config);

  Json report;
  report["variant"] = variant;
  report["cav_u_half"] = env.Value(p);
  report["maxmin_side"] = maxmin.mean;
  report["maxmin_side_ci95"] = maxmin.ci95;
  report["maxmin_side_exact_fraction"] = maxmin.exact_fraction;
  report["minmax_side_panel_bound"] = minmax.value;
  report["minmax_side_argmin"] = minmax.entries[minmax.extremal].name;
  Json panel = Json::array();
  bool all_exact = true;
  for (const auto& e : minmax.entries) {
    panel.push_back({{"tau", e.name},
                     {"mean", e.result.mean},
                     {"ci95", e.result.ci95},
                     {"exact_fraction", e.result.exact_fraction}});
    all_exact = all_exact && e.result.exact_fraction == 1.0;
  }
  report["panel"] = panel;
  report["all_pairings_exact"] = all_exact && maxmin.exact_fraction == 1.0;
  const double ci = minmax.entries[minmax.extremal].result.ci95;
  report["gap_witnessed"] =
      minmax.value >= 0.45 && minmax.value - ci > maxmin.mean + maxmin.ci95;
  report["note"] =
      "maxmin_side is splitting vs block response; minmax_side_panel_bound is "
      "a lower bound on Player I's best reply over this panel of Player II "
      "strategies only";
  if (!f.out.empty()) OpenOut(OutPath(f, "gap_report.json")) << report.dump(2) << '\n';
  out << report.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Repeated games with incomplete information on one side"};
  app.require_subcommand(1);

  Flags nr_flags, cav_flags, sim_flags, gap_flags;
  bool breakpoints = false;
  auto* nr = app.add_subcommand("nrvalue", "u(p) on a grid as CSV");
  AddCommon(nr, nr_flags);
  nr->add_flag("--breakpoints", breakpoints, "add the oracle's known kinks to the grid");

  std::string samples, p_text;
  auto* cav = app.add_subcommand("cav", "concavification and optimal split");
  AddCommon(cav, cav_flags);
  cav->add_option("--samples", samples, "CSV of p,u samples (instead of --spec)");
  cav->add_option("--p", p_text, "query belief: p(k1), or comma-separated");

  std::string sigma_arg, tau_arg, state;
  bool average = false;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of E[f]");
  AddCommon(sim, sim_flags);
  sim->add_option("--sigma", sigma_arg, "Player I descriptor (file or inline JSON)");
  sim->add_option("--tau", tau_arg, "Player II descriptor (file or inline JSON)");
  sim->add_flag("--average-states", average,
                "average every state on common random numbers");
  sim->add_option("--state", state, "force the state of nature");

  std::string variant = "example1";
  auto* gap = app.add_subcommand("example1-gap", "maxmin and minmax sides at p = 1/2");
  AddCommon(gap, gap_flags);
  gap->add_option("--variant", variant, "example1 or example2");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (nr->parsed()) return NrValue(nr_flags, breakpoints, out);
    if (cav->parsed()) return Cav(cav_flags, samples, p_text, out);
    if (sim->parsed()) return Simulate(sim_flags, sigma_arg, tau_arg, average, state, out);
    if (gap->parsed()) return Example1Gap(gap_flags, variant, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kUnsupportedOracle ? kExitUnsupportedOracle
                                                     : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitValidation;
}

}  // namespace tailcav::cli
