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

#include <random>

#include "doctest.h"
#include "tailcav/belief_engine.hpp"
#include "tailcav/simulate.hpp"

using namespace tailcav;

namespace {
constexpr int L = 0, R = 1;
}

TEST_CASE("run_episode examples") {
  GameSpec spec = Example1Spec(0.5);
  const auto f = PayoffEvaluator::Example1();
  const auto always_l = StationaryNonRevealing(PureAction(2, L));
  const auto always_r_i = StationaryNonRevealing(PureAction(2, R));
  const auto always_r = Stationary(PureAction(2, R));
  SimConfig config;
  config.horizon = 1000;
  config.forced_state = 1;
  auto ep = RunEpisode(spec, f, *always_l, *always_r, config, 0);
  CHECK(ep.payoff == 1);
  CHECK(ep.exact);
  for (int k = 0; k < 2; ++k) {
    config.forced_state = k;
    ep = RunEpisode(spec, f, *always_r_i, *always_r, config, 3);
    CHECK(ep.payoff == 0);
    CHECK(ep.exact);
  }

  GameSpec avg_spec = spec;
  avg_spec.timing = Timing::kSimultaneous;
  const Eigen::MatrixXd c = Eigen::MatrixXd::Constant(2, 2, 0.7);
  const auto constant = PayoffEvaluator::LimsupAverage({c, c});
  const auto mixed_i = StationaryNonRevealing(Eigen::Vector2d(0.5, 0.5));
  const auto mixed_j = Stationary(Eigen::Vector2d(0.2, 0.8));
  config.forced_state.reset();
  ep = RunEpisode(avg_spec, constant, *mixed_i, *mixed_j, config, 9);
  CHECK(ep.payoff == doctest::Approx(0.7));
  CHECK_FALSE(ep.exact);
  CHECK(ep.randomized);
}

TEST_CASE("two-branch expectation at p = 1/3") {
  const GameSpec spec = Example1Spec(1.0 / 3);
  const auto f = PayoffEvaluator::Example1();
  SimConfig config;
  config.episodes = 10000;
  config.horizon = 10000;
  config.master_seed = 77;
  const auto r = EstimatePayoff(spec, f, *StationaryNonRevealing(PureAction(2, L)),
                                *Stationary(PureAction(2, R)), config);
  CHECK(std::abs(r.mean) <= 3 * r.ci95);
  CHECK(r.exact_fraction == 1.0);
  CHECK(r.per_state_means[0] == -2);
  CHECK(r.per_state_means[1] == 1);
  CHECK(r.ci95 == doctest::Approx(1.96 * r.stddev / 100.0));

  config.average_over_states = true;
  config.episodes = 10;
  const auto exact = EstimatePayoff(spec, f, *StationaryNonRevealing(PureAction(2, L)),
                                    *Stationary(PureAction(2, R)), config);
  CHECK(exact.mean == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(exact.ci95 <= 1e-15);
}

TEST_CASE("deterministic pairing with one episode") {
  const GameSpec spec = Example1Spec(0.5);
  const auto f = PayoffEvaluator::Example1();
  const auto sigma = StationaryNonRevealing(PureAction(2, L));
  const auto tau = Stationary(PureAction(2, L));
  SimConfig config;
  config.episodes = 1;
  config.horizon = 500;
  const auto r = EstimatePayoff(spec, f, *sigma, *tau, config);
  const auto ep = RunEpisode(spec, f, *sigma, *tau, config, 0);
  CHECK(r.mean == ep.payoff);
  CHECK(r.ci95 == 0.0);
}

TEST_CASE("reproducible across thread counts") {
  GameSpec spec = Example1Spec(0.5);
  spec.timing = Timing::kSimultaneous;
  Eigen::MatrixXd g1(2, 2), g2(2, 2);
  g1 << 1, 0, 0, 0;
  g2 << 0, 0, 0, 1;
  const auto f = PayoffEvaluator::LimsupAverage({g1, g2});
  const auto sigma = StationaryPerState({Eigen::Vector2d(0.6, 0.4), Eigen::Vector2d(0.4, 0.6)});
  const auto tau = MakeBlockResponse(spec, sigma, Belief({0.5, 0.5}), AverageOracle({g1, g2}), {});
  SimConfig config;
  config.episodes = 40;
  config.horizon = 300;
  config.master_seed = 5;
  const auto one = EstimatePayoff(spec, f, *sigma, *tau, config);
  config.threads = 3;
  const auto three = EstimatePayoff(spec, f, *sigma, *tau, config);
  CHECK(one.mean == three.mean);
  CHECK(one.ci95 == three.ci95);
  CHECK(one.blocks_mean == three.blocks_mean);
  for (std::size_t e = 0; e < one.episodes.size(); ++e) {
    CHECK(one.episodes[e].payoff == three.episodes[e].payoff);
    CHECK(one.episodes[e].seed == three.episodes[e].seed);
  }
  config.master_seed = 6;
  CHECK(EstimatePayoff(spec, f, *sigma, *tau, config).mean != one.mean);
}

TEST_CASE("recorded trajectories are martingale paths") {
  GameSpec spec = Example1Spec(0.5);
  spec.timing = Timing::kSimultaneous;
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
  const auto f = PayoffEvaluator::LimsupAverage({g, -g});
  const auto sigma = StationaryPerState({Eigen::Vector2d(0.55, 0.45), Eigen::Vector2d(0.45, 0.55)});
  BlockResponseOptions options;
  options.record_beliefs = true;
  options.epsilon = 0.3;
  options.payoff_range = 2.0;
  const auto tau = MakeBlockResponse(spec, sigma, Belief({0.5, 0.5}), AverageOracle({g, -g}), options);
  SimConfig config;
  config.horizon = 400;
  config.record_trajectory = true;
  const auto ep = RunEpisode(spec, f, *sigma, *tau, config, 0);
  REQUIRE(ep.trajectory.size() >= 2);
  REQUIRE(ep.history.size() == 400);
  for (const auto& row : ep.trajectory) {
    if (row.level > 0) break;
    CHECK(MartingaleResidual(spec, Belief({0.5, 0.5}), *sigma, ep.history.Prefix(row.stage)) <= 1e-10);
    CHECK(Belief(row.belief) == Posterior(Belief({0.5, 0.5}), *sigma, ep.history.Prefix(row.stage)));
  }
  CHECK(ep.blocks > 0);
  // Beliefs within a block stay close to its start.
  const double delta = SelectDelta(0.3, 2, 2.0);
  Eigen::VectorXd start = ep.trajectory[0].belief;
  int block = 0;
  for (const auto& row : ep.trajectory) {
    if (row.event != BlockEvent::kContinue) break;
    if (row.block_index != block) break;
    CHECK((row.belief - start).lpNorm<1>() < delta * 0.3);
  }
}

TEST_CASE("panel bounds") {
  const GameSpec spec = Example1Spec(0.5);
  const auto f = PayoffEvaluator::Example1();
  SimConfig config;
  config.episodes = 4;
  config.horizon = 2000;
  config.average_over_states = true;
  const auto panel = Example1Panel(spec, 11);
  const std::vector<NamedUninformed> first3(panel.begin(), panel.begin() + 3);
  const auto options = ExploitOptionsFor(config);
  const auto bound = PanelMin(
      spec, f, [&](const UninformedPtr& tau) { return MakeExample1Exploit(spec, f, tau, options); },
      first3, config);
  CHECK(bound.value >= 0.45);
  for (const auto& e : bound.entries) CHECK(e.result.exact_fraction == 1.0);

  // One-member panel equals estimate_payoff.
  const auto sigma = StationaryNonRevealing(PureAction(2, L));
  const auto single = PanelMin(spec, f, [&](const UninformedPtr&) { return sigma; },
                               {panel[0]}, config);
  CHECK(single.value == EstimatePayoff(spec, f, *sigma, *panel[0].strategy, config).mean);

  // Non-revealing game at 1/2: always r holds Player I to 0.
  const std::vector<NamedInformed> nr_panel{
      {"always-l", StationaryNonRevealing(PureAction(2, L))},
      {"always-r", StationaryNonRevealing(PureAction(2, R))}};
  const auto upper = PanelMax(spec, f, nr_panel,
                              [&](const InformedPtr&) { return panel[0].strategy; }, config);
  CHECK(upper.value <= 0.0 + 1e-12);
  CHECK_THROWS_AS(PanelMax(spec, f, {}, nullptr, config), Error);
}

TEST_CASE("config validation") {
  SimConfig config;
  config.episodes = 0;
  CHECK_THROWS_AS(ValidateConfig(config), Error);
  config.episodes = 1;
  config.horizon = 0;
  CHECK_THROWS_AS(ValidateConfig(config), Error);
}
