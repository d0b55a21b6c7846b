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

#include <functional>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tailcav/belief_engine.hpp"
#include "tailcav/playout.hpp"
#include "tailcav/seeding.hpp"
#include "tailcav/strategies.hpp"

using namespace tailcav;

namespace {
constexpr int L = 0, R = 1, D = kDummy;

GameSpec Simultaneous(int num_states, int num_i, int num_j) {
  GameSpec spec;
  for (int k = 0; k < num_states; ++k) spec.states.push_back("k" + std::to_string(k + 1));
  for (int a = 0; a < num_i; ++a) spec.actions_i.push_back("i" + std::to_string(a));
  for (int a = 0; a < num_j; ++a) spec.actions_j.push_back("j" + std::to_string(a));
  spec.prior = Eigen::VectorXd::Constant(num_states, 1.0 / num_states);
  return spec;
}

// Exact payoff of a deterministic pairing in one state.
double Exact(const GameSpec& spec, const PayoffEvaluator& f, const InformedStrategy& sigma,
             const UninformedStrategy& tau, int state) {
  auto a = sigma.Start(state);
  auto b = tau.Start();
  Rng ri(1), rj(2);
  const auto r = Playout(spec, f, state, *a, *b, ri, rj, {10000, true});
  REQUIRE(r.exact);
  return r.payoff;
}

// Every encoding of every signal, with probabilities by replay, checked
// against the plan.
void CheckSplittingExact(const GameSpec& spec, const SplitPlan& plan) {
  const auto sigma = MakeSplitting(spec, plan);
  const int m = static_cast<int>(plan.weights.size());
  const int ni = spec.num_actions_i();
  const int len = SignalLength(m, ni);
  const bool alt = spec.timing == Timing::kAlternating;
  for (int s = 0; s < m; ++s) {
    PublicHistory h;
    for (int d : EncodeSignal(s, m, ni)) {
      h.push_back({d, alt ? D : 0});
      if (alt) h.push_back({D, R});
    }
    double marginal = 0.0;
    for (int k = 0; k < spec.num_states(); ++k) {
      if (plan.prior[k] == 0.0) continue;
      double prob = 1.0;
      for (std::size_t t = 0; t < h.size(); ++t) {
        if (h[t].i == D) continue;
        prob *= Behavior(*sigma, k, h.Prefix(t))[h[t].i];
      }
      marginal += plan.prior[k] * prob;
    }
    CHECK(std::abs(marginal - plan.weights[s]) <= 1e-10);
    if (plan.weights[s] > 0) {
      const Belief post = Posterior(plan.prior, *sigma, h);
      CHECK((post.weights() - plan.posteriors[s].weights()).cwiseAbs().maxCoeff() <= 1e-10);
    }
    CHECK(static_cast<int>(EncodeSignal(s, m, ni).size()) == len);
  }
}

}  // namespace

TEST_CASE("stationary strategies") {
  const auto always_r = Stationary(PureAction(2, R));
  auto agent = always_r->Start();
  CHECK(agent->Next() == PureAction(2, R));
  agent->Observe({L, L});
  CHECK(agent->Memory() == MemoryKey{});
  CHECK(IsPure(agent->Next()));

  const auto mixed = Stationary(Eigen::Vector2d(0.5, 0.5));
  CHECK_FALSE(IsPure(mixed->Start()->Next()));
  CHECK_THROWS_AS(Stationary(Eigen::Vector2d(0.5, 0.6)), Error);

  const auto reveal = StationaryPerState({PureAction(2, L), PureAction(2, R)});
  CHECK(Behavior(*reveal, 0, {}) == PureAction(2, L));
  CHECK(Behavior(*reveal, 1, {{R, R}}) == PureAction(2, R));
}

TEST_CASE("machines") {
  MachineTable once(2, 2, 2, PureAction(2, L));
  once.SetOutput(1, PureAction(2, R));
  for (int j = 0; j < 2; ++j) once.SetTransition(0, MachineTable::kAny, j, 1);
  const auto tau = Machine(once, "once");
  CHECK(Behavior(*tau, {}) == PureAction(2, L));
  CHECK(Behavior(*tau, {{L, D}}) == PureAction(2, L));
  CHECK(Behavior(*tau, {{L, D}, {D, L}}) == PureAction(2, R));

  const auto random = RandomMachineII(3, 2, 2, 42);
  CHECK(random.num_memory() == 3);
  const auto again = RandomMachineII(3, 2, 2, 42);
  for (int m = 0; m < 3; ++m) CHECK(random.Output(m) == again.Output(m));
}

TEST_CASE("splitting conditional signal probabilities") {
  const GameSpec spec = Simultaneous(2, 2, 2);
  const Belief half{0.5, 0.5};
  auto nr = [](double a) { return StationaryNonRevealing(Eigen::Vector2d(a, 1 - a)); };

  SplitPlan full{half, {Belief({1, 0}), Belief({0, 1})}, {0.5, 0.5}, {nr(1), nr(0)}};
  auto sigma = MakeSplitting(spec, full);
  // Signal index 1 is code "1", i.e. action 1 at stage 0.
  CHECK(Behavior(*sigma, 0, {})[1] == 0.0);
  CHECK(Behavior(*sigma, 1, {})[1] == 1.0);
  CheckSplittingExact(spec, full);

  SplitPlan partial{half, {Belief({0.75, 0.25}), Belief({0.25, 0.75})}, {0.5, 0.5},
                    {nr(1), nr(0)}};
  sigma = MakeSplitting(spec, partial);
  CHECK(Behavior(*sigma, 0, {})[0] == doctest::Approx(0.75));
  CheckSplittingExact(spec, partial);

  SplitPlan none{half, {half}, {1.0}, {nr(0.3)}};
  CHECK(SignalLength(1, 2) == 0);
  sigma = MakeSplitting(spec, none);
  CHECK(Posterior(half, *sigma, {{0, 0}, {1, 1}, {1, 0}}) == half);

  SplitPlan bad{half, {Belief({1, 0}), Belief({0, 1})}, {0.3, 0.7}, {nr(1), nr(0)}};
  try {
    MakeSplitting(spec, bad);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasiblePlan);
    CHECK(std::string(e.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("splitting exactness on random plans") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 2;
    const int ni = 2 + trial % 3;
    GameSpec spec = Simultaneous(n, ni, 2);
    if (trial % 4 == 0) spec.timing = Timing::kAlternating;
    const int m = 1 + trial % 5;
    SplitPlan plan{Belief::Uniform(n), {}, {}, {}};
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd lambda(m);
    for (int s = 0; s < m; ++s) lambda[s] = 0.1 + u(rng);
    lambda /= lambda.sum();
    for (int s = 0; s < m; ++s) {
      Eigen::VectorXd w(n);
      for (int k = 0; k < n; ++k) w[k] = (trial % 3 == 0 && k == s % n) ? 0.0 : u(rng) + 0.01;
      plan.posteriors.push_back(Belief::Normalized(w));
      plan.weights.push_back(lambda[s]);
      mean += lambda[s] * plan.posteriors.back().weights();
      plan.continuations.push_back(StationaryNonRevealing(PureAction(ni, s % ni)));
    }
    plan.prior = Belief::Normalized(mean);
    CheckSplittingExact(spec, plan);
  }
}

TEST_CASE("optimal split for cav in the first example") {
  const GameSpec spec = Example1Spec(0.5);
  const auto oracle = Example1Oracle(spec);
  const auto env = EnvelopeFromOracle(*oracle, 2, 0.01);
  const auto plan = OptimalSplitForCav(Belief({0.5, 0.5}), env, *oracle);
  REQUIRE(plan.weights.size() == 2);
  CHECK(plan.posteriors[0][0] == doctest::Approx(0.0));
  CHECK(plan.posteriors[1][0] == doctest::Approx(2.0 / 3));
  CHECK(plan.weights[0] == doctest::Approx(0.25));
  double value = 0.0;
  for (std::size_t s = 0; s < 2; ++s) value += plan.weights[s] * UExample1(plan.posteriors[s][0]);
  CHECK(value == doctest::Approx(0.25));
  CheckSplittingExact(spec, plan);

  // At a vertex: one signal.
  CHECK(OptimalSplitForCav(Belief({1, 0}), env, *oracle).weights.size() == 1);
  // Concave u: one signal at every p.
  const auto grid = SimplexGrid(2, 0.1);
  std::vector<double> concave;
  for (const auto& q : grid) concave.push_back(q[0] * (1 - q[0]));
  const ConcaveEnvelope flat(grid, concave);
  CHECK(OptimalSplitForCav(Belief({0.3, 0.7}), flat, *oracle).weights.size() == 1);
}

TEST_CASE("block response against a non-revealing sigma") {
  const GameSpec spec = Simultaneous(2, 2, 2);
  Eigen::MatrixXd g1(2, 2), g2(2, 2);
  g1 << 1, 0, 0, 0;
  g2 << 0, 0, 0, 1;
  const auto oracle = AverageOracle({g1, g2});
  const Belief p{0.4, 0.6};
  const auto sigma = StationaryNonRevealing(Eigen::Vector2d(0.3, 0.7));
  const auto tau = MakeBlockResponse(spec, sigma, p, oracle, {});
  const Distribution expected = Behavior(*oracle->Respond(p, {}), {});
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> act(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    PublicHistory h;
    for (int t = 0; t < trial % 30; ++t) h.push_back({act(rng), act(rng)});
    CHECK((Behavior(*tau, h) - expected).cwiseAbs().maxCoeff() == 0.0);
  }
  auto agent = tau->Start();
  for (int t = 0; t < 10000; ++t) agent->Observe({act(rng), act(rng)});
  REQUIRE(agent->Trace() != nullptr);
  CHECK(agent->Trace()->NewBlockCount() == 0);
  CHECK_FALSE(agent->Trace()->ThetaStage().has_value());
}

TEST_CASE("block response against full revelation") {
  const GameSpec spec = Example1Spec(0.5);
  const auto oracle = Example1Oracle(spec);
  const Belief half{0.5, 0.5};
  SplitPlan plan{half, {Belief({1, 0}), Belief({0, 1})}, {0.5, 0.5},
                 {oracle->Guarantee(Belief({1, 0})), oracle->Guarantee(Belief({0, 1}))}};
  const auto sigma = MakeSplitting(spec, plan);
  const auto tau = MakeBlockResponse(spec, sigma, half, oracle, {});
  for (int k = 0; k < 2; ++k) {
    auto a = sigma->Start(k);
    auto b = tau->Start();
    Rng ri(5), rj(6);
    const auto r = Playout(spec, PayoffEvaluator::Example1(), k, *a, *b, ri, rj, {10000, false});
    const BlockTrace& trace = *b->Trace();
    REQUIRE(trace.events.size() == 1);
    CHECK(trace.events[0].event == BlockEvent::kTheta);
    CHECK(trace.events[0].stage == 1);
    REQUIRE(trace.oracle_queries.size() == 2);
    CHECK(trace.oracle_queries[1].second == 1);
    CHECK(trace.oracle_queries[1].first == Belief::Vertex(2, k).weights());
    CHECK(r.history.size() == 10000);
  }
}

TEST_CASE("block response queries follow the block starts") {
  const GameSpec spec = Simultaneous(3, 3, 2);
  std::vector<Eigen::MatrixXd> stage;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 3; ++k) stage.push_back(Eigen::MatrixXd::NullaryExpr(3, 2, [&] { return u(rng); }));
  const auto oracle = AverageOracle(stage);
  const Belief p{0.3, 0.3, 0.4};
  std::vector<Distribution> per_state;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d w = Eigen::Vector3d::Constant(1.0);
    w[k] += 0.05;
    per_state.push_back(w / w.sum());
  }
  const auto sigma = StationaryPerState(per_state);
  BlockResponseOptions options;
  options.epsilon = 0.2;
  const auto tau = MakeBlockResponse(spec, sigma, p, oracle, options);
  const double delta = SelectDelta(0.2, 3, 1.0);

  for (int run = 0; run < 5; ++run) {
    auto agent = tau->Start();
    PosteriorState post(*sigma, p);
    BlockTracker tracker(0.2, delta, p);
    std::vector<Eigen::VectorXd> starts{p.weights()};
    Rng draw(100 + run);
    bool theta = false;
    for (int t = 0; t < 3000 && !theta; ++t) {
      const ActionPair pair{draw.Sample(per_state[run % 3]), 0};
      agent->Observe(pair);
      const Belief before = post.belief();
      post.Observe(pair);
      if (post.belief() == before) continue;
      switch (tracker.Step(post.belief(), post.stage())) {
        case BlockEvent::kNewBlock: starts.push_back(post.belief().weights()); break;
        case BlockEvent::kTheta: theta = true; break;
        default: break;
      }
    }
    const auto& queries = agent->Trace()->oracle_queries;
    REQUIRE(queries.size() >= starts.size());
    for (std::size_t n = 0; n < starts.size(); ++n) {
      CHECK(queries[n].first == starts[n]);
      CHECK(queries[n].second == 3);
    }
    CHECK(starts.size() > 1);
    if (theta) {
      CHECK(queries.size() == starts.size() + 1);
      CHECK(queries.back().second < 3);
    }
  }
}

TEST_CASE("exploit against the panel, exactly") {
  const GameSpec spec = Example1Spec(0.5);
  const auto f = PayoffEvaluator::Example1();
  const auto panel = Example1Panel(spec, 7);
  REQUIRE(panel.size() == 5);
  ExploitOptions options;
  for (std::size_t n = 0; n < 4; ++n) {
    const auto sigma = MakeExample1Exploit(spec, f, panel[n].strategy, options);
    const double k1 = Exact(spec, f, *sigma, *panel[n].strategy, 0);
    const double k2 = Exact(spec, f, *sigma, *panel[n].strategy, 1);
    CAPTURE(panel[n].name);
    CHECK(0.5 * k1 + 0.5 * k2 == doctest::Approx(0.5));
  }
  const auto vs_r = MakeExample1Exploit(spec, f, panel[0].strategy, options);
  CHECK(Exact(spec, f, *vs_r, *panel[0].strategy, 0) == 0);
  CHECK(Exact(spec, f, *vs_r, *panel[0].strategy, 1) == 1);
  const auto vs_l = MakeExample1Exploit(spec, f, panel[1].strategy, options);
  CHECK(Exact(spec, f, *vs_l, *panel[1].strategy, 0) == -1);
  CHECK(Exact(spec, f, *vs_l, *panel[1].strategy, 1) == 2);
}

TEST_CASE("exploit is always r under k1") {
  const GameSpec spec = Example1Spec(0.5);
  const auto f = PayoffEvaluator::Example1();
  const auto tau = Example1Panel(spec, 3)[4].strategy;
  const auto sigma = MakeExample1Exploit(spec, f, tau, {});
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    PublicHistory h;
    const int len = trial * 3;
    for (int t = 0; t < len; ++t) {
      h.push_back(t % 2 == 0 ? ActionPair{static_cast<int>(rng() % 2), D}
                             : ActionPair{D, static_cast<int>(rng() % 2)});
    }
    if (h.size() % 2 == 1) h.push_back({D, L});
    CHECK(Behavior(*sigma, 0, h) == PureAction(2, R));
  }
}
