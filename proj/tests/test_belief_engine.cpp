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
#include "oracles.hpp"
#include "tailcav/belief_engine.hpp"
#include "tailcav/strategies.hpp"

using namespace tailcav;

namespace {
constexpr int L = 0, R = 1, D = kDummy;

InformedPtr Mixed(double k1_l, double k2_l) {
  return StationaryPerState({Eigen::Vector2d(k1_l, 1 - k1_l), Eigen::Vector2d(k2_l, 1 - k2_l)});
}

bool Near(const Belief& a, const Eigen::VectorXd& b, double tol = 1e-12) {
  return (a.weights() - b).cwiseAbs().maxCoeff() <= tol;
}
}  // namespace

TEST_CASE("posterior examples") {
  const Belief half{0.5, 0.5};
  const auto nr = StationaryNonRevealing(Eigen::Vector2d(0.3, 0.7));
  CHECK(Posterior(half, *nr, {{L, D}, {D, R}, {R, D}}) == half);

  const auto reveal = StationaryPerState({PureAction(2, L), PureAction(2, R)});
  CHECK(Posterior(half, *reveal, {{L, D}}) == Belief({1, 0}));

  CHECK(Near(Posterior(half, *Mixed(0.75, 0.25), {{L, D}}),
             Eigen::Vector2d(0.75, 0.25)));

  try {
    Posterior(Belief({1, 0}), *reveal, {{R, D}});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNullHistory);
    CHECK(std::string(e.what()) == "posterior undefined on null history");
  }
}

TEST_CASE("posterior matches the Bayes product and ignores II's moves") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::uniform_int_distribution<int> act(0, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 2;
    std::vector<Distribution> per_state;
    for (int k = 0; k < n; ++k) {
      Eigen::Vector3d w(u(rng), u(rng), u(rng));
      per_state.push_back(w / w.sum());
    }
    const auto sigma = StationaryPerState(per_state);
    Eigen::VectorXd pw(n);
    for (int k = 0; k < n; ++k) pw[k] = u(rng);
    const Belief p = Belief::Normalized(pw);
    PublicHistory h, h_other_j;
    for (int t = 0; t < 12; ++t) {
      const int i = act(rng);
      h.push_back({i, act(rng)});
      h_other_j.push_back({i, act(rng)});
    }
    const Belief post = Posterior(p, *sigma, h);
    CHECK(Near(post, oracle::BayesProduct(p.weights(), *sigma, h), 1e-12));
    CHECK(Near(post, Posterior(p, *sigma, h_other_j).weights(), 0.0));
  }
}

TEST_CASE("support_above, renormalize_xi, is_boundary") {
  CHECK(SupportAbove(Belief({0.9, 0.1}), 0.3) == std::vector<int>{0});
  CHECK(SupportAbove(Belief({0.5, 0.5}), 0.3) == std::vector<int>{0, 1});
  CHECK(SupportAbove(Belief({1.0, 0.0}), 0.01) == std::vector<int>{0});

  CHECK(RenormalizeXi(Belief({0.9, 0.1}), 0.3) == Belief({1, 0}));
  CHECK(RenormalizeXi(Belief({0.5, 0.5}), 0.3) == Belief({0.5, 0.5}));
  CHECK(Near(RenormalizeXi(Belief({0.6, 0.3, 0.1}), 0.6),
             Eigen::Vector3d(2.0 / 3, 1.0 / 3, 0)));

  CHECK_FALSE(IsBoundary(Belief({0.5, 0.5}), 0.3));
  CHECK(IsBoundary(Belief({0.9, 0.1}), 0.3));
  CHECK(IsBoundary(Belief({1.0, 0.0}), 0.01));

  // xi is the identity off the boundary.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    const Belief p = Belief::Normalized(Eigen::Vector3d(u(rng), u(rng), u(rng)));
    const double delta = 0.5 * u(rng);
    if (!IsBoundary(p, delta)) CHECK(RenormalizeXi(p, delta) == p);
    CHECK_FALSE(SupportAbove(p, delta).empty());
  }

  // Restricted to an active mask: inactive states do not count.
  const StateMask active{true, true, false};
  CHECK_FALSE(IsBoundary(Belief({0.5, 0.5, 0.0}), 0.3, active));
  CHECK(SupportAbove(Belief({0.5, 0.5, 0.0}), 0.3, active) == std::vector<int>{0, 1});
}

TEST_CASE("block_step") {
  {
    BlockTracker t(0.1, 0.005, Belief({0.5, 0.5}));
    CHECK(t.Step(Belief({0.5, 0.5}), 1) == BlockEvent::kContinue);
    CHECK(t.Step(Belief({0.501, 0.499}), 2) == BlockEvent::kNewBlock);
    CHECK(t.block_index() == 1);
    CHECK(t.block_start_belief() == Belief({0.501, 0.499}));
    CHECK(t.block_start_stage() == 2);
    CHECK(t.Step(Belief({0.5011, 0.4989}), 3) == BlockEvent::kContinue);
  }
  {
    BlockTracker t(0.9, 0.3, Belief({0.5, 0.5}));
    CHECK(t.Step(Belief({0.9, 0.1}), 1) == BlockEvent::kTheta);
    CHECK(t.theta_reached());
  }
  CHECK_THROWS_AS(BlockTracker(0.1, 0.02, Belief({0.5, 0.5})), Error);
  CHECK_THROWS_AS(BlockTracker(1.5, 0.02, Belief({0.5, 0.5})), Error);
  CHECK(SelectDelta(0.05, 2, 1.0) == doctest::Approx(0.00125));
  CHECK(SelectDelta(0.5, 4, 4.0) == doctest::Approx(0.5 / 16));
  CHECK(SelectDelta(0.5, 4, 4.0) < 0.25);
}

TEST_CASE("martingale residual examples") {
  const GameSpec spec = Example1Spec();
  const Belief half{0.5, 0.5};
  CHECK(MartingaleResidual(spec, half, *StationaryNonRevealing(Eigen::Vector2d(0.4, 0.6)), {}) == 0.0);
  const auto reveal = StationaryPerState({PureAction(2, L), PureAction(2, R)});
  CHECK(MartingaleResidual(spec, half, *reveal, {}) <= 1e-15);
  CHECK(MartingaleResidual(spec, half, *Mixed(0.75, 0.25), {}) <= 1e-15);
  // II to move: zero by construction.
  CHECK(MartingaleResidual(spec, half, *Mixed(0.75, 0.25), {{L, D}}) == 0.0);
}

TEST_CASE("posterior state keeps mass off zero-prior states") {
  const auto sigma = Mixed(0.75, 0.25);
  PosteriorState s(*sigma, Belief({0.0, 1.0}));
  s.Observe({L, D});
  CHECK(s.belief() == Belief({0.0, 1.0}));
  CHECK(s.stage() == 1);

  const auto reveal = StationaryPerState({PureAction(2, L), PureAction(2, R)});
  PosteriorState r(*reveal, Belief({1.0, 0.0}));
  CHECK_THROWS_AS(r.Observe({R, D}), Error);
  // Unchanged after the failed update.
  CHECK(r.belief() == Belief({1.0, 0.0}));
  CHECK(r.stage() == 0);
}
