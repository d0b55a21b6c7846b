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
#include "tailcav/game_core.hpp"

using namespace tailcav;

namespace {
constexpr int L = 0, R = 1, D = kDummy;
}

TEST_CASE("validate_spec") {
  GameSpec spec = Example1Spec(0.5);
  CHECK(ValidateSpec(spec).ok());

  spec.prior = Eigen::Vector2d(0.7, 0.7);
  auto report = ValidateSpec(spec);
  REQUIRE_FALSE(report.ok());
  CHECK(report.errors[0].find("prior sums to 1.4") != std::string::npos);

  spec = Example1Spec(0.5);
  spec.actions_i.clear();
  report = ValidateSpec(spec);
  REQUIRE_FALSE(report.ok());
  CHECK(report.errors[0].find("empty action set") != std::string::npos);
  CHECK_THROWS_AS(RequireValid(spec), Error);

  spec = Example1Spec(0.5);
  spec.prior = Eigen::Vector2d(1.2, -0.2);
  CHECK_FALSE(ValidateSpec(spec).ok());
}

TEST_CASE("belief invariants") {
  CHECK_NOTHROW(Belief({0.25, 0.75}));
  CHECK_THROWS_AS(Belief({0.5, 0.6}), Error);
  CHECK_THROWS_AS(Belief({-0.1, 1.1}), Error);
  // 1e-12 tolerance.
  CHECK_NOTHROW(Belief({0.5, 0.5 + 5e-13}));
  CHECK(Belief::Normalized(Eigen::Vector3d(1, 1, 2)) == Belief({0.25, 0.25, 0.5}));
  try {
    Belief::Normalized(Eigen::Vector2d::Zero());
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNullHistory);
    CHECK(std::string(e.what()) == "posterior undefined on null history");
  }
  CHECK(Belief::TwoState(0.25)[1] == doctest::Approx(0.75));
  CHECK(Belief({1, 0}).L1Distance(Belief({0, 1})) == 2.0);
}

TEST_CASE("concat") {
  const PublicHistory a{{L, R}};
  const PublicHistory b{{R, L}};
  CHECK(Concat(a, {}) == a);
  CHECK(Concat({}, PublicHistory{{R, R}}) == PublicHistory{{R, R}});
  CHECK(Concat(a, b) == PublicHistory{{L, R}, {R, L}});

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> act(0, 1);
  auto random_history = [&](int n) {
    PublicHistory h;
    for (int t = 0; t < n; ++t) h.push_back({act(rng), act(rng)});
    return h;
  };
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_history(trial % 4);
    const auto y = random_history(trial % 3);
    const auto z = random_history(trial % 5);
    CHECK(Concat(Concat(x, y), z) == Concat(x, Concat(y, z)));
    const auto xy = Concat(x, y);
    CHECK(xy.size() == x.size() + y.size());
    CHECK(xy.Prefix(x.size()) == x);
    CHECK(xy.Slice(x.size(), xy.size()) == y);
  }
}

TEST_CASE("unroll") {
  CHECK(Unroll(LassoPlay({}, {{R, R}}), 3) ==
        PublicHistory{{R, R}, {R, R}, {R, R}});
  CHECK(Unroll(LassoPlay({{L, L}}, {{R, R}}), 1) == PublicHistory{{L, L}});
  const LassoPlay lasso({{L, L}}, {{R, L}, {L, R}});
  CHECK(Unroll(lasso, 4) == PublicHistory{{L, L}, {R, L}, {L, R}, {R, L}});
  CHECK_THROWS_AS(LassoPlay({{L, L}}, {}), Error);

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> act(0, 2), len(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    PublicHistory prefix, cycle;
    for (int t = len(rng); t > 0; --t) prefix.push_back({act(rng), act(rng)});
    for (int t = len(rng) + 1; t > 0; --t) cycle.push_back({act(rng), act(rng)});
    const LassoPlay play(prefix, cycle);
    const auto long_run = Unroll(play, 40);
    CHECK(long_run == oracle::NaiveUnroll(play, 40));
    for (std::size_t t = 0; t <= 40; t += 7) {
      CHECK(Unroll(play, t) == long_run.Prefix(t));
      if (t < 40) CHECK(play.At(t) == long_run[t]);
    }
  }
}

TEST_CASE("alternating timing and history validation") {
  const GameSpec spec = Example1Spec();
  CHECK(spec.MoverAt(0) == Mover::kPlayerI);
  CHECK(spec.MoverAt(1) == Mover::kPlayerII);
  CHECK(spec.period() == 2);
  CHECK(ValidateHistory(spec, {{L, D}, {D, R}, {R, D}}).ok());
  CHECK_FALSE(ValidateHistory(spec, {{L, R}}).ok());
  CHECK_FALSE(ValidateHistory(spec, {{D, R}}).ok());
  CHECK(ValidateHistory(spec, {{D, R}}, 1).ok());
  CHECK_FALSE(ValidateHistory(spec, {{2, D}}).ok());
  CHECK(spec.ActionI("r") == R);
  CHECK_THROWS_AS(spec.StateIndex("k3"), Error);
}
