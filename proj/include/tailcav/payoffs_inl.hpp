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

#ifndef TAILCAV_PAYOFFS_INL_HPP_
#define TAILCAV_PAYOFFS_INL_HPP_

#include <random>

namespace tailcav {

template <typename Rng>
ActionPair RandomPair(const GameSpec& spec, std::size_t stage, Rng& rng) {
  const Mover mover = spec.MoverAt(stage);
  ActionPair pair{kDummy, kDummy};
  if (mover != Mover::kPlayerII) {
    pair.i = std::uniform_int_distribution<int>(0, spec.num_actions_i() - 1)(rng);
  }
  if (mover != Mover::kPlayerI) {
    pair.j = std::uniform_int_distribution<int>(0, spec.num_actions_j() - 1)(rng);
  }
  return pair;
}

template <typename Rng>
LassoPlay RandomLasso(const GameSpec& spec, std::size_t max_prefix,
                      std::size_t max_cycle, Rng& rng) {
  const std::size_t prefix_len =
      std::uniform_int_distribution<std::size_t>(0, max_prefix)(rng);
  std::size_t cycle_len =
      std::uniform_int_distribution<std::size_t>(1, max_cycle)(rng);
  const std::size_t period = spec.period();
  cycle_len = (cycle_len + period - 1) / period * period;
  PublicHistory prefix, cycle;
  for (std::size_t t = 0; t < prefix_len; ++t) {
    prefix.push_back(RandomPair(spec, t, rng));
  }
  for (std::size_t t = 0; t < cycle_len; ++t) {
    cycle.push_back(RandomPair(spec, prefix_len + t, rng));
  }
  return LassoPlay(std::move(prefix), std::move(cycle));
}

}  // namespace tailcav

#endif  // TAILCAV_PAYOFFS_INL_HPP_
