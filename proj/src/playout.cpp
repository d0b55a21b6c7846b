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

#include "tailcav/playout.hpp"

#include <unordered_map>

namespace tailcav {
namespace {

struct KeyHash {
  std::size_t operator()(const MemoryKey& key) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::uint64_t x : key) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

PlayoutResult Playout(const GameSpec& spec, const PayoffEvaluator& f,
                      int state, Agent& sigma, Agent& tau, Rng& rng_i,
                      Rng& rng_j, const PlayoutOptions& options,
                      PublicHistory history) {
  PlayoutResult result;
  const bool detect = options.lasso_detection && f.lasso_evaluable();
  std::unordered_map<MemoryKey, std::size_t, KeyHash> seen;
  MemoryKey key;
  history.reserve(options.horizon);

  for (std::size_t t = history.size(); t < options.horizon; ++t) {
    const Mover mover = spec.MoverAt(t);
    const Distribution* dist_i =
        mover != Mover::kPlayerII ? &sigma.Next() : nullptr;
    const Distribution* dist_j =
        mover != Mover::kPlayerI ? &tau.Next() : nullptr;
    const bool pure =
        (!dist_i || IsPure(*dist_i)) && (!dist_j || IsPure(*dist_j));
    if (!pure) result.randomized = true;

    if (detect) {
      std::optional<MemoryKey> key_i, key_j;
      if (pure) {
        key_i = sigma.Memory();
        if (key_i) key_j = tau.Memory();
      }
      if (key_i && key_j) {
        key.clear();
        key.push_back(t % spec.period());
        key.push_back(static_cast<std::uint64_t>(state));
        AppendKey(key, *key_i);
        AppendKey(key, *key_j);
        const auto [it, inserted] = seen.emplace(key, t);
        if (!inserted) {
          const std::size_t start = it->second;
          result.lasso.emplace(history.Prefix(start),
                               history.Slice(start, history.size()));
          result.payoff = f.EvalLasso(state, *result.lasso);
          result.exact = true;
          result.history = std::move(history);
          return result;
        }
      } else {
        seen.clear();
      }
    }

    ActionPair pair{kDummy, kDummy};
    if (dist_i) pair.i = rng_i.Sample(*dist_i);
    if (dist_j) pair.j = rng_j.Sample(*dist_j);
    history.push_back(pair);
    sigma.Observe(pair);
    tau.Observe(pair);
  }
  result.payoff = f.EvalTruncated(state, history);
  result.history = std::move(history);
  return result;
}

}  // namespace tailcav
