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

// Tail-measurable payoff evaluators.
//
// A tail-measurable payoff cannot be decided from any finite prefix, so each
// evaluator has two rules: an exact rule on lasso plays, where "infinitely
// often" means "occurs in the cycle" and limsup averages are cycle averages,
// and a finite-horizon surrogate on prefixes. The surrogates are
// approximations:
//   * LimsupAverage: the running average over the whole prefix.
//   * Example1, Example2, Buchi, CoBuchi, Parity: the prefix's last half is
//     treated as if it repeated forever.

#ifndef TAILCAV_PAYOFFS_HPP_
#define TAILCAV_PAYOFFS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "tailcav/game_core.hpp"

namespace tailcav {

enum class PayoffKind {
  kLimsupAverage,
  kBuchi,
  kCoBuchi,
  kParity,
  kExample1,
  kExample2,
  kCustom,
};

std::string ToString(PayoffKind kind);

struct PayoffBounds {
  double lower = 0.0;
  double upper = 1.0;
  double range() const { return upper - lower; }
  bool Contains(double x) const { return x >= lower && x <= upper; }
};

using LassoRule = std::function<double(int state, const LassoPlay& play)>;
using TruncatedRule =
    std::function<double(int state, const PublicHistory& history)>;

class PayoffEvaluator {
 public:
  // limsup_T (1/T) sum_t g_k(i_t, j_t). One |I| x |J| matrix per state.
  // Stage payoffs of pairs that contain the dummy action count as 0.
  static PayoffEvaluator LimsupAverage(std::vector<Eigen::MatrixXd> stage);
  // 1 if some target pair occurs infinitely often, else 0.
  static PayoffEvaluator Buchi(std::set<ActionPair> targets);
  // 1 if no target pair occurs infinitely often, else 0.
  static PayoffEvaluator CoBuchi(std::set<ActionPair> targets);
  // 1 if the least priority seen infinitely often is even, else 0.
  static PayoffEvaluator Parity(std::map<ActionPair, int> priorities,
                                int default_priority);
  // Payoffs of the two-state alternating-move examples; `ell_i`, `ell_j` are
  // the indices of action l for each player. State 0 is k1. A player's moves
  // are the coordinates that are not the dummy action, so these also work
  // under simultaneous timing.
  static PayoffEvaluator Example1(int ell_i = 0, int ell_j = 0);
  static PayoffEvaluator Example2(int ell_i = 0, int ell_j = 0,
                                  double threshold = 0.1);
  // Either rule may be empty. Without a lasso rule the evaluator is not
  // lasso-evaluable; without a truncated rule eval_truncated throws.
  static PayoffEvaluator Custom(std::string name, PayoffBounds bounds,
                                LassoRule lasso_rule,
                                TruncatedRule truncated_rule,
                                bool shift_invariant = false);

  PayoffKind kind() const;
  const std::string& name() const;
  PayoffBounds bounds() const;
  bool lasso_evaluable() const;
  // Invariant under deleting a finite prefix whose length is a multiple of
  // shift_stride().
  bool shift_invariant() const;
  std::size_t shift_stride() const;

  double EvalLasso(int state, const LassoPlay& play) const;
  double EvalTruncated(int state, const PublicHistory& history) const;

  struct Impl;

 private:
  explicit PayoffEvaluator(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Exact payoff f(state, play). Throws Error(kNotLassoEvaluable) for custom
// evaluators without a lasso rule.
double EvalLasso(const PayoffEvaluator& f, int state, const LassoPlay& play);

// Finite-horizon surrogate; requires history.size() >= 1.
double EvalTruncated(const PayoffEvaluator& f, int state,
                     const PublicHistory& history);

struct TailSample {
  int state = 0;
  LassoPlay play;
};

struct TailViolation {
  int state = 0;
  LassoPlay original;
  LassoPlay perturbed;
  double original_value = 0.0;
  double perturbed_value = 0.0;
};

struct TailReport {
  std::size_t evaluations = 0;
  std::vector<TailViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Rewrites every sample's prefix in place (same length, random valid pairs
// for `spec`) `perturbations` times and compares the exact payoffs.
TailReport CheckTailMeasurable(const PayoffEvaluator& f, const GameSpec& spec,
                               const std::vector<TailSample>& samples,
                               int perturbations, std::uint64_t seed);

// Same check with the prefix replaced by random prefixes whose length
// differs from the original by multiples of f.shift_stride().
TailReport CheckShiftInvariant(const PayoffEvaluator& f, const GameSpec& spec,
                               const std::vector<TailSample>& samples,
                               int perturbations, std::uint64_t seed);

// Random valid pair for the given stage.
template <typename Rng>
ActionPair RandomPair(const GameSpec& spec, std::size_t stage, Rng& rng);

// Random lasso with prefix length in [0, max_prefix] and cycle length in
// [1, max_cycle] (rounded up to the move period), valid for `spec`.
template <typename Rng>
LassoPlay RandomLasso(const GameSpec& spec, std::size_t max_prefix,
                      std::size_t max_cycle, Rng& rng);

}  // namespace tailcav

#include "tailcav/payoffs_inl.hpp"

#endif  // TAILCAV_PAYOFFS_HPP_
