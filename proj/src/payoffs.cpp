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

#include "tailcav/payoffs.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <span>
#include <variant>

namespace tailcav {

namespace {

struct AverageParams {
  std::vector<Eigen::MatrixXd> stage;
};
struct BuchiParams {
  std::set<ActionPair> targets;
};
struct CoBuchiParams {
  std::set<ActionPair> targets;
};
struct ParityParams {
  std::map<ActionPair, int> priorities;
  int default_priority = 0;
};
struct ExampleParams {
  int ell_i = 0;
  int ell_j = 0;
  double threshold = 0.1;  // Example 2 only
};
struct CustomParams {
  LassoRule lasso;
  TruncatedRule truncated;
};

using Params = std::variant<AverageParams, BuchiParams, CoBuchiParams,
                            ParityParams, ExampleParams, CustomParams>;

// Which moves are ell, over a window of pairs. Dummy coordinates are not
// moves.
struct EllCounts {
  std::size_t i_moves = 0;
  std::size_t i_ell = 0;
  std::size_t j_moves = 0;
  std::size_t j_ell = 0;
};

EllCounts CountEll(std::span<const ActionPair> window, int ell_i, int ell_j) {
  EllCounts c;
  for (const auto& [i, j] : window) {
    if (i != kDummy) {
      ++c.i_moves;
      if (i == ell_i) ++c.i_ell;
    }
    if (j != kDummy) {
      ++c.j_moves;
      if (j == ell_j) ++c.j_ell;
    }
  }
  return c;
}

// Case table shared by both examples: state 0 is k1.
double ExampleCase(int state, bool ii_ell, bool i_ell) {
  if (ii_ell) return state == 0 ? -1.0 : 2.0;
  if (i_ell) return state == 0 ? -2.0 : 1.0;
  return 0.0;
}

double Example1Window(int state, std::span<const ActionPair> window,
                      const ExampleParams& p) {
  const auto c = CountEll(window, p.ell_i, p.ell_j);
  return ExampleCase(state, c.j_ell > 0, c.i_ell > 0);
}

double Density(std::size_t hits, std::size_t moves) {
  return moves == 0 ? 0.0 : static_cast<double>(hits) / moves;
}

double Example2Window(int state, std::span<const ActionPair> window,
                      const ExampleParams& p) {
  const auto c = CountEll(window, p.ell_i, p.ell_j);
  const double d1 = Density(c.i_ell, c.i_moves);
  const double d2 = Density(c.j_ell, c.j_moves);
  return ExampleCase(state, d2 > p.threshold, d1 > p.threshold);
}

double StagePayoff(const AverageParams& p, int state, const ActionPair& a) {
  if (a.i == kDummy || a.j == kDummy) return 0.0;
  return p.stage[state](a.i, a.j);
}

double AverageWindow(const AverageParams& p, int state,
                     std::span<const ActionPair> window) {
  double sum = 0.0;
  for (const auto& a : window) sum += StagePayoff(p, state, a);
  return sum / static_cast<double>(window.size());
}

bool AnyTarget(const std::set<ActionPair>& targets,
               std::span<const ActionPair> window) {
  return std::any_of(window.begin(), window.end(), [&](const ActionPair& a) {
    return targets.contains(a);
  });
}

double ParityWindow(const ParityParams& p, std::span<const ActionPair> window) {
  int least = std::numeric_limits<int>::max();
  for (const auto& a : window) {
    const auto it = p.priorities.find(a);
    least = std::min(least, it == p.priorities.end() ? p.default_priority
                                                     : it->second);
  }
  return least % 2 == 0 ? 1.0 : 0.0;
}

// Exact rule on a repeating window and the truncated rule on a last-half
// window coincide for the tail conditions.
double EvalRepeatingWindow(const Params& params, PayoffKind kind, int state,
                           std::span<const ActionPair> window) {
  switch (kind) {
    case PayoffKind::kLimsupAverage:
      return AverageWindow(std::get<AverageParams>(params), state, window);
    case PayoffKind::kBuchi:
      return AnyTarget(std::get<BuchiParams>(params).targets, window) ? 1.0
                                                                      : 0.0;
    case PayoffKind::kCoBuchi:
      return AnyTarget(std::get<CoBuchiParams>(params).targets, window) ? 0.0
                                                                        : 1.0;
    case PayoffKind::kParity:
      return ParityWindow(std::get<ParityParams>(params), window);
    case PayoffKind::kExample1:
      return Example1Window(state, window, std::get<ExampleParams>(params));
    case PayoffKind::kExample2:
      return Example2Window(state, window, std::get<ExampleParams>(params));
    case PayoffKind::kCustom:
      break;
  }
  throw Error(ErrorCode::kValidation, "no window rule for custom evaluator");
}

}  // namespace

struct PayoffEvaluator::Impl {
  PayoffKind kind;
  std::string name;
  PayoffBounds bounds;
  bool shift_invariant = true;
  std::size_t shift_stride = 1;
  Params params;
};

std::string ToString(PayoffKind kind) {
  switch (kind) {
    case PayoffKind::kLimsupAverage:
      return "average";
    case PayoffKind::kBuchi:
      return "buchi";
    case PayoffKind::kCoBuchi:
      return "cobuchi";
    case PayoffKind::kParity:
      return "parity";
    case PayoffKind::kExample1:
      return "example1";
    case PayoffKind::kExample2:
      return "example2";
    case PayoffKind::kCustom:
      return "custom";
  }
  return "unknown";
}

PayoffEvaluator PayoffEvaluator::LimsupAverage(
    std::vector<Eigen::MatrixXd> stage) {
  if (stage.empty()) {
    throw Error(ErrorCode::kValidation, "average payoff needs stage matrices");
  }
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& g : stage) {
    if (g.size() == 0 || g.rows() != stage[0].rows() ||
        g.cols() != stage[0].cols()) {
      throw Error(ErrorCode::kValidation,
                  "stage matrices must be nonempty and of equal shape");
    }
    if (!g.allFinite()) {
      throw Error(ErrorCode::kValidation, "stage payoffs must be finite");
    }
    lo = first ? g.minCoeff() : std::min(lo, g.minCoeff());
    hi = first ? g.maxCoeff() : std::max(hi, g.maxCoeff());
    first = false;
  }
  // Dummy pairs pay 0.
  lo = std::min(lo, 0.0);
  hi = std::max(hi, 0.0);
  return PayoffEvaluator(std::make_shared<const Impl>(
      Impl{PayoffKind::kLimsupAverage, "average", {lo, hi}, true, 1,
           AverageParams{std::move(stage)}}));
}

PayoffEvaluator PayoffEvaluator::Buchi(std::set<ActionPair> targets) {
  return PayoffEvaluator(std::make_shared<const Impl>(
      Impl{PayoffKind::kBuchi, "buchi", {0.0, 1.0}, true, 1,
           BuchiParams{std::move(targets)}}));
}

PayoffEvaluator PayoffEvaluator::CoBuchi(std::set<ActionPair> targets) {
  return PayoffEvaluator(std::make_shared<const Impl>(
      Impl{PayoffKind::kCoBuchi, "cobuchi", {0.0, 1.0}, true, 1,
           CoBuchiParams{std::move(targets)}}));
}

PayoffEvaluator PayoffEvaluator::Parity(std::map<ActionPair, int> priorities,
                                        int default_priority) {
  return PayoffEvaluator(std::make_shared<const Impl>(
      Impl{PayoffKind::kParity, "parity", {0.0, 1.0}, true, 1,
           ParityParams{std::move(priorities), default_priority}}));
}

PayoffEvaluator PayoffEvaluator::Example1(int ell_i, int ell_j) {
  return PayoffEvaluator(std::make_shared<const Impl>(
      Impl{PayoffKind::kExample1, "example1", {-2.0, 2.0}, true, 2,
           ExampleParams{ell_i, ell_j, 0.0}}));
}

PayoffEvaluator PayoffEvaluator::Example2(int ell_i, int ell_j,
                                          double threshold) {
  return PayoffEvaluator(std::make_shared<const Impl>(
      Impl{PayoffKind::kExample2, "example2", {-2.0, 2.0}, true, 2,
           ExampleParams{ell_i, ell_j, threshold}}));
}

PayoffEvaluator PayoffEvaluator::Custom(std::string name, PayoffBounds bounds,
                                        LassoRule lasso_rule,
                                        TruncatedRule truncated_rule,
                                        bool shift_invariant) {
  return PayoffEvaluator(std::make_shared<const Impl>(
      Impl{PayoffKind::kCustom, std::move(name), bounds, shift_invariant, 1,
           CustomParams{std::move(lasso_rule), std::move(truncated_rule)}}));
}

PayoffKind PayoffEvaluator::kind() const { return impl_->kind; }
const std::string& PayoffEvaluator::name() const { return impl_->name; }
PayoffBounds PayoffEvaluator::bounds() const { return impl_->bounds; }
bool PayoffEvaluator::shift_invariant() const {
  return impl_->shift_invariant;
}
std::size_t PayoffEvaluator::shift_stride() const {
  return impl_->shift_stride;
}

bool PayoffEvaluator::lasso_evaluable() const {
  if (impl_->kind != PayoffKind::kCustom) return true;
  return static_cast<bool>(std::get<CustomParams>(impl_->params).lasso);
}

double PayoffEvaluator::EvalLasso(int state, const LassoPlay& play) const {
  if (impl_->kind == PayoffKind::kCustom) {
    const auto& rule = std::get<CustomParams>(impl_->params).lasso;
    if (!rule) {
      throw Error(ErrorCode::kNotLassoEvaluable,
                  "payoff '" + impl_->name + "' is not lasso-evaluable");
    }
    return rule(state, play);
  }
  return EvalRepeatingWindow(impl_->params, impl_->kind, state,
                             play.cycle().pairs());
}

double PayoffEvaluator::EvalTruncated(int state,
                                      const PublicHistory& history) const {
  if (history.empty()) {
    throw Error(ErrorCode::kValidation,
                "truncated evaluation needs a nonempty history");
  }
  if (impl_->kind == PayoffKind::kCustom) {
    const auto& rule = std::get<CustomParams>(impl_->params).truncated;
    if (!rule) {
      throw Error(ErrorCode::kNotLassoEvaluable,
                  "payoff '" + impl_->name + "' has no truncated rule");
    }
    return rule(state, history);
  }
  auto pairs = history.pairs();
  if (impl_->kind == PayoffKind::kLimsupAverage) {
    return EvalRepeatingWindow(impl_->params, impl_->kind, state, pairs);
  }
  return EvalRepeatingWindow(impl_->params, impl_->kind, state,
                             pairs.subspan(pairs.size() / 2));
}

double EvalLasso(const PayoffEvaluator& f, int state, const LassoPlay& play) {
  return f.EvalLasso(state, play);
}

double EvalTruncated(const PayoffEvaluator& f, int state,
                     const PublicHistory& history) {
  return f.EvalTruncated(state, history);
}

namespace {

template <typename MakePrefix>
TailReport RunPrefixCheck(const PayoffEvaluator& f,
                          const std::vector<TailSample>& samples,
                          int perturbations, MakePrefix make_prefix) {
  TailReport report;
  for (const auto& sample : samples) {
    const double original = f.EvalLasso(sample.state, sample.play);
    ++report.evaluations;
    for (int n = 0; n < perturbations; ++n) {
      LassoPlay perturbed(make_prefix(sample.play), sample.play.cycle());
      const double value = f.EvalLasso(sample.state, perturbed);
      ++report.evaluations;
      if (value != original) {
        report.violations.push_back(
            {sample.state, sample.play, perturbed, original, value});
      }
    }
  }
  return report;
}

}  // namespace

TailReport CheckTailMeasurable(const PayoffEvaluator& f, const GameSpec& spec,
                               const std::vector<TailSample>& samples,
                               int perturbations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return RunPrefixCheck(f, samples, perturbations, [&](const LassoPlay& play) {
    PublicHistory prefix;
    for (std::size_t t = 0; t < play.prefix().size(); ++t) {
      prefix.push_back(RandomPair(spec, t, rng));
    }
    return prefix;
  });
}

TailReport CheckShiftInvariant(const PayoffEvaluator& f, const GameSpec& spec,
                               const std::vector<TailSample>& samples,
                               int perturbations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t stride = std::max(f.shift_stride(), spec.period());
  return RunPrefixCheck(f, samples, perturbations, [&](const LassoPlay& play) {
    // Keep the parity of the cycle's starting stage.
    const std::size_t base = play.prefix().size() % stride;
    const std::size_t extra =
        std::uniform_int_distribution<std::size_t>(0, 8)(rng) * stride;
    PublicHistory prefix;
    for (std::size_t t = 0; t < base + extra; ++t) {
      prefix.push_back(RandomPair(spec, t, rng));
    }
    return prefix;
  });
}

}  // namespace tailcav
