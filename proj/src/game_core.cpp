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

#include "tailcav/game_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tailcav {
namespace {

std::string CheckProbabilityVector(const Eigen::VectorXd& w) {
  if (w.size() == 0) return "empty probability vector";
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (!std::isfinite(w[k])) return "non-finite probability";
    if (w[k] < 0.0) {
      std::ostringstream out;
      out << "negative probability " << w[k] << " at index " << k;
      return out.str();
    }
  }
  const double sum = w.sum();
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    std::ostringstream out;
    out << "sums to " << sum;
    return out.str();
  }
  return {};
}

int Lookup(const std::vector<std::string>& names, std::string_view name,
           const char* what) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw Error(ErrorCode::kValidation,
                std::string("unknown ") + what + " '" + std::string(name) + "'");
  }
  return static_cast<int>(it - names.begin());
}

}  // namespace

Belief::Belief(Eigen::VectorXd weights) : weights_(std::move(weights)) {
  if (auto problem = CheckProbabilityVector(weights_); !problem.empty()) {
    throw Error(ErrorCode::kValidation, "invalid belief: " + problem);
  }
}

Belief::Belief(std::initializer_list<double> weights)
    : Belief(Eigen::Map<const Eigen::VectorXd>(
          weights.begin(), static_cast<Eigen::Index>(weights.size()))) {}

Belief Belief::Normalized(const Eigen::VectorXd& weights) {
  const double sum = weights.sum();
  if (!(sum > 0.0)) {
    throw Error(ErrorCode::kNullHistory,
                "posterior undefined on null history");
  }
  Eigen::VectorXd w = weights / sum;
  // Absorb drift so the result passes the simplex check.
  w /= w.sum();
  return Belief(std::move(w));
}

Belief Belief::Vertex(Eigen::Index num_states, Eigen::Index k) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(num_states);
  w[k] = 1.0;
  return Belief(std::move(w));
}

Belief Belief::Uniform(Eigen::Index num_states) {
  return Normalized(Eigen::VectorXd::Ones(num_states));
}

Belief Belief::TwoState(double p) {
  Eigen::VectorXd w(2);
  w << p, 1.0 - p;
  return Belief(std::move(w));
}

double Belief::L1Distance(const Belief& other) const {
  return (weights_ - other.weights_).lpNorm<1>();
}

PublicHistory PublicHistory::Prefix(std::size_t n) const {
  n = std::min(n, pairs_.size());
  return PublicHistory(std::vector<ActionPair>(pairs_.begin(),
                                               pairs_.begin() + n));
}

PublicHistory PublicHistory::Slice(std::size_t from, std::size_t to) const {
  to = std::min(to, pairs_.size());
  from = std::min(from, to);
  return PublicHistory(
      std::vector<ActionPair>(pairs_.begin() + from, pairs_.begin() + to));
}

PublicHistory Concat(const PublicHistory& h, const PublicHistory& h2) {
  std::vector<ActionPair> pairs;
  pairs.reserve(h.size() + h2.size());
  pairs.insert(pairs.end(), h.begin(), h.end());
  pairs.insert(pairs.end(), h2.begin(), h2.end());
  return PublicHistory(std::move(pairs));
}

LassoPlay::LassoPlay(PublicHistory prefix, PublicHistory cycle)
    : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
  if (cycle_.empty()) {
    throw Error(ErrorCode::kValidation, "lasso cycle must be nonempty");
  }
}

const ActionPair& LassoPlay::At(std::size_t t) const {
  if (t < prefix_.size()) return prefix_[t];
  return cycle_[(t - prefix_.size()) % cycle_.size()];
}

PublicHistory Unroll(const LassoPlay& lasso, std::size_t t) {
  std::vector<ActionPair> pairs;
  pairs.reserve(t);
  for (std::size_t s = 0; s < t; ++s) pairs.push_back(lasso.At(s));
  return PublicHistory(std::move(pairs));
}

int GameSpec::StateIndex(std::string_view name) const {
  return Lookup(states, name, "state");
}
int GameSpec::ActionI(std::string_view name) const {
  return Lookup(actions_i, name, "action of Player I");
}
int GameSpec::ActionJ(std::string_view name) const {
  return Lookup(actions_j, name, "action of Player II");
}

ValidationReport ValidateSpec(const GameSpec& spec) {
  ValidationReport report;
  if (spec.states.empty()) report.errors.push_back("empty state set");
  if (spec.actions_i.empty()) {
    report.errors.push_back("empty action set for Player I");
  }
  if (spec.actions_j.empty()) {
    report.errors.push_back("empty action set for Player II");
  }
  if (spec.prior.size() != static_cast<Eigen::Index>(spec.states.size())) {
    std::ostringstream out;
    out << "prior has " << spec.prior.size() << " entries for "
        << spec.states.size() << " states";
    report.errors.push_back(out.str());
  } else if (auto problem = CheckProbabilityVector(spec.prior);
             !problem.empty()) {
    report.errors.push_back("prior " + problem);
  }
  return report;
}

void RequireValid(const GameSpec& spec) {
  const auto report = ValidateSpec(spec);
  if (report.ok()) return;
  std::string message = "invalid game spec:";
  for (const auto& e : report.errors) message += " " + e + ";";
  throw Error(ErrorCode::kValidation, message);
}

ValidationReport ValidateHistory(const GameSpec& spec, const PublicHistory& h,
                                 std::size_t first_stage) {
  ValidationReport report;
  for (std::size_t s = 0; s < h.size(); ++s) {
    const std::size_t stage = first_stage + s;
    const auto [i, j] = h[s];
    const Mover mover = spec.MoverAt(stage);
    const bool i_moves = mover != Mover::kPlayerII;
    const bool j_moves = mover != Mover::kPlayerI;
    std::ostringstream out;
    if (i_moves && (i < 0 || i >= spec.num_actions_i())) {
      out << "stage " << stage << ": action of Player I out of range";
    } else if (!i_moves && i != kDummy) {
      out << "stage " << stage << ": Player I must play the dummy action";
    } else if (j_moves && (j < 0 || j >= spec.num_actions_j())) {
      out << "stage " << stage << ": action of Player II out of range";
    } else if (!j_moves && j != kDummy) {
      out << "stage " << stage << ": Player II must play the dummy action";
    }
    if (!out.str().empty()) report.errors.push_back(out.str());
  }
  return report;
}

GameSpec Example1Spec(double p_k1) {
  GameSpec spec;
  spec.states = {"k1", "k2"};
  spec.actions_i = {"l", "r"};
  spec.actions_j = {"l", "r"};
  spec.prior = Belief::TwoState(p_k1).weights();
  spec.timing = Timing::kAlternating;
  return spec;
}

}  // namespace tailcav
