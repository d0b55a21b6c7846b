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

#include "tailcav/belief_engine.hpp"

#include <algorithm>
#include <cmath>

namespace tailcav {

StateMask FullMask(Eigen::Index num_states) {
  return StateMask(static_cast<std::size_t>(num_states), true);
}

PosteriorState::PosteriorState(const InformedStrategy& sigma,
                               const Belief& prior)
    : belief_(prior), scratch_(prior.size()) {
  agents_.resize(static_cast<std::size_t>(prior.size()));
  for (Eigen::Index k = 0; k < prior.size(); ++k) {
    if (prior[k] > 0.0) agents_[k] = sigma.Start(static_cast<int>(k));
  }
}

PosteriorState::PosteriorState(std::vector<std::unique_ptr<Agent>> agents,
                               const Belief& belief, std::size_t stage)
    : agents_(std::move(agents)),
      belief_(belief),
      stage_(stage),
      scratch_(belief.size()) {}

const Distribution& PosteriorState::StateBehavior(int k) {
  return agents_.at(k)->Next();
}

void PosteriorState::Observe(const ActionPair& pair) {
  if (pair.i != kDummy) {
    // Skip the update when every state with mass mixes identically: the
    // posterior is then unchanged exactly, not just up to rounding.
    bool identical = true;
    const Distribution* reference = nullptr;
    for (std::size_t k = 0; k < agents_.size(); ++k) {
      if (belief_[k] <= 0.0) {
        scratch_[k] = 0.0;
        continue;
      }
      const Distribution& dist = agents_[k]->Next();
      if (pair.i < 0 || pair.i >= dist.size()) {
        throw Error(ErrorCode::kValidation, "action of Player I out of range");
      }
      scratch_[k] = belief_[k] * dist[pair.i];
      if (reference == nullptr) {
        reference = &dist;
      } else if (identical && dist != *reference) {
        identical = false;
      }
    }
    if (!(scratch_.sum() > 0.0)) {
      throw Error(ErrorCode::kNullHistory,
                  "posterior undefined on null history");
    }
    // A shared zero-probability action still makes identical rows null.
    if (!identical) belief_ = Belief::Normalized(scratch_);
  }
  for (auto& agent : agents_) {
    if (agent) agent->Observe(pair);
  }
  ++stage_;
}

std::optional<MemoryKey> PosteriorState::Memory() const {
  MemoryKey key;
  AppendKey(key, belief_.weights());
  for (const auto& agent : agents_) {
    if (!agent) {
      key.push_back(0);
      continue;
    }
    auto sub = agent->Memory();
    if (!sub) return std::nullopt;
    AppendKey(key, *sub);
  }
  return key;
}

std::vector<std::unique_ptr<Agent>> PosteriorState::ReleaseAgents() {
  return std::move(agents_);
}

Belief Posterior(const Belief& p, const InformedStrategy& sigma,
                 const PublicHistory& h) {
  PosteriorState state(sigma, p);
  for (const auto& pair : h) state.Observe(pair);
  return state.belief();
}

std::vector<int> SupportAbove(const Belief& p, double delta,
                              const StateMask& active) {
  const auto num_active = std::count(active.begin(), active.end(), true);
  const double threshold = delta / static_cast<double>(num_active);
  std::vector<int> support;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (active[k] && p[k] > threshold) support.push_back(static_cast<int>(k));
  }
  return support;
}

std::vector<int> SupportAbove(const Belief& p, double delta) {
  return SupportAbove(p, delta, FullMask(p.size()));
}

Belief RenormalizeXi(const Belief& p, double delta, const StateMask& active) {
  const auto support = SupportAbove(p, delta, active);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p.size());
  for (int k : support) w[k] = p[k];
  // Nothing dropped: keep p bit for bit.
  if (w == p.weights()) return p;
  return Belief::Normalized(w);
}

Belief RenormalizeXi(const Belief& p, double delta) {
  return RenormalizeXi(p, delta, FullMask(p.size()));
}

bool IsBoundary(const Belief& p, double delta, const StateMask& active) {
  const auto num_active = std::count(active.begin(), active.end(), true);
  return static_cast<std::ptrdiff_t>(SupportAbove(p, delta, active).size()) <
         num_active;
}

bool IsBoundary(const Belief& p, double delta) {
  return IsBoundary(p, delta, FullMask(p.size()));
}

const char* ToString(BlockEvent event) {
  switch (event) {
    case BlockEvent::kContinue:
      return "continue";
    case BlockEvent::kNewBlock:
      return "new_block";
    case BlockEvent::kTheta:
      return "theta";
  }
  return "unknown";
}

BlockTracker::BlockTracker(double epsilon, double delta, const Belief& start,
                           std::size_t start_stage, StateMask active)
    : epsilon_(epsilon),
      delta_(delta),
      block_start_belief_(start),
      block_start_stage_(start_stage),
      active_(active.empty() ? FullMask(start.size()) : std::move(active)) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::kValidation, "epsilon must lie in (0, 1)");
  }
  if (!(delta > 0.0 && delta < epsilon * epsilon)) {
    throw Error(ErrorCode::kValidation, "delta must lie in (0, epsilon^2)");
  }
}

BlockEvent BlockTracker::Step(const Belief& belief, std::size_t stage) {
  if (IsBoundary(belief, delta_, active_)) {
    theta_reached_ = true;
    return BlockEvent::kTheta;
  }
  if (belief.L1Distance(block_start_belief_) >= delta_ * epsilon_) {
    ++block_index_;
    block_start_belief_ = belief;
    block_start_stage_ = stage;
    return BlockEvent::kNewBlock;
  }
  return BlockEvent::kContinue;
}

double SelectDelta(double epsilon, int num_states, double payoff_range) {
  double delta = epsilon * epsilon / 2.0;
  if (payoff_range > 0.0) {
    delta = std::min(delta, epsilon / (num_states * payoff_range));
  }
  return delta;
}

double MartingaleResidual(const GameSpec& spec, const Belief& p,
                          const InformedStrategy& sigma,
                          const PublicHistory& h) {
  const Mover mover = spec.MoverAt(h.size());
  if (mover == Mover::kPlayerII) return 0.0;
  const Belief current = Posterior(p, sigma, h);
  const int j0 = mover == Mover::kBoth ? 0 : kDummy;

  Eigen::VectorXd marginal = Eigen::VectorXd::Zero(spec.num_actions_i());
  for (int k = 0; k < spec.num_states(); ++k) {
    if (current[k] > 0.0) marginal += current[k] * Behavior(sigma, k, h);
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(current.size());
  for (int i = 0; i < spec.num_actions_i(); ++i) {
    if (marginal[i] <= 0.0) continue;
    PublicHistory extended = h;
    extended.push_back({i, j0});
    mean += marginal[i] * Posterior(p, sigma, extended).weights();
  }
  return (mean - current.weights()).lpNorm<1>();
}

int BlockTrace::NewBlockCount() const {
  return static_cast<int>(std::count_if(
      events.begin(), events.end(),
      [](const TraceRow& r) { return r.event == BlockEvent::kNewBlock; }));
}

std::optional<std::size_t> BlockTrace::ThetaStage() const {
  for (const auto& r : events) {
    if (r.event == BlockEvent::kTheta) return r.stage;
  }
  return std::nullopt;
}

}  // namespace tailcav
