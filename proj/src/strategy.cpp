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

#include "tailcav/strategy.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace tailcav {
namespace {

std::string FormatDistribution(const Distribution& d) {
  std::ostringstream out;
  out << "(";
  for (Eigen::Index a = 0; a < d.size(); ++a) out << (a ? "," : "") << d[a];
  out << ")";
  return out.str();
}

class StationaryAgent final : public Agent {
 public:
  explicit StationaryAgent(const Distribution& dist) : dist_(dist) {}
  const Distribution& Next() override { return dist_; }
  void Observe(const ActionPair&) override {}
  std::optional<MemoryKey> Memory() const override { return MemoryKey{}; }

 private:
  const Distribution& dist_;
};

class StationaryInformed final : public InformedStrategy {
 public:
  explicit StationaryInformed(std::vector<Distribution> per_state)
      : per_state_(std::move(per_state)) {
    for (const auto& d : per_state_) RequireDistribution(d, "stationary");
  }
  std::unique_ptr<Agent> Start(int state) const override {
    return std::make_unique<StationaryAgent>(
        per_state_.size() == 1 ? per_state_[0] : per_state_.at(state));
  }
  std::string Describe() const override {
    std::string s = "stationary[";
    for (std::size_t k = 0; k < per_state_.size(); ++k) {
      s += (k ? " " : "") + FormatDistribution(per_state_[k]);
    }
    return s + "]";
  }

 private:
  std::vector<Distribution> per_state_;
};

class StationaryUninformed final : public UninformedStrategy {
 public:
  explicit StationaryUninformed(Distribution dist) : dist_(std::move(dist)) {
    RequireDistribution(dist_, "stationary");
  }
  std::unique_ptr<Agent> Start() const override {
    return std::make_unique<StationaryAgent>(dist_);
  }
  std::string Describe() const override {
    return "stationary" + FormatDistribution(dist_);
  }

 private:
  Distribution dist_;
};

class MachineAgent final : public Agent {
 public:
  explicit MachineAgent(const MachineTable& table)
      : table_(table), memory_(table.initial()) {}
  const Distribution& Next() override { return table_.Output(memory_); }
  void Observe(const ActionPair& pair) override {
    memory_ = table_.Step(memory_, pair);
  }
  std::optional<MemoryKey> Memory() const override {
    return MemoryKey{static_cast<std::uint64_t>(memory_)};
  }

 private:
  const MachineTable& table_;
  int memory_;
};

class MachineUninformed final : public UninformedStrategy {
 public:
  MachineUninformed(MachineTable table, std::string name)
      : table_(std::move(table)), name_(std::move(name)) {}
  std::unique_ptr<Agent> Start() const override {
    return std::make_unique<MachineAgent>(table_);
  }
  std::string Describe() const override { return name_; }

 private:
  MachineTable table_;
  std::string name_;
};

class MachineInformed final : public InformedStrategy {
 public:
  MachineInformed(std::vector<MachineTable> per_state, std::string name)
      : per_state_(std::move(per_state)), name_(std::move(name)) {}
  std::unique_ptr<Agent> Start(int state) const override {
    return std::make_unique<MachineAgent>(
        per_state_.size() == 1 ? per_state_[0] : per_state_.at(state));
  }
  std::string Describe() const override { return name_; }

 private:
  std::vector<MachineTable> per_state_;
  std::string name_;
};

}  // namespace

Distribution Behavior(const InformedStrategy& sigma, int state,
                      const PublicHistory& h) {
  auto agent = sigma.Start(state);
  for (const auto& pair : h) agent->Observe(pair);
  return agent->Next();
}

Distribution Behavior(const UninformedStrategy& tau, const PublicHistory& h) {
  auto agent = tau.Start();
  for (const auto& pair : h) agent->Observe(pair);
  return agent->Next();
}

Distribution PureAction(int num_actions, int action) {
  Distribution d = Distribution::Zero(num_actions);
  d[action] = 1.0;
  return d;
}

bool IsPure(const Distribution& dist) {
  for (Eigen::Index a = 0; a < dist.size(); ++a) {
    if (dist[a] == 1.0) return true;
  }
  return false;
}

void RequireDistribution(const Distribution& dist, const std::string& what) {
  bool ok = dist.size() > 0 && dist.allFinite() && (dist.array() >= 0.0).all();
  ok = ok && std::abs(dist.sum() - 1.0) <= kProbabilityTolerance;
  if (!ok) {
    throw Error(ErrorCode::kValidation,
                what + ": invalid mixed action " + FormatDistribution(dist));
  }
}

InformedPtr StationaryPerState(std::vector<Distribution> per_state) {
  return std::make_shared<StationaryInformed>(std::move(per_state));
}

InformedPtr StationaryNonRevealing(Distribution dist) {
  return std::make_shared<StationaryInformed>(
      std::vector<Distribution>{std::move(dist)});
}

UninformedPtr Stationary(Distribution dist) {
  return std::make_shared<StationaryUninformed>(std::move(dist));
}

MachineTable::MachineTable(int num_memory, int num_actions_i,
                           int num_actions_j,
                           const Distribution& initial_output)
    : num_actions_i_(num_actions_i),
      num_actions_j_(num_actions_j),
      outputs_(num_memory, initial_output),
      next_(num_memory) {
  if (num_memory < 1) {
    throw Error(ErrorCode::kValidation, "machine needs a memory state");
  }
  for (int m = 0; m < num_memory; ++m) {
    next_[m].assign((num_actions_i + 1) * (num_actions_j + 1), m);
  }
}

void MachineTable::SetOutput(int memory, Distribution dist) {
  RequireDistribution(dist, "machine output");
  outputs_.at(memory) = std::move(dist);
}

void MachineTable::SetTransition(int memory, int i, int j, int to) {
  if (to < 0 || to >= num_memory()) {
    throw Error(ErrorCode::kValidation, "machine transition out of range");
  }
  for (int a = kDummy; a < num_actions_i_; ++a) {
    if (i != kAny && i != a) continue;
    for (int b = kDummy; b < num_actions_j_; ++b) {
      if (j != kAny && j != b) continue;
      next_.at(memory)[PairIndex({a, b})] = to;
    }
  }
}

void MachineTable::SetInitial(int memory) {
  if (memory < 0 || memory >= num_memory()) {
    throw Error(ErrorCode::kValidation, "machine initial state out of range");
  }
  initial_ = memory;
}

int MachineTable::Step(int memory, const ActionPair& pair) const {
  return next_[memory][PairIndex(pair)];
}

UninformedPtr Machine(MachineTable table, std::string name) {
  return std::make_shared<MachineUninformed>(std::move(table), std::move(name));
}

InformedPtr Machine(std::vector<MachineTable> per_state, std::string name) {
  return std::make_shared<MachineInformed>(std::move(per_state),
                                           std::move(name));
}

MachineTable RandomMachineII(int num_memory, int num_actions_i,
                             int num_actions_j, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_int_distribution<int> target(0, num_memory - 1);
  MachineTable table(num_memory, num_actions_i, num_actions_j,
                     PureAction(num_actions_j, 0));
  for (int m = 0; m < num_memory; ++m) {
    Distribution out = Distribution::Zero(num_actions_j);
    switch (kind(rng)) {
      case 0:
        out[0] = 1.0;
        break;
      case 1:
        out[num_actions_j - 1] = 1.0;
        break;
      default: {
        const double p = unit(rng);
        out[0] = p;
        out[num_actions_j - 1] += 1.0 - p;
      }
    }
    table.SetOutput(m, out);
    for (int j = 0; j < num_actions_j; ++j) {
      table.SetTransition(m, MachineTable::kAny, j, target(rng));
    }
  }
  return table;
}

}  // namespace tailcav
