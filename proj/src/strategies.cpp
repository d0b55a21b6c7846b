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

#include "tailcav/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tailcav/playout.hpp"
#include "tailcav/seeding.hpp"

namespace tailcav {
namespace {

// Clamps LP round-off so the result passes RequireDistribution.
Distribution CleanDistribution(const Eigen::VectorXd& x) {
  Distribution d = x.cwiseMax(0.0);
  d /= d.sum();
  for (Eigen::Index a = 0; a < d.size(); ++a) {
    if (d[a] < 1e-15) d[a] = 0.0;
  }
  return d / d.sum();
}

// ---------------------------------------------------------------------------
// Oracles.

class AverageNrOracle final : public NrOracle {
 public:
  explicit AverageNrOracle(std::vector<Eigen::MatrixXd> stage)
      : stage_(std::move(stage)) {}

  double Value(const Belief& p) const override {
    return NrValueAverage(p, stage_);
  }
  UninformedPtr Respond(const Belief& p, const PublicHistory&) const override {
    return Stationary(CleanDistribution(Solve(p).col));
  }
  InformedPtr Guarantee(const Belief& p) const override {
    return StationaryNonRevealing(CleanDistribution(Solve(p).row));
  }
  std::string name() const override { return "average"; }

 private:
  MatrixGameSolution<double> Solve(const Belief& p) const {
    return MatrixValue<double>(AverageMatrix(p, stage_));
  }
  std::vector<Eigen::MatrixXd> stage_;
};

class Example1NrOracle final : public NrOracle {
 public:
  explicit Example1NrOracle(const GameSpec& spec)
      : ell_i_(spec.ActionI("l")),
        r_i_(spec.ActionI("r")),
        always_l_(Stationary(PureAction(spec.num_actions_j(), spec.ActionJ("l")))),
        always_r_(Stationary(PureAction(spec.num_actions_j(), spec.ActionJ("r")))),
        i_always_l_(StationaryNonRevealing(PureAction(spec.num_actions_i(), ell_i_))),
        i_always_r_(StationaryNonRevealing(PureAction(spec.num_actions_i(), r_i_))) {
    if (spec.num_states() != 2) {
      throw Error(ErrorCode::kUnsupportedOracle,
                  "example oracle needs exactly two states");
    }
  }

  double Value(const Belief& p) const override { return UExample1(p[0]); }
  UninformedPtr Respond(const Belief& p, const PublicHistory&) const override {
    return p[0] < 2.0 / 3.0 ? always_r_ : always_l_;
  }
  InformedPtr Guarantee(const Belief& p) const override {
    return p[0] <= 1.0 / 3.0 ? i_always_l_ : i_always_r_;
  }
  std::vector<double> Breakpoints() const override {
    return Example1Breakpoints();
  }
  std::string name() const override { return "example1"; }

 private:
  int ell_i_;
  int r_i_;
  UninformedPtr always_l_;
  UninformedPtr always_r_;
  InformedPtr i_always_l_;
  InformedPtr i_always_r_;
};

// ---------------------------------------------------------------------------
// Splitting.

class SplittingAgent final : public Agent {
 public:
  SplittingAgent(const SplitPlan& plan, const std::vector<double>& cond,
                 int num_actions_i, int length, int state)
      : plan_(plan),
        cond_(cond),
        num_actions_i_(num_actions_i),
        length_(length),
        state_(state),
        dist_(Distribution::Zero(num_actions_i)) {
    if (length_ == 0) Reveal(0);
  }

  const Distribution& Next() override {
    if (continuation_) return continuation_->Next();
    // P(next digit = a | k, digits so far), from P(s | k).
    const int m = static_cast<int>(plan_.weights.size());
    dist_.setZero();
    const int remaining = length_ - static_cast<int>(digits_.size());
    int block = 1;
    for (int d = 1; d < remaining; ++d) block *= num_actions_i_;
    for (int s = 0; s < m; ++s) {
      if (s / (block * num_actions_i_) != prefix_code_) continue;
      dist_[(s / block) % num_actions_i_] += cond_[s];
    }
    const double total = dist_.sum();
    if (total > 0.0) {
      dist_ /= total;
    } else {
      dist_.setZero();
      dist_[0] = 1.0;
    }
    return dist_;
  }

  void Observe(const ActionPair& pair) override {
    if (continuation_) {
      continuation_->Observe(pair);
      return;
    }
    if (pair.i == kDummy) return;
    digits_.push_back(pair.i);
    prefix_code_ = prefix_code_ * num_actions_i_ + pair.i;
    if (static_cast<int>(digits_.size()) == length_) Reveal(prefix_code_);
  }

  std::optional<MemoryKey> Memory() const override {
    MemoryKey key;
    if (!continuation_) {
      key.push_back(0);
      key.insert(key.end(), digits_.begin(), digits_.end());
      return key;
    }
    auto sub = continuation_->Memory();
    if (!sub) return std::nullopt;
    key.push_back(1);
    key.push_back(static_cast<std::uint64_t>(signal_));
    AppendKey(key, *sub);
    return key;
  }

 private:
  void Reveal(int code) {
    const int m = static_cast<int>(plan_.weights.size());
    signal_ = std::min(code, m - 1);
    continuation_ = plan_.continuations[signal_]->Start(state_);
  }

  const SplitPlan& plan_;
  const std::vector<double>& cond_;  // P(s | state_)
  int num_actions_i_;
  int length_;
  int state_;
  std::vector<std::uint64_t> digits_;
  int prefix_code_ = 0;
  int signal_ = -1;
  Distribution dist_;
  std::unique_ptr<Agent> continuation_;
};

class SplittingStrategy final : public InformedStrategy {
 public:
  SplittingStrategy(const GameSpec& spec, SplitPlan plan)
      : plan_(std::move(plan)), num_actions_i_(spec.num_actions_i()) {
    const int m = static_cast<int>(plan_.weights.size());
    length_ = SignalLength(m, num_actions_i_);
    cond_.assign(plan_.prior.size(), std::vector<double>(m, 0.0));
    for (Eigen::Index k = 0; k < plan_.prior.size(); ++k) {
      if (plan_.prior[k] <= 0.0) continue;
      for (int s = 0; s < m; ++s) {
        cond_[k][s] = plan_.weights[s] * plan_.posteriors[s][k] / plan_.prior[k];
      }
    }
  }

  std::unique_ptr<Agent> Start(int state) const override {
    return std::make_unique<SplittingAgent>(plan_, cond_[state],
                                            num_actions_i_, length_, state);
  }

  std::string Describe() const override {
    std::ostringstream out;
    out << "splitting[";
    for (std::size_t s = 0; s < plan_.weights.size(); ++s) {
      out << (s ? " " : "") << plan_.weights[s] << "@(";
      for (Eigen::Index k = 0; k < plan_.posteriors[s].size(); ++k) {
        out << (k ? "," : "") << plan_.posteriors[s][k];
      }
      out << ")";
    }
    out << "]";
    return out.str();
  }

 private:
  SplitPlan plan_;
  int num_actions_i_;
  int length_ = 0;
  std::vector<std::vector<double>> cond_;
};

// ---------------------------------------------------------------------------
// Block response.

struct BlockResponseConfig {
  GameSpec spec;
  InformedPtr sigma;
  Belief prior;
  NrOraclePtr oracle;
  double epsilon;
  double delta;
  int depth;
  bool record_beliefs;
};

class BlockResponseAgent final : public Agent {
 public:
  explicit BlockResponseAgent(const BlockResponseConfig& config)
      : config_(config),
        posterior_(*config.sigma, config.prior),
        tracker_(config.epsilon, config.delta, config.prior, 0),
        active_(FullMask(config.prior.size())),
        depth_(config.depth) {
    if (config_.record_beliefs) Record(BlockEvent::kContinue);
    if (IsBoundary(posterior_.belief(), config_.delta, active_)) {
      Record(BlockEvent::kTheta);
      Restrict();
    }
    Query();
  }

  const Distribution& Next() override { return sub_->Next(); }

  void Observe(const ActionPair& pair) override {
    history_.push_back(pair);
    sub_->Observe(pair);
    if (trace_.frozen) return;
    const Belief before = posterior_.belief();
    try {
      posterior_.Observe(pair);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNullHistory) throw;
      trace_.frozen = true;
      return;
    }
    BlockEvent event = BlockEvent::kContinue;
    // A spent depth budget leaves the tracker at the boundary for good.
    if (!(posterior_.belief() == before) && !tracker_.theta_reached()) {
      event = tracker_.Step(posterior_.belief(), posterior_.stage());
    }
    if (config_.record_beliefs) Record(event);
    switch (event) {
      case BlockEvent::kContinue:
        break;
      case BlockEvent::kNewBlock:
        if (!config_.record_beliefs) Record(event);
        Query();
        break;
      case BlockEvent::kTheta:
        if (!config_.record_beliefs) Record(event);
        Restrict();
        Query();
        break;
    }
  }

  std::optional<MemoryKey> Memory() const override {
    MemoryKey key;
    key.push_back(trace_.frozen ? 1 : 0);
    key.push_back(static_cast<std::uint64_t>(level_));
    for (bool a : active_) key.push_back(a ? 1 : 0);
    if (!trace_.frozen) {
      AppendKey(key, tracker_.block_start_belief().weights());
      auto post = posterior_.Memory();
      if (!post) return std::nullopt;
      AppendKey(key, *post);
    }
    auto sub = sub_->Memory();
    if (!sub) return std::nullopt;
    AppendKey(key, *sub);
    return key;
  }

  const BlockTrace* Trace() const override { return &trace_; }

 private:
  void Record(BlockEvent event) {
    TraceRow row{posterior_.stage(), posterior_.belief().weights(),
                 tracker_.block_index(), event, level_};
    if (config_.record_beliefs) trace_.rows.push_back(row);
    if (event != BlockEvent::kContinue) trace_.events.push_back(std::move(row));
  }

  // Drops states outside K_delta until the belief is interior to the
  // restricted simplex or the depth budget runs out.
  void Restrict() {
    while (depth_ > 0 &&
           IsBoundary(posterior_.belief(), config_.delta, active_)) {
      const Belief xi = RenormalizeXi(posterior_.belief(), config_.delta, active_);
      StateMask next(active_.size(), false);
      for (int k : SupportAbove(posterior_.belief(), config_.delta, active_)) {
        next[k] = true;
      }
      active_ = std::move(next);
      const std::size_t stage = posterior_.stage();
      posterior_ = PosteriorState(posterior_.ReleaseAgents(), xi, stage);
      tracker_ = BlockTracker(config_.epsilon, config_.delta, xi, stage, active_);
      ++level_;
      --depth_;
    }
  }

  void Query() {
    const Belief& at = posterior_.belief();
    trace_.oracle_queries.emplace_back(
        at.weights(),
        static_cast<int>(std::count(active_.begin(), active_.end(), true)));
    // The agent may refer into its strategy, so keep that alive too.
    sub_strategy_ = config_.oracle->Respond(at, history_);
    sub_ = sub_strategy_->Start();
  }

  const BlockResponseConfig& config_;
  PosteriorState posterior_;
  BlockTracker tracker_;
  StateMask active_;
  int depth_;
  int level_ = 0;
  PublicHistory history_;
  UninformedPtr sub_strategy_;
  std::unique_ptr<Agent> sub_;
  BlockTrace trace_;
};

class BlockResponseStrategy final : public UninformedStrategy {
 public:
  explicit BlockResponseStrategy(BlockResponseConfig config)
      : config_(std::move(config)) {}
  std::unique_ptr<Agent> Start() const override {
    return std::make_unique<BlockResponseAgent>(config_);
  }
  std::string Describe() const override {
    std::ostringstream out;
    out << "block_response[eps=" << config_.epsilon
        << " delta=" << config_.delta << " oracle=" << config_.oracle->name()
        << " vs " << config_.sigma->Describe() << "]";
    return out.str();
  }

 private:
  BlockResponseConfig config_;
};

// ---------------------------------------------------------------------------
// Example exploit.

struct ExploitConfig {
  GameSpec spec;
  PayoffEvaluator payoff;
  UninformedPtr tau;
  ExploitOptions options;
  int ell_i;
  int r_i;
};

class ExploitAgent final : public Agent {
 public:
  ExploitAgent(const ExploitConfig& config, int state)
      : config_(config),
        play_r_(PureAction(config.spec.num_actions_i(), config.r_i)),
        play_l_(PureAction(config.spec.num_actions_i(), config.ell_i)),
        informed_state_(state) {
    if (informed_state_ == 0) {
      decided_ = true;
      keep_r_ = true;
    } else if (config_.options.decision_stage == 0) {
      Decide();
    }
  }

  const Distribution& Next() override {
    if (!decided_ || keep_r_) return play_r_;
    return play_l_;
  }

  void Observe(const ActionPair& pair) override {
    if (decided_) return;
    history_.push_back(pair);
    if (history_.size() >= config_.options.decision_stage) Decide();
  }

  std::optional<MemoryKey> Memory() const override {
    if (!decided_) return std::nullopt;
    return MemoryKey{keep_r_ ? 1u : 0u};
  }

 private:
  // Estimates whether Player II keeps playing l under (always r, tau).
  void Decide() {
    const auto sigma_r = StationaryNonRevealing(play_r_);
    const int rollouts = std::max(1, config_.options.rollouts);
    int keeps_l = 0;
    int done = 0;
    for (int n = 0; n < rollouts; ++n) {
      auto tau_agent = config_.tau->Start();
      for (const auto& pair : history_) tau_agent->Observe(pair);
      auto sigma_agent = sigma_r->Start(0);
      Rng rng_i(HistorySeed(config_.options.seed, history_, 2 * n));
      Rng rng_j(HistorySeed(config_.options.seed, history_, 2 * n + 1));
      PlayoutOptions options{
          history_.size() + std::max<std::size_t>(1, config_.options.rollout_horizon),
          true};
      const auto result = Playout(config_.spec, config_.payoff, 0, *sigma_agent,
                                  *tau_agent, rng_i, rng_j, options, history_);
      ++done;
      if (result.payoff < -0.5) ++keeps_l;
      // Without randomness every continuation is the same.
      if (!result.randomized) {
        keeps_l = result.payoff < -0.5 ? rollouts : 0;
        done = rollouts;
        break;
      }
    }
    decided_ = true;
    keep_r_ = 2 * keeps_l >= done;
  }

  const ExploitConfig& config_;
  Distribution play_r_;
  Distribution play_l_;
  int informed_state_;
  bool decided_ = false;
  bool keep_r_ = true;
  PublicHistory history_;
};

class ExploitStrategy final : public InformedStrategy {
 public:
  explicit ExploitStrategy(ExploitConfig config) : config_(std::move(config)) {}
  std::unique_ptr<Agent> Start(int state) const override {
    return std::make_unique<ExploitAgent>(config_, state);
  }
  std::string Describe() const override {
    std::ostringstream out;
    out << "example1_exploit[t=" << config_.options.decision_stage
        << " rollouts=" << config_.options.rollouts << " vs "
        << config_.tau->Describe() << "]";
    return out.str();
  }

 private:
  ExploitConfig config_;
};

}  // namespace

NrOraclePtr AverageOracle(std::vector<Eigen::MatrixXd> stage) {
  return std::make_shared<AverageNrOracle>(std::move(stage));
}

NrOraclePtr Example1Oracle(const GameSpec& spec) {
  return std::make_shared<Example1NrOracle>(spec);
}

ConcaveEnvelope EnvelopeFromOracle(const NrOracle& oracle, int num_states,
                                   double mesh) {
  auto grid = SimplexGrid(num_states, mesh,
                          num_states == 2 ? oracle.Breakpoints()
                                          : std::vector<double>{});
  std::vector<double> values;
  values.reserve(grid.size());
  for (const auto& q : grid) values.push_back(oracle.Value(q));
  return ConcaveEnvelope(std::move(grid), std::move(values));
}

int SignalLength(int num_signals, int num_actions_i) {
  if (num_signals <= 1) return 0;
  if (num_actions_i < 2) {
    throw Error(ErrorCode::kInfeasiblePlan,
                "cannot encode several signals with one action");
  }
  int length = 0;
  long long capacity = 1;
  while (capacity < num_signals) {
    capacity *= num_actions_i;
    ++length;
  }
  return length;
}

std::vector<int> EncodeSignal(int s, int num_signals, int num_actions_i) {
  const int length = SignalLength(num_signals, num_actions_i);
  std::vector<int> digits(length);
  for (int d = length - 1; d >= 0; --d) {
    digits[d] = s % num_actions_i;
    s /= num_actions_i;
  }
  return digits;
}

InformedPtr MakeSplitting(const GameSpec& spec, const SplitPlan& plan) {
  const std::size_t m = plan.weights.size();
  if (m == 0 || plan.posteriors.size() != m || plan.continuations.size() != m) {
    throw Error(ErrorCode::kInfeasiblePlan,
                "split plan needs matching posteriors, weights, continuations");
  }
  if (plan.prior.size() != spec.num_states()) {
    throw Error(ErrorCode::kInfeasiblePlan, "split prior has wrong dimension");
  }
  Eigen::VectorXd residual = -plan.prior.weights();
  double weight_sum = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    if (plan.weights[s] < 0.0 || !plan.continuations[s]) {
      throw Error(ErrorCode::kInfeasiblePlan,
                  "split weights must be nonnegative with a continuation");
    }
    residual += plan.weights[s] * plan.posteriors[s].weights();
    weight_sum += plan.weights[s];
  }
  if (residual.cwiseAbs().maxCoeff() > 1e-10 ||
      std::abs(weight_sum - 1.0) > 1e-10) {
    std::ostringstream out;
    out << "infeasible split plan: residual (";
    for (Eigen::Index k = 0; k < residual.size(); ++k) {
      out << (k ? ", " : "") << residual[k];
    }
    out << "), weight sum " << weight_sum;
    throw Error(ErrorCode::kInfeasiblePlan, out.str());
  }
  return std::make_shared<SplittingStrategy>(spec, plan);
}

SplitPlan OptimalSplitForCav(const Belief& p, const ConcaveEnvelope& envelope,
                             const NrOracle& oracle) {
  const Split split = envelope.SplitAt(p);
  SplitPlan plan{p, split.points, split.weights, {}};
  for (const auto& q : plan.posteriors) {
    plan.continuations.push_back(oracle.Guarantee(q));
  }
  return plan;
}

UninformedPtr MakeBlockResponse(const GameSpec& spec, InformedPtr sigma,
                                const Belief& p, NrOraclePtr oracle,
                                const BlockResponseOptions& options) {
  if (!sigma || !oracle) {
    throw Error(ErrorCode::kValidation,
                "block response needs Player I's strategy and an oracle");
  }
  const double delta =
      options.delta > 0.0
          ? options.delta
          : SelectDelta(options.epsilon, spec.num_states(), options.payoff_range);
  const int depth = options.depth > 0 ? options.depth : spec.num_states();
  if (depth < spec.num_states()) {
    throw Error(ErrorCode::kValidation, "recursion depth must be at least |K|");
  }
  // Validates epsilon and delta.
  BlockTracker(options.epsilon, delta, p);
  return std::make_shared<BlockResponseStrategy>(
      BlockResponseConfig{spec, std::move(sigma), p, std::move(oracle),
                          options.epsilon, delta, depth,
                          options.record_beliefs});
}

InformedPtr MakeExample1Exploit(const GameSpec& spec, const PayoffEvaluator& f,
                                UninformedPtr tau,
                                const ExploitOptions& options) {
  if (spec.num_states() != 2) {
    throw Error(ErrorCode::kValidation, "exploit needs exactly two states");
  }
  if (!tau) throw Error(ErrorCode::kValidation, "exploit needs tau");
  return std::make_shared<ExploitStrategy>(ExploitConfig{
      spec, f, std::move(tau), options, spec.ActionI("l"), spec.ActionI("r")});
}

std::vector<NamedUninformed> Example1Panel(const GameSpec& spec,
                                           std::uint64_t machine_seed) {
  const int nj = spec.num_actions_j();
  const int l = spec.ActionJ("l");
  const int r = spec.ActionJ("r");
  std::vector<NamedUninformed> panel;
  panel.push_back({"always-r", Stationary(PureAction(nj, r))});
  panel.push_back({"always-l", Stationary(PureAction(nj, l))});

  MachineTable once(2, spec.num_actions_i(), nj, PureAction(nj, l));
  once.SetOutput(1, PureAction(nj, r));
  for (int j = 0; j < nj; ++j) once.SetTransition(0, MachineTable::kAny, j, 1);
  panel.push_back({"l-once-then-r", Machine(once, "l-once-then-r")});

  MachineTable alternator(2, spec.num_actions_i(), nj, PureAction(nj, l));
  alternator.SetOutput(1, PureAction(nj, r));
  for (int j = 0; j < nj; ++j) {
    alternator.SetTransition(0, MachineTable::kAny, j, 1);
    alternator.SetTransition(1, MachineTable::kAny, j, 0);
  }
  panel.push_back({"period-2-alternator", Machine(alternator, "period-2-alternator")});

  auto random = RandomMachineII(3, spec.num_actions_i(), nj, machine_seed);
  panel.push_back({"random-3-state", Machine(random, "random-3-state")});
  return panel;
}

}  // namespace tailcav
