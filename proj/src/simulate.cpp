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

#include "tailcav/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "tailcav/playout.hpp"
#include "tailcav/seeding.hpp"

namespace tailcav {
namespace {

struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void Add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

void ValidateConfig(const SimConfig& config) {
  if (config.horizon < 1) {
    throw Error(ErrorCode::kValidation, "horizon must be at least 1");
  }
  if (config.episodes < 1) {
    throw Error(ErrorCode::kValidation, "episodes must be at least 1");
  }
  if (config.threads < 1) {
    throw Error(ErrorCode::kValidation, "threads must be at least 1");
  }
}

EpisodeResult RunEpisode(const GameSpec& spec, const PayoffEvaluator& f,
                         const InformedStrategy& sigma,
                         const UninformedStrategy& tau, const SimConfig& config,
                         std::size_t index) {
  EpisodeResult out;
  out.index = index;
  out.seed = DeriveSeed(config.master_seed, index, "episode");
  const Belief prior = spec.PriorBelief();
  if (config.forced_state) {
    if (*config.forced_state < 0 || *config.forced_state >= spec.num_states()) {
      throw Error(ErrorCode::kValidation, "forced state out of range");
    }
    out.state = *config.forced_state;
  } else {
    Rng nature(DeriveSeed(out.seed, 0, "nature"));
    out.state = nature.Sample(prior.weights());
  }
  out.state_payoffs.assign(spec.num_states(),
                           std::numeric_limits<double>::quiet_NaN());

  std::vector<int> states{out.state};
  if (config.average_over_states && !config.forced_state) {
    states.clear();
    for (int k = 0; k < spec.num_states(); ++k) {
      if (prior[k] > 0.0) states.push_back(k);
    }
  }
  const PlayoutOptions options{config.horizon, config.lasso_detection};
  out.exact = true;
  double payoff = 0.0;
  for (int k : states) {
    // Same streams for every state: common random numbers.
    Rng rng_i(DeriveSeed(out.seed, 0, "sigma"));
    Rng rng_j(DeriveSeed(out.seed, 0, "tau"));
    auto sigma_agent = sigma.Start(k);
    auto tau_agent = tau.Start();
    PlayoutResult r = Playout(spec, f, k, *sigma_agent, *tau_agent, rng_i,
                              rng_j, options);
    out.state_payoffs[k] = r.payoff;
    out.exact = out.exact && r.exact;
    out.randomized = out.randomized || r.randomized;
    payoff += (states.size() == 1 ? 1.0 : prior[k]) * r.payoff;
    if (k != out.state) continue;
    if (const BlockTrace* trace = tau_agent->Trace()) {
      out.blocks = trace->NewBlockCount();
      out.theta_stage = trace->ThetaStage();
      out.frozen = trace->frozen;
      out.events = trace->events;
      if (config.record_trajectory) out.trajectory = trace->rows;
    }
    if (config.record_trajectory) out.history = std::move(r.history);
  }
  out.payoff = payoff;
  return out;
}

SimResult EstimatePayoff(const GameSpec& spec, const PayoffEvaluator& f,
                         const InformedStrategy& sigma,
                         const UninformedStrategy& tau,
                         const SimConfig& config) {
  ValidateConfig(config);
  RequireValid(spec);
  const std::size_t n = config.episodes;
  SimResult result;
  result.episodes.resize(n);

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(config.threads), n);
  if (workers <= 1) {
    for (std::size_t e = 0; e < n; ++e) {
      result.episodes[e] = RunEpisode(spec, f, sigma, tau, config, e);
    }
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t e = w; e < n; e += workers) {
            result.episodes[e] = RunEpisode(spec, f, sigma, tau, config, e);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  // Fixed reduction order.
  Kahan sum;
  Kahan blocks;
  std::vector<Kahan> state_sum(spec.num_states());
  std::vector<std::size_t> state_count(spec.num_states(), 0);
  std::size_t theta_hits = 0, exact = 0, randomized = 0;
  for (const auto& ep : result.episodes) {
    sum.Add(ep.payoff);
    blocks.Add(ep.blocks);
    result.blocks_max = std::max(result.blocks_max, ep.blocks);
    theta_hits += ep.theta_stage.has_value();
    exact += ep.exact;
    randomized += ep.randomized;
    for (int k = 0; k < spec.num_states(); ++k) {
      if (std::isnan(ep.state_payoffs[k])) continue;
      state_sum[k].Add(ep.state_payoffs[k]);
      ++state_count[k];
    }
  }
  const double dn = static_cast<double>(n);
  result.mean = sum.sum / dn;
  Kahan squares;
  for (const auto& ep : result.episodes) {
    squares.Add((ep.payoff - result.mean) * (ep.payoff - result.mean));
  }
  result.stddev = n > 1 ? std::sqrt(squares.sum / (dn - 1.0)) : 0.0;
  result.ci95 = 1.96 * result.stddev / std::sqrt(dn);
  result.blocks_mean = blocks.sum / dn;
  result.theta_hit_rate = theta_hits / dn;
  result.exact_fraction = exact / dn;
  result.randomized_fraction = randomized / dn;
  for (int k = 0; k < spec.num_states(); ++k) {
    result.per_state_means.push_back(
        state_count[k] ? state_sum[k].sum / state_count[k]
                       : std::numeric_limits<double>::quiet_NaN());
  }
  return result;
}

PanelBound PanelMin(const GameSpec& spec, const PayoffEvaluator& f,
                    const std::function<InformedPtr(const UninformedPtr&)>& sigma_for,
                    const std::vector<NamedUninformed>& taus,
                    const SimConfig& config) {
  if (taus.empty()) throw Error(ErrorCode::kValidation, "empty panel");
  PanelBound bound;
  for (std::size_t m = 0; m < taus.size(); ++m) {
    const InformedPtr sigma = sigma_for(taus[m].strategy);
    bound.entries.push_back(
        {taus[m].name, EstimatePayoff(spec, f, *sigma, *taus[m].strategy, config)});
    if (m == 0 || bound.entries[m].result.mean < bound.value) {
      bound.value = bound.entries[m].result.mean;
      bound.extremal = m;
    }
  }
  return bound;
}

PanelBound PanelMax(const GameSpec& spec, const PayoffEvaluator& f,
                    const std::vector<NamedInformed>& sigmas,
                    const std::function<UninformedPtr(const InformedPtr&)>& tau_for,
                    const SimConfig& config) {
  if (sigmas.empty()) throw Error(ErrorCode::kValidation, "empty panel");
  PanelBound bound;
  for (std::size_t m = 0; m < sigmas.size(); ++m) {
    const UninformedPtr tau = tau_for(sigmas[m].strategy);
    bound.entries.push_back(
        {sigmas[m].name, EstimatePayoff(spec, f, *sigmas[m].strategy, *tau, config)});
    if (m == 0 || bound.entries[m].result.mean > bound.value) {
      bound.value = bound.entries[m].result.mean;
      bound.extremal = m;
    }
  }
  return bound;
}

ExploitOptions ExploitOptionsFor(const SimConfig& config) {
  ExploitOptions options;
  options.rollouts = config.exploit_rollouts;
  options.seed = DeriveSeed(config.master_seed, 0, "exploit");
  return options;
}

}  // namespace tailcav
