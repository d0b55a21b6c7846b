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

#include "tailcav/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tailcav {
namespace {

constexpr double kGridTolerance = 1e-12;

void Compositions(int parts, int total, std::vector<int>& current,
                  std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int a = total; a >= 0; --a) {
    current.push_back(a);
    Compositions(parts - 1, total - a, current, out);
    current.pop_back();
  }
}

}  // namespace

Eigen::MatrixXd AverageMatrix(const Belief& p,
                              const std::vector<Eigen::MatrixXd>& stage) {
  if (static_cast<Eigen::Index>(stage.size()) != p.size()) {
    throw Error(ErrorCode::kValidation,
                "one stage matrix per state is required");
  }
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(stage[0].rows(), stage[0].cols());
  for (std::size_t k = 0; k < stage.size(); ++k) avg += p[k] * stage[k];
  return avg;
}

double NrValueAverage(const Belief& p,
                      const std::vector<Eigen::MatrixXd>& stage) {
  return MatrixValue<double>(AverageMatrix(p, stage)).value;
}

double UExample1(double p) {
  if (p < 0.0 || p > 1.0) {
    throw Error(ErrorCode::kOutOfDomain, "probability outside [0, 1]");
  }
  if (p <= 1.0 / 3.0) return 1.0 - 3.0 * p;
  if (p <= 2.0 / 3.0) return 0.0;
  return 2.0 - 3.0 * p;
}

std::vector<double> Example1Breakpoints() { return {1.0 / 3.0, 2.0 / 3.0}; }

std::vector<Belief> SimplexGrid(int num_states, double mesh,
                                const std::vector<double>& extra) {
  if (num_states < 1) throw Error(ErrorCode::kValidation, "no states");
  if (!(mesh > 0.0 && mesh <= 1.0)) {
    throw Error(ErrorCode::kValidation, "mesh must lie in (0, 1]");
  }
  const int steps = std::max(1, static_cast<int>(std::lround(1.0 / mesh)));
  std::vector<Belief> grid;
  if (num_states == 1) {
    grid.push_back(Belief::Vertex(1, 0));
    return grid;
  }
  if (num_states == 2) {
    std::vector<double> xs;
    for (int a = 0; a <= steps; ++a) xs.push_back(static_cast<double>(a) / steps);
    for (double x : extra) {
      if (x < 0.0 || x > 1.0) {
        throw Error(ErrorCode::kOutOfDomain, "grid point outside [0, 1]");
      }
      xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) {
                           return std::abs(a - b) <= kGridTolerance;
                         }),
             xs.end());
    for (double x : xs) grid.push_back(Belief::TwoState(x));
    return grid;
  }
  std::vector<std::vector<int>> parts;
  std::vector<int> current;
  Compositions(num_states, steps, current, parts);
  for (const auto& c : parts) {
    Eigen::VectorXd w(num_states);
    for (int k = 0; k < num_states; ++k) w[k] = static_cast<double>(c[k]) / steps;
    grid.push_back(Belief::Normalized(w));
  }
  return grid;
}

ConcaveEnvelope::ConcaveEnvelope(std::vector<Belief> grid,
                                 std::vector<double> values)
    : num_states_(grid.empty() ? 0 : static_cast<int>(grid[0].size())),
      grid_(std::move(grid)),
      values_(std::move(values)) {
  if (grid_.size() != values_.size()) {
    throw Error(ErrorCode::kValidation, "grid and values differ in length");
  }
  for (const auto& q : grid_) {
    if (q.size() != num_states_) {
      throw Error(ErrorCode::kValidation, "grid beliefs differ in dimension");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kValidation, "sample values must be finite");
    }
  }
  bool spread = false;
  for (std::size_t n = 1; n < grid_.size() && !spread; ++n) {
    spread = grid_[n].L1Distance(grid_[0]) > kGridTolerance;
  }
  if (!spread) {
    throw Error(ErrorCode::kDegenerateGrid,
                "degenerate grid: fewer than 2 affinely independent points");
  }
  if (num_states_ != 2) return;

  std::vector<Eigen::Vector2d> pts;
  pts.reserve(grid_.size());
  for (std::size_t n = 0; n < grid_.size(); ++n) {
    pts.emplace_back(grid_[n][0], values_[n]);
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() > b.y());
  });
  // One sample per abscissa: the highest.
  std::vector<Eigen::Vector2d> unique;
  for (const auto& pt : pts) {
    if (unique.empty() || pt.x() - unique.back().x() > kGridTolerance) {
      unique.push_back(pt);
    }
  }
  double scale = 1.0;
  for (const auto& pt : unique) scale = std::max(scale, std::abs(pt.y()));
  const double tol = kGridTolerance * scale;
  for (const auto& pt : unique) {
    while (breakpoints_.size() >= 2) {
      const auto& o = breakpoints_[breakpoints_.size() - 2];
      const auto& a = breakpoints_.back();
      const double chord =
          o.y() + (pt.y() - o.y()) * (a.x() - o.x()) / (pt.x() - o.x());
      if (a.y() < chord - tol) {
        breakpoints_.pop_back();
      } else {
        break;
      }
    }
    breakpoints_.push_back(pt);
  }
}

double ConcaveEnvelope::Value(const Belief& q) const {
  return SplitAt(q).value;
}

Split ConcaveEnvelope::SplitAt(const Belief& q) const {
  if (q.size() != num_states_) {
    throw Error(ErrorCode::kOutOfDomain, "query belief has wrong dimension");
  }
  if (num_states_ == 2) return SplitTwoState(q[0]);
  return SplitLp(q);
}

Split ConcaveEnvelope::SplitTwoState(double x) const {
  const double lo = breakpoints_.front().x();
  const double hi = breakpoints_.back().x();
  if (x < lo - kGridTolerance || x > hi + kGridTolerance) {
    throw Error(ErrorCode::kOutOfDomain, "query outside the sampled domain");
  }
  Split split;
  auto single = [&split](const Eigen::Vector2d& bp) {
    split.points.push_back(Belief::TwoState(bp.x()));
    split.weights.push_back(1.0);
    split.values.push_back(bp.y());
    split.value = bp.y();
  };
  const auto it = std::lower_bound(
      breakpoints_.begin(), breakpoints_.end(), x,
      [](const Eigen::Vector2d& bp, double v) { return bp.x() < v; });
  if (it != breakpoints_.end() && std::abs(it->x() - x) <= kGridTolerance) {
    single(*it);
    return split;
  }
  if (it != breakpoints_.begin() &&
      std::abs(std::prev(it)->x() - x) <= kGridTolerance) {
    single(*std::prev(it));
    return split;
  }
  if (it == breakpoints_.end()) {
    single(breakpoints_.back());
    return split;
  }
  if (it == breakpoints_.begin()) {
    single(breakpoints_.front());
    return split;
  }
  const Eigen::Vector2d& a = *std::prev(it);
  const Eigen::Vector2d& b = *it;
  const double wb = (x - a.x()) / (b.x() - a.x());
  split.points = {Belief::TwoState(a.x()), Belief::TwoState(b.x())};
  split.weights = {1.0 - wb, wb};
  split.values = {a.y(), b.y()};
  split.value = (1.0 - wb) * a.y() + wb * b.y();
  return split;
}

Split ConcaveEnvelope::SplitLp(const Belief& q) const {
  const Eigen::Index n = static_cast<Eigen::Index>(grid_.size());
  Eigen::MatrixXd a(num_states_, n);
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.col(i) = grid_[i].weights();
    c[i] = values_[i];
  }
  const auto lp = SolveStandardLp<double>(a, q.weights(), c);
  if (lp.status != LpStatus::kOptimal) {
    throw Error(ErrorCode::kOutOfDomain, "query outside the sampled domain");
  }
  Split split;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lp.x[i] > kGridTolerance) total += lp.x[i];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lp.x[i] <= kGridTolerance) continue;
    split.points.push_back(grid_[i]);
    split.weights.push_back(lp.x[i] / total);
    split.values.push_back(values_[i]);
    split.value += split.weights.back() * values_[i];
  }
  return split;
}

ConcaveEnvelope Concavify(std::vector<Belief> grid,
                          std::vector<double> values) {
  return ConcaveEnvelope(std::move(grid), std::move(values));
}

double LipschitzCheck(const std::vector<Belief>& grid,
                      const std::vector<double>& values, double payoff_range) {
  const double range = payoff_range > 0.0 ? payoff_range : 1.0;
  double best = 0.0;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    for (std::size_t b = a + 1; b < grid.size(); ++b) {
      const double dist = grid[a].L1Distance(grid[b]);
      if (dist <= kGridTolerance) continue;
      best = std::max(best, std::abs(values[a] - values[b]) / range / dist);
    }
  }
  return best;
}

}  // namespace tailcav
