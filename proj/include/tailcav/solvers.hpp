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

// Values of non-revealing games and concavification on the simplex.

#ifndef TAILCAV_SOLVERS_HPP_
#define TAILCAV_SOLVERS_HPP_

#include <vector>

#include <Eigen/Core>

#include "tailcav/game_core.hpp"
#include "tailcav/lp.hpp"

namespace tailcav {

using MatrixGame = Eigen::MatrixXd;

// sum_k p(k) G_k.
Eigen::MatrixXd AverageMatrix(const Belief& p,
                              const std::vector<Eigen::MatrixXd>& stage);

// Value of the non-revealing long-run-average game at p, i.e. the value of
// the p-averaged one-shot game.
double NrValueAverage(const Belief& p,
                      const std::vector<Eigen::MatrixXd>& stage);

// Non-revealing value of the first example; p is the probability of k1.
// 1 - 3p on [0, 1/3], 0 on [1/3, 2/3], 2 - 3p on [2/3, 1].
double UExample1(double p);

// Kinks of UExample1.
std::vector<double> Example1Breakpoints();

// Uniform barycentric grid on the simplex with step `mesh` (1/mesh is
// rounded to an integer). For two states the points are (x, 1 - x) with x
// ascending; `extra` adds further x values there.
std::vector<Belief> SimplexGrid(int num_states, double mesh,
                                const std::vector<double>& extra = {});

struct Split {
  std::vector<Belief> points;
  std::vector<double> weights;
  // Sample values at the points.
  std::vector<double> values;
  // sum_s weights[s] * values[s].
  double value = 0.0;
};

// Upper concave envelope of samples (q_i, u(q_i)), q_i in Delta(K).
//
// Two states: the exact envelope of the samples, kept as the sorted upper
// hull of (q_i(k1), u_i). Samples lying on a hull edge stay as breakpoints,
// so the envelope touches u wherever a sample attains it.
// More states: evaluated per query by the LP
//   max sum a_i u_i  s.t.  sum a_i q_i = p, a >= 0,
// whose basic optimal solutions use at most |K| points.
class ConcaveEnvelope {
 public:
  // Throws Error(kDegenerateGrid) with fewer than 2 affinely independent
  // samples (fewer than |K| vertices' worth of spread for |K| > 2).
  ConcaveEnvelope(std::vector<Belief> grid, std::vector<double> values);

  int num_states() const { return num_states_; }
  const std::vector<Belief>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

  // Throws Error(kOutOfDomain) outside the convex hull of the grid.
  double Value(const Belief& q) const;
  double operator()(const Belief& q) const { return Value(q); }

  // Carathéodory representation of Value(q): at most |K| grid points, one
  // when q coincides with a breakpoint.
  Split SplitAt(const Belief& q) const;

  // Two states only: hull vertices as (q(k1), value), ascending.
  const std::vector<Eigen::Vector2d>& breakpoints() const {
    return breakpoints_;
  }

 private:
  Split SplitTwoState(double x) const;
  Split SplitLp(const Belief& q) const;

  int num_states_;
  std::vector<Belief> grid_;
  std::vector<double> values_;
  std::vector<Eigen::Vector2d> breakpoints_;
};

ConcaveEnvelope Concavify(std::vector<Belief> grid, std::vector<double> values);

// Max over grid pairs of |u(q) - u(q')| / ||q - q'||_1 after dividing
// values by `payoff_range` (payoffs rescaled to [0, 1]).
double LipschitzCheck(const std::vector<Belief>& grid,
                      const std::vector<double>& values, double payoff_range);

}  // namespace tailcav

#endif  // TAILCAV_SOLVERS_HPP_
