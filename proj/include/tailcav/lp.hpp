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

// Dense two-phase tableau simplex with Bland's rule, and zero-sum matrix
// game values on top of it. Sized for desk-scale problems (tens of rows,
// up to a few thousand columns).

#ifndef TAILCAV_LP_HPP_
#define TAILCAV_LP_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace tailcav {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  VectorX<Scalar> x;
  Scalar objective = 0;
};

template <typename Scalar>
struct LpTolerance {
  static constexpr Scalar value() {
    return std::numeric_limits<Scalar>::epsilon() * Scalar(1024);
  }
};

namespace internal {

template <typename Scalar>
class Tableau {
 public:
  // Rows 0..m-1 are constraints, row m is the reduced-cost row; the last
  // column holds right-hand sides (and minus the objective in row m).
  Tableau(Eigen::Index m, Eigen::Index n)
      : t_(MatrixX<Scalar>::Zero(m + 1, n + 1)), basis_(m, -1) {}

  MatrixX<Scalar>& t() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }
  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index rhs() const { return t_.cols() - 1; }

  void Pivot(Eigen::Index r, Eigen::Index e) {
    t_.row(r) /= t_(r, e);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i != r && t_(i, e) != Scalar(0)) {
        t_.row(i) -= t_(i, e) * t_.row(r);
      }
    }
    basis_[r] = e;
  }

  // Maximizes over columns [0, num_cols). Returns false if unbounded.
  bool Optimize(Eigen::Index num_cols, Scalar tol) {
    const Eigen::Index m = rows();
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < num_cols; ++j) {
        if (t_(m, j) > tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      Scalar best = 0;
      for (Eigen::Index r = 0; r < m; ++r) {
        if (t_(r, enter) <= tol) continue;
        const Scalar ratio = t_(r, rhs()) / t_(r, enter);
        if (leave < 0 || ratio < best - tol ||
            (ratio <= best + tol && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      Pivot(leave, enter);
    }
  }

  // Sets row m to c - c_B B^-1 A for the current basis.
  void PriceOut(const VectorX<Scalar>& cost) {
    const Eigen::Index m = rows();
    t_.row(m).setZero();
    t_.row(m).head(cost.size()) = cost.transpose();
    for (Eigen::Index r = 0; r < m; ++r) {
      const Eigen::Index b = basis_[r];
      if (b >= 0 && b < cost.size() && cost[b] != Scalar(0)) {
        t_.row(m) -= cost[b] * t_.row(r);
      }
    }
  }

 private:
  MatrixX<Scalar> t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace internal

// max c'x  s.t.  A x = b, x >= 0.
template <typename Scalar>
LpResult<Scalar> SolveStandardLp(const MatrixX<Scalar>& a,
                                 const VectorX<Scalar>& b,
                                 const VectorX<Scalar>& c,
                                 Scalar tol = LpTolerance<Scalar>::value()) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  internal::Tableau<Scalar> tab(m, n + m);
  auto& t = tab.t();
  for (Eigen::Index r = 0; r < m; ++r) {
    const Scalar sign = b[r] < Scalar(0) ? Scalar(-1) : Scalar(1);
    t.row(r).head(n) = sign * a.row(r);
    t(r, n + r) = Scalar(1);
    t(r, tab.rhs()) = sign * b[r];
    tab.basis()[r] = n + r;
  }

  // Phase 1: maximize -sum(artificials).
  VectorX<Scalar> phase1 = VectorX<Scalar>::Zero(n + m);
  phase1.tail(m).setConstant(Scalar(-1));
  tab.PriceOut(phase1);
  tab.Optimize(n + m, tol);
  LpResult<Scalar> result;
  const Scalar scale = std::max(Scalar(1), b.cwiseAbs().maxCoeff());
  if (-t(m, tab.rhs()) < -tol * scale * Scalar(m + 1)) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  // Drive remaining artificials out of the basis; rows where that is
  // impossible are redundant and are zeroed.
  for (Eigen::Index r = 0; r < m; ++r) {
    if (tab.basis()[r] < n) continue;
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(t(r, j)) > tol) {
        enter = j;
        break;
      }
    }
    if (enter >= 0) {
      tab.Pivot(r, enter);
    } else {
      t.row(r).setZero();
    }
  }

  // Phase 2 over the original columns only.
  VectorX<Scalar> cost = VectorX<Scalar>::Zero(n + m);
  cost.head(n) = c;
  tab.PriceOut(cost);
  t.block(m, n, 1, m).setZero();
  if (!tab.Optimize(n, tol)) {
    result.status = LpStatus::kUnbounded;
    return result;
  }
  result.status = LpStatus::kOptimal;
  result.x = VectorX<Scalar>::Zero(n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index bcol = tab.basis()[r];
    if (bcol >= 0 && bcol < n) result.x[bcol] = std::max(Scalar(0), t(r, tab.rhs()));
  }
  result.objective = c.dot(result.x);
  return result;
}

template <typename Scalar>
struct MatrixGameSolution {
  Scalar value = 0;
  VectorX<Scalar> row;  // maximizer's mixed action
  VectorX<Scalar> col;  // minimizer's mixed action
  // max_i (G y)_i - min_j (x' G)_j; zero at an exact saddle point.
  Scalar gap = 0;
};

// Value of the zero-sum matrix game G (row player maximizes).
template <typename Scalar>
MatrixGameSolution<Scalar> MatrixValue(const MatrixX<Scalar>& g) {
  const Eigen::Index rows = g.rows();
  const Eigen::Index cols = g.cols();
  const Scalar shift = Scalar(1) - g.minCoeff();
  const MatrixX<Scalar> m = g.array() + shift;  // entries >= 1

  // Column player: max 1'y s.t. M y <= 1, y >= 0 (slacks appended).
  MatrixX<Scalar> a_col(rows, cols + rows);
  a_col << m, MatrixX<Scalar>::Identity(rows, rows);
  VectorX<Scalar> c_col = VectorX<Scalar>::Zero(cols + rows);
  c_col.head(cols).setOnes();
  const auto col_lp =
      SolveStandardLp<Scalar>(a_col, VectorX<Scalar>::Ones(rows), c_col);

  // Row player: min 1'x s.t. M'x >= 1, x >= 0 (surplus appended).
  MatrixX<Scalar> a_row(cols, rows + cols);
  a_row << m.transpose(), -MatrixX<Scalar>::Identity(cols, cols);
  VectorX<Scalar> c_row = VectorX<Scalar>::Zero(rows + cols);
  c_row.head(rows).setConstant(Scalar(-1));
  const auto row_lp =
      SolveStandardLp<Scalar>(a_row, VectorX<Scalar>::Ones(cols), c_row);

  MatrixGameSolution<Scalar> sol;
  const VectorX<Scalar> y = col_lp.x.head(cols);
  const VectorX<Scalar> x = row_lp.x.head(rows);
  sol.col = y / y.sum();
  sol.row = x / x.sum();
  const Scalar upper = (g * sol.col).maxCoeff();
  const Scalar lower = (sol.row.transpose() * g).minCoeff();
  sol.value = (upper + lower) / Scalar(2);
  sol.gap = upper - lower;
  return sol;
}

}  // namespace tailcav

#endif  // TAILCAV_LP_HPP_
