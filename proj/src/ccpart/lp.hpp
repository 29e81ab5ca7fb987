// Copyright 2026 The ccpart Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <limits>

#include <Eigen/Dense>

namespace ccpart::solver {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// minimize  objective' x
// s.t.      row_lo <= A x <= row_hi
//           col_lo <=   x <= col_hi
// Plain "<=" rows use row_lo = -inf. Infinite column bounds are allowed.
struct LpProblem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd A;
  Eigen::VectorXd row_lo;
  Eigen::VectorXd row_hi;
  Eigen::VectorXd col_lo;
  Eigen::VectorXd col_hi;

  Eigen::Index num_rows() const { return A.rows(); }
  Eigen::Index num_cols() const { return A.cols(); }

  // A x <= b with the given variable bounds.
  static LpProblem from_inequalities(Eigen::VectorXd objective, Eigen::MatrixXd A,
                                     const Eigen::VectorXd& b, Eigen::VectorXd col_lo,
                                     Eigen::VectorXd col_hi);
  // Throws Error(kInvalidArgument) on inconsistent sizes or crossed bounds.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LpStatus status) noexcept;

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  // Phase-1 sum of artificials above this means infeasible.
  double infeasibility_tol = 1e-7;
  // 0 selects 50 * (rows + cols) + 1000.
  long max_iterations = 0;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int bland_after = 50;
};

struct LpResult {
  LpStatus status = LpStatus::kIterationLimit;
  Eigen::VectorXd x;
  double objective = 0.0;
  // Row activities A x.
  Eigen::VectorXd activity;
  // Multipliers of the row constraints (reduced costs of the row activities).
  Eigen::VectorXd row_duals;
  long iterations = 0;
  // max |A x - activity| from the original data at the returned point.
  double residual = 0.0;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

LpResult solve_lp(const LpProblem& problem, const LpOptions& options = {});

}  // namespace ccpart::solver
