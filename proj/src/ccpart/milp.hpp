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

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccpart/lp.hpp"

namespace ccpart::solver {

// Mixed-binary linear model with sparse rows: minimize c'x + offset subject to
// row_lo <= a_i' x <= row_hi, col_lo <= x <= col_hi, x_j in {0,1} for binaries.
class MilpModel {
 public:
  struct Row {
    std::vector<int> index;
    std::vector<double> value;
    double lo = -kInf;
    double hi = kInf;
    std::string name;
  };

  int add_variable(const std::string& name, double lo, double hi, double cost, bool binary = false);
  int add_binary(const std::string& name, double cost = 0.0) {
    return add_variable(name, 0.0, 1.0, cost, true);
  }
  // Duplicate indices in a row are summed.
  int add_row(std::vector<int> index, std::vector<double> value, double lo, double hi,
              const std::string& name = {});
  int add_le(std::vector<int> index, std::vector<double> value, double hi,
             const std::string& name = {}) {
    return add_row(std::move(index), std::move(value), -kInf, hi, name);
  }

  void set_cost(int var, double cost) { cost_[var] = cost; }
  void set_bounds(int var, double lo, double hi);
  void set_offset(double offset) { offset_ = offset; }

  int num_vars() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_binaries() const;

  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<double>& cost() const { return cost_; }
  const std::vector<double>& lower() const { return lo_; }
  const std::vector<double>& upper() const { return hi_; }
  const std::vector<std::string>& names() const { return names_; }
  bool is_binary(int var) const { return binary_[var]; }
  double offset() const { return offset_; }
  int find(const std::string& name) const;

  // Dense LP relaxation (binaries relaxed to [0,1] or their fixed bounds).
  LpProblem relaxation() const;
  double evaluate(const Eigen::VectorXd& x) const;
  // Largest bound or row violation at x.
  double max_violation(const Eigen::VectorXd& x) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> cost_, lo_, hi_;
  std::vector<bool> binary_;
  std::vector<Row> rows_;
  double offset_ = 0.0;
};

enum class MilpStatus { kOptimal, kInfeasible, kUnbounded, kGapLimit, kTimeLimit, kError };

const char* to_string(MilpStatus status) noexcept;

struct MilpOptions {
  double gap_tol = 1e-6;           // relative, against max(1, |incumbent|)
  double time_limit = 0.0;         // seconds; 0 = none
  long node_limit = 0;             // 0 = none
  double integrality_tol = 1e-6;
  double feasibility_tol = 1e-6;
  bool dive = true;                // depth-first rounding dive for an early incumbent
  LpOptions lp;
};

struct MilpSolution {
  MilpStatus status = MilpStatus::kError;
  Eigen::VectorXd x;
  std::vector<int> binaries;       // values of binary variables in model order
  double objective = kInf;         // includes the model offset
  double bound = -kInf;
  double gap = kInf;
  long node_count = 0;
  long lp_iterations = 0;
  std::vector<double> incumbent_history;
  std::string engine = "builtin";
  std::string message;

  bool has_solution() const { return x.size() > 0; }
};

MilpSolution solve_milp(const MilpModel& model, const MilpOptions& options = {});

}  // namespace ccpart::solver
