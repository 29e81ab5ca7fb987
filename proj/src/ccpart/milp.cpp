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

#include "ccpart/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <queue>

#include "ccpart/error.hpp"

namespace ccpart::solver {

const char* to_string(MilpStatus status) noexcept {
  switch (status) {
    case MilpStatus::kOptimal: return "Optimal";
    case MilpStatus::kInfeasible: return "Infeasible";
    case MilpStatus::kUnbounded: return "Unbounded";
    case MilpStatus::kGapLimit: return "GapLimit";
    case MilpStatus::kTimeLimit: return "TimeLimit";
    case MilpStatus::kError: return "Error";
  }
  return "Unknown";
}

int MilpModel::add_variable(const std::string& name, double lo, double hi, double cost,
                            bool binary) {
  require(!(lo > hi), "MilpModel: crossed variable bounds");
  names_.push_back(name.empty() ? "v" + std::to_string(cost_.size()) : name);
  cost_.push_back(cost);
  lo_.push_back(lo);
  hi_.push_back(hi);
  binary_.push_back(binary);
  return static_cast<int>(cost_.size()) - 1;
}

int MilpModel::add_row(std::vector<int> index, std::vector<double> value, double lo, double hi,
                       const std::string& name) {
  require(index.size() == value.size(), "MilpModel: row index/value length mismatch");
  std::map<int, double> merged;
  for (std::size_t k = 0; k < index.size(); ++k) {
    require(index[k] >= 0 && index[k] < num_vars(), "MilpModel: row references unknown var");
    merged[index[k]] += value[k];
  }
  Row row;
  for (const auto& [j, v] : merged) {
    if (v == 0.0) continue;
    row.index.push_back(j);
    row.value.push_back(v);
  }
  row.lo = lo;
  row.hi = hi;
  row.name = name.empty() ? "c" + std::to_string(rows_.size()) : name;
  rows_.push_back(std::move(row));
  return static_cast<int>(rows_.size()) - 1;
}

void MilpModel::set_bounds(int var, double lo, double hi) {
  require(!(lo > hi), "MilpModel: crossed variable bounds");
  lo_[var] = lo;
  hi_[var] = hi;
}

int MilpModel::num_binaries() const {
  return static_cast<int>(std::count(binary_.begin(), binary_.end(), true));
}

int MilpModel::find(const std::string& name) const {
  for (int j = 0; j < num_vars(); ++j)
    if (names_[j] == name) return j;
  return -1;
}

LpProblem MilpModel::relaxation() const {
  const int n = num_vars();
  const int m = num_rows();
  LpProblem p;
  p.objective = Eigen::Map<const Eigen::VectorXd>(cost_.data(), n);
  p.A = Eigen::MatrixXd::Zero(m, n);
  p.row_lo.resize(m);
  p.row_hi.resize(m);
  for (int i = 0; i < m; ++i) {
    const Row& r = rows_[i];
    for (std::size_t k = 0; k < r.index.size(); ++k) p.A(i, r.index[k]) = r.value[k];
    p.row_lo[i] = r.lo;
    p.row_hi[i] = r.hi;
  }
  p.col_lo = Eigen::Map<const Eigen::VectorXd>(lo_.data(), n);
  p.col_hi = Eigen::Map<const Eigen::VectorXd>(hi_.data(), n);
  return p;
}

double MilpModel::evaluate(const Eigen::VectorXd& x) const {
  double v = offset_;
  for (int j = 0; j < num_vars(); ++j) v += cost_[j] * x[j];
  return v;
}

double MilpModel::max_violation(const Eigen::VectorXd& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_vars(); ++j) {
    worst = std::max(worst, lo_[j] - x[j]);
    worst = std::max(worst, x[j] - hi_[j]);
  }
  for (const Row& r : rows_) {
    double a = 0.0;
    for (std::size_t k = 0; k < r.index.size(); ++k) a += r.value[k] * x[r.index[k]];
    worst = std::max(worst, r.lo - a);
    worst = std::max(worst, a - r.hi);
  }
  return worst;
}

namespace {

struct Node {
  double bound;
  int depth;
  long id;
  std::vector<signed char> fix;  // per binary: -1 free, 0 or 1 fixed
  int branch_var;                // position in the binary list
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, const MilpOptions& opt)
      : model_(model), opt_(opt), lp_(model.relaxation()),
        start_(std::chrono::steady_clock::now()) {
    for (int j = 0; j < model.num_vars(); ++j)
      if (model.is_binary(j)) binary_.push_back(j);
    base_lo_ = lp_.col_lo;
    base_hi_ = lp_.col_hi;
  }

  MilpSolution run() {
    MilpSolution out;
    std::vector<signed char> root_fix(binary_.size(), -1);
    // Binaries already fixed by the model's bounds.
    for (std::size_t k = 0; k < binary_.size(); ++k) {
      const int j = binary_[k];
      if (base_lo_[j] > 0.5) root_fix[k] = 1;
      else if (base_hi_[j] < 0.5) root_fix[k] = 0;
    }
    LpResult root = solve_node(root_fix);
    if (root.status == LpStatus::kInfeasible) return finish(out, MilpStatus::kInfeasible);
    if (root.status == LpStatus::kUnbounded) return finish(out, MilpStatus::kUnbounded);
    if (root.status != LpStatus::kOptimal) {
      out.message = "root relaxation hit the iteration limit";
      return finish(out, MilpStatus::kError);
    }
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    consider(root_fix, root, 0, open);
    if (opt_.dive && incumbent_x_.size() == 0 && !open.empty()) dive(root_fix, root);

    bool stopped_time = false, stopped_nodes = false;
    while (!open.empty()) {
      if (pruned(open.top().bound)) break;
      if (out_of_time()) {
        stopped_time = true;
        break;
      }
      if (opt_.node_limit > 0 && nodes_ >= opt_.node_limit) {
        stopped_nodes = true;
        break;
      }
      Node node = open.top();
      open.pop();
      for (int side = 0; side < 2; ++side) {
        std::vector<signed char> fix = node.fix;
        fix[node.branch_var] = static_cast<signed char>(side);
        LpResult r = solve_node(fix);
        if (r.status != LpStatus::kOptimal) continue;
        consider(fix, r, node.depth + 1, open);
      }
    }
    double bound;
    if (open.empty()) bound = incumbent_x_.size() > 0 ? incumbent_ : kInf;
    else bound = std::min(open.top().bound, incumbent_x_.size() > 0 ? incumbent_ : kInf);
    out.bound = bound;
    if (incumbent_x_.size() == 0) {
      if (stopped_time) return finish(out, MilpStatus::kTimeLimit);
      if (stopped_nodes) return finish(out, MilpStatus::kGapLimit);
      return finish(out, MilpStatus::kInfeasible);
    }
    out.gap = (incumbent_ - bound) / std::max(1.0, std::abs(incumbent_));
    if (out.gap < 0) out.gap = 0;
    MilpStatus st = MilpStatus::kOptimal;
    if (stopped_time) st = MilpStatus::kTimeLimit;
    else if (stopped_nodes && out.gap > opt_.gap_tol) st = MilpStatus::kGapLimit;
    return finish(out, st);
  }

 private:
  bool out_of_time() const {
    if (opt_.time_limit <= 0) return false;
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return s > opt_.time_limit;
  }

  bool pruned(double bound) const {
    if (incumbent_x_.size() == 0) return false;
    return bound >= incumbent_ - opt_.gap_tol * std::max(1.0, std::abs(incumbent_));
  }

  LpResult solve_node(const std::vector<signed char>& fix) {
    for (std::size_t k = 0; k < binary_.size(); ++k) {
      const int j = binary_[k];
      if (fix[k] < 0) {
        lp_.col_lo[j] = base_lo_[j];
        lp_.col_hi[j] = base_hi_[j];
      } else {
        lp_.col_lo[j] = lp_.col_hi[j] = fix[k];
      }
    }
    ++nodes_;
    LpResult r = solve_lp(lp_, opt_.lp);
    iterations_ += r.iterations;
    return r;
  }

  // Most fractional free binary (lowest index on ties), or -1 when integral.
  int pick_branch(const std::vector<signed char>& fix, const Eigen::VectorXd& x) const {
    int best = -1;
    double best_frac = opt_.integrality_tol;
    for (std::size_t k = 0; k < binary_.size(); ++k) {
      if (fix[k] >= 0) continue;
      const double v = x[binary_[k]];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac + 1e-12) {
        best_frac = frac;
        best = static_cast<int>(k);
      }
    }
    return best;
  }

  void try_incumbent(const std::vector<signed char>& fix, const Eigen::VectorXd& x) {
    std::vector<signed char> rounded = fix;
    for (std::size_t k = 0; k < binary_.size(); ++k)
      if (rounded[k] < 0) rounded[k] = x[binary_[k]] > 0.5 ? 1 : 0;
    LpResult r = solve_node(rounded);
    if (r.status != LpStatus::kOptimal) return;
    Eigen::VectorXd xs = r.x;
    for (std::size_t k = 0; k < binary_.size(); ++k) xs[binary_[k]] = rounded[k];
    if (model_.max_violation(xs) > opt_.feasibility_tol) return;
    const double obj = model_.evaluate(xs);
    if (incumbent_x_.size() == 0 || obj < incumbent_ - 1e-12 * std::max(1.0, std::abs(obj))) {
      incumbent_ = obj;
      incumbent_x_ = xs;
      history_.push_back(obj);
    }
  }

  void consider(const std::vector<signed char>& fix, const LpResult& r, int depth,
                std::priority_queue<Node, std::vector<Node>, NodeOrder>& open) {
    const double bound = r.objective + model_.offset();
    if (pruned(bound)) return;
    const int k = pick_branch(fix, r.x);
    if (k < 0) {
      try_incumbent(fix, r.x);
      return;
    }
    open.push(Node{bound, depth, next_id_++, fix, k});
  }

  void dive(std::vector<signed char> fix, LpResult r) {
    while (true) {
      if (out_of_time()) return;
      const int k = pick_branch(fix, r.x);
      if (k < 0) {
        try_incumbent(fix, r.x);
        return;
      }
      const signed char first = r.x[binary_[k]] >= 0.5 ? 1 : 0;
      fix[k] = first;
      LpResult next = solve_node(fix);
      if (next.status != LpStatus::kOptimal) {
        fix[k] = static_cast<signed char>(1 - first);
        next = solve_node(fix);
        if (next.status != LpStatus::kOptimal) return;
      }
      r = std::move(next);
    }
  }

  MilpSolution& finish(MilpSolution& out, MilpStatus st) {
    out.status = st;
    out.node_count = nodes_;
    out.lp_iterations = iterations_;
    out.incumbent_history = history_;
    if (incumbent_x_.size() > 0) {
      out.x = incumbent_x_;
      out.objective = incumbent_;
      out.binaries.clear();
      for (int j : binary_) out.binaries.push_back(static_cast<int>(std::lround(out.x[j])));
    }
    if (st == MilpStatus::kInfeasible) out.bound = kInf;
    return out;
  }

  const MilpModel& model_;
  MilpOptions opt_;
  LpProblem lp_;
  Eigen::VectorXd base_lo_, base_hi_;
  std::vector<int> binary_;
  std::chrono::steady_clock::time_point start_;
  double incumbent_ = kInf;
  Eigen::VectorXd incumbent_x_;
  std::vector<double> history_;
  long nodes_ = 0;
  long iterations_ = 0;
  long next_id_ = 0;
};

}  // namespace

MilpSolution solve_milp(const MilpModel& model, const MilpOptions& options) {
  BranchAndBound bb(model, options);
  return bb.run();
}

}  // namespace ccpart::solver
