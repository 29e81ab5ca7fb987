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

#include <cstddef>
#include <string>
#include <vector>

#include "ccpart/external.hpp"
#include "ccpart/geometry.hpp"
#include "ccpart/milp.hpp"
#include "ccpart/partition.hpp"

namespace ccpart::problems {

using geometry::Box;
using geometry::Mat;
using geometry::Vec;

// ||P x + Q theta + q||_1 + lin_x'x + lin_theta'theta + constant.
struct CostTerm {
  Mat P, Q;
  Vec q;
  Vec lin_x, lin_theta;
  double constant = 0.0;

  static CostTerm zero(int n_x, int n_theta);
  double evaluate(const Vec& x, const Vec& theta) const;
  bool theta_free() const;
  Eigen::Index terms() const { return P.rows(); }
};

// One disjunct: C x + D theta + b <= 0 row-wise. Selector rows identify the
// branch that actually describes the system at (x, theta) (mode-region rows
// for PWA models); a branch without selector rows is selected by all rows.
struct Branch {
  Mat C, D;
  Vec b;
  std::vector<char> selector;
  std::string label;

  Eigen::Index rows() const { return C.rows(); }
  bool has_selector() const;
  // max_l of the rows (g_h); -inf for a branch with no rows.
  double value(const Vec& x, const Vec& theta) const;
  bool selected(const Vec& x, const Vec& theta, double tol) const;
};

struct ConstraintSystem {
  int n_x = 0;
  int n_theta = 0;
  std::vector<Branch> branches;
  Box decision_box;
  // Extra theta-free rows G x <= g on the decision.
  Mat G;
  Vec g;
  // Cost evaluated at each representative. branch_costs, when present, holds
  // one term per branch, charged for the branch selected at the representative.
  CostTerm cost;
  std::vector<CostTerm> branch_costs;

  int Z() const { return static_cast<int>(branches.size()); }
  void validate() const;
  // min_h g_h(x, theta) <= tol.
  bool satisfied(const Vec& x, const Vec& theta, double tol = 0.0) const;
  // First branch selected at (x, theta), or -1.
  int selected_branch(const Vec& x, const Vec& theta, double tol = 1e-9) const;
  // J(x, theta); NaN when branch costs exist and no branch is selected.
  double nominal_cost(const Vec& x, const Vec& theta) const;
};

// Drops branches whose selecting rows admit no (x, theta) in decision box x
// theta_domain (one LP each).
ConstraintSystem prune_branches(const ConstraintSystem& system, const Box& theta_domain);

// tau[j][h], gamma[j][h]: per-row tightening and relaxation of branch h on cell j.
struct Tightening {
  std::vector<std::vector<Vec>> tau;
  std::vector<std::vector<Vec>> gamma;
  double margin = 0.0;
};

inline constexpr double kDefaultMargin = 1e-6;

Tightening compute_tightening(const ConstraintSystem& system, const partition::Partition& partition,
                              double margin = kDefaultMargin);

// M[j][h][l] making row l of branch h on cell j non-binding over the decision box.
std::vector<std::vector<Vec>> big_m_values(const ConstraintSystem& system,
                                           const partition::Partition& partition,
                                           const Tightening& tightening);

enum class Selection { kOptimal, kGreedy };
enum class SurrogateKind { kTightened, kRelaxed };

struct SurrogateOptions {
  Selection selection = Selection::kOptimal;
  std::size_t max_binaries = 20000;  // cap on K * Z
};

// Cells chosen by sorting masses in decreasing order (ties by index) and
// accumulating until the cover reaches 1 - eps_eff. Returns 0/1 per cell.
std::vector<int> greedy_cover(const Vec& masses, double eps_eff);

struct Surrogate {
  SurrogateKind kind = SurrogateKind::kTightened;
  solver::MilpModel model;
  double eps_eff = 0.0;
  int K = 0, Z = 0;
  std::vector<int> x_var;
  // Coverage binary per cell, or -1 when fixed (value in z_fixed).
  std::vector<int> z_var;
  std::vector<int> z_fixed;
  // y[j][h]: branch witness binary, -1 when absent.
  std::vector<std::vector<int>> y_var;
};

Surrogate build_pp(const ConstraintSystem& system, const partition::Partition& partition,
                   const Tightening& tightening, double eps_eff,
                   const SurrogateOptions& options = {});
Surrogate build_rp(const ConstraintSystem& system, const partition::Partition& partition,
                   const Tightening& tightening, double eps_eff,
                   const SurrogateOptions& options = {});

struct SurrogateResult {
  solver::MilpStatus status = solver::MilpStatus::kError;
  Vec x;
  double objective = 0.0;
  std::vector<int> cover;   // z per cell
  std::vector<int> branch;  // witness branch per covered cell, -1 otherwise
  solver::MilpSolution raw;

  bool ok() const {
    return status == solver::MilpStatus::kOptimal || status == solver::MilpStatus::kGapLimit ||
           (status == solver::MilpStatus::kTimeLimit && raw.has_solution());
  }
};

SurrogateResult solve_surrogate(const Surrogate& s, const solver::MilpOptions& options = {},
                                const solver::ExternalEngine* engine = nullptr);

// sum_j mass_j J(x, representative_j).
double partition_cost(const ConstraintSystem& system, const partition::Partition& partition,
                      const Vec& x);

}  // namespace ccpart::problems
