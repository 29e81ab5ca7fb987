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

#include "ccpart/lp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccpart/error.hpp"

namespace ccpart::solver {

const char* to_string(LpStatus status) noexcept {
  switch (status) {
    case LpStatus::kOptimal: return "Optimal";
    case LpStatus::kInfeasible: return "Infeasible";
    case LpStatus::kUnbounded: return "Unbounded";
    case LpStatus::kIterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

LpProblem LpProblem::from_inequalities(Eigen::VectorXd objective, Eigen::MatrixXd A,
                                       const Eigen::VectorXd& b, Eigen::VectorXd col_lo,
                                       Eigen::VectorXd col_hi) {
  LpProblem p;
  p.objective = std::move(objective);
  p.A = std::move(A);
  p.row_lo = Eigen::VectorXd::Constant(b.size(), -kInf);
  p.row_hi = b;
  p.col_lo = std::move(col_lo);
  p.col_hi = std::move(col_hi);
  return p;
}

void LpProblem::validate() const {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  require(objective.size() == n, "LpProblem: objective length must equal column count");
  require(row_lo.size() == m && row_hi.size() == m, "LpProblem: row bounds must match rows");
  require(col_lo.size() == n && col_hi.size() == n, "LpProblem: column bounds must match cols");
  for (Eigen::Index i = 0; i < m; ++i) {
    require(!(row_lo[i] > row_hi[i]), "LpProblem: crossed row bounds");
    require(!std::isnan(row_lo[i]) && !std::isnan(row_hi[i]), "LpProblem: NaN row bound");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    require(!(col_lo[j] > col_hi[j]), "LpProblem: crossed column bounds");
    require(std::isfinite(objective[j]), "LpProblem: non-finite objective");
  }
  require(A.allFinite(), "LpProblem: non-finite constraint coefficient");
}

namespace {

// Dense bounded-variable tableau.
//
// Columns 0..n-1 are the structural variables, n..n+m-1 the row activities
// r_i with A_i x - r_i = 0. Phase 1 adds one artificial per violated row; an
// artificial's column is a scaled copy of its row-activity column, so it is
// never stored. Artificials leave the basis for good once they drop out.
class Tableau {
 public:
  Tableau(const LpProblem& p, const LpOptions& o)
      : p_(p), opt_(o), m_(static_cast<int>(p.A.rows())), n_(static_cast<int>(p.A.cols())),
        cols_(n_ + m_) {
    max_iter_ = opt_.max_iterations > 0 ? opt_.max_iterations : 50L * (m_ + n_) + 1000;
    T_.assign(static_cast<std::size_t>(m_) * cols_, 0.0);
    lo_.resize(cols_);
    hi_.resize(cols_);
    value_.assign(cols_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = p.col_lo[j];
      hi_[j] = p.col_hi[j];
      if (std::isfinite(lo_[j])) value_[j] = lo_[j];
      else if (std::isfinite(hi_[j])) value_[j] = hi_[j];
      else value_[j] = 0.0;
    }
    for (int i = 0; i < m_; ++i) {
      lo_[n_ + i] = p.row_lo[i];
      hi_[n_ + i] = p.row_hi[i];
    }
    basis_.assign(m_, -1);
    is_basic_.assign(cols_, false);
    art_value_.assign(m_, 0.0);
    art_active_.assign(m_, false);
    banned_.assign(cols_, false);

    for (int i = 0; i < m_; ++i) {
      double act = 0.0;
      for (int j = 0; j < n_; ++j) act += p.A(i, j) * value_[j];
      double* row = &T_[static_cast<std::size_t>(i) * cols_];
      const double tol = opt_.feasibility_tol * (1.0 + std::abs(act));
      if (act >= lo_[n_ + i] - tol && act <= hi_[n_ + i] + tol) {
        // r_i basic: row = -[A_i | -e_i].
        for (int j = 0; j < n_; ++j) row[j] = -p.A(i, j);
        row[n_ + i] = 1.0;
        basis_[i] = n_ + i;
        is_basic_[n_ + i] = true;
        value_[n_ + i] = act;
      } else {
        // Artificial basic; r_i parked at the violated bound.
        const double bound = act > hi_[n_ + i] ? hi_[n_ + i] : lo_[n_ + i];
        const double sigma = act > hi_[n_ + i] ? -1.0 : 1.0;
        value_[n_ + i] = bound;
        for (int j = 0; j < n_; ++j) row[j] = p.A(i, j) / sigma;
        row[n_ + i] = -1.0 / sigma;
        basis_[i] = kArtificial;
        art_active_[i] = true;
        art_value_[i] = (bound - act) / sigma;
      }
    }
  }

  LpResult solve() {
    LpResult result;
    bool any_art = std::any_of(art_active_.begin(), art_active_.end(), [](bool b) { return b; });
    if (any_art) {
      phase_ = 1;
      compute_reduced_costs();
      const LpStatus s = iterate();
      if (s == LpStatus::kIterationLimit) return finish(result, s);
      double infeas = 0.0;
      for (int i = 0; i < m_; ++i)
        if (basis_[i] == kArtificial) infeas += std::abs(art_value_[i]);
      if (infeas > opt_.infeasibility_tol) return finish(result, LpStatus::kInfeasible);
      drive_out_artificials();
    }
    phase_ = 2;
    compute_reduced_costs();
    return finish(result, iterate());
  }

 private:
  static constexpr int kArtificial = -2;

  double& at(int i, int j) { return T_[static_cast<std::size_t>(i) * cols_ + j]; }
  double at(int i, int j) const { return T_[static_cast<std::size_t>(i) * cols_ + j]; }

  double cost(int j) const { return (phase_ == 2 && j < n_) ? p_.objective[j] : 0.0; }
  double basic_cost(int i) const {
    if (basis_[i] == kArtificial) return phase_ == 1 ? 1.0 : 0.0;
    return cost(basis_[i]);
  }
  double basic_value(int i) const {
    return basis_[i] == kArtificial ? art_value_[i] : value_[basis_[i]];
  }
  double basic_lo(int i) const { return basis_[i] == kArtificial ? 0.0 : lo_[basis_[i]]; }
  double basic_hi(int i) const {
    if (basis_[i] == kArtificial) return phase_ == 1 ? kInf : 0.0;
    return hi_[basis_[i]];
  }
  void set_basic_value(int i, double v) {
    if (basis_[i] == kArtificial) art_value_[i] = v;
    else value_[basis_[i]] = v;
  }

  void compute_reduced_costs() {
    d_.assign(cols_, 0.0);
    for (int j = 0; j < cols_; ++j) d_[j] = cost(j);
    for (int i = 0; i < m_; ++i) {
      const double cb = basic_cost(i);
      if (cb == 0.0) continue;
      const double* row = &T_[static_cast<std::size_t>(i) * cols_];
      for (int j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
    }
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= 0) d_[basis_[i]] = 0.0;
  }

  // Entering column and direction (+1 increase, -1 decrease); -1 when optimal.
  int price(bool bland, int& dir) const {
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < cols_; ++j) {
      if (is_basic_[j] || banned_[j] || !(lo_[j] < hi_[j])) continue;
      const bool at_lo = std::isfinite(lo_[j]) && value_[j] <= lo_[j];
      const bool at_hi = std::isfinite(hi_[j]) && value_[j] >= hi_[j];
      double score = 0.0;
      int d = 0;
      if (!at_hi && d_[j] < -opt_.optimality_tol) {
        score = -d_[j];
        d = 1;
      } else if (!at_lo && d_[j] > opt_.optimality_tol) {
        score = d_[j];
        d = -1;
      }
      if (d == 0) continue;
      if (bland) {
        dir = d;
        return j;
      }
      if (score > best_score) {
        best_score = score;
        best = j;
        dir = d;
      }
    }
    return best;
  }

  void pivot(int r, int q) {
    double* pr = &T_[static_cast<std::size_t>(r) * cols_];
    const double inv = 1.0 / pr[q];
    nz_.clear();
    for (int j = 0; j < cols_; ++j) {
      if (pr[j] == 0.0) continue;
      pr[j] *= inv;
      if (std::abs(pr[j]) < 1e-14) pr[j] = 0.0;
      else nz_.push_back(j);
    }
    pr[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &T_[static_cast<std::size_t>(i) * cols_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (int j : nz_) row[j] -= f * pr[j];
      row[q] = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
      for (int j : nz_) d_[j] -= f * pr[j];
    }
    d_[q] = 0.0;
  }

  LpStatus iterate() {
    int degenerate_streak = 0;
    while (true) {
      if (iterations_ >= max_iter_) return LpStatus::kIterationLimit;
      const bool bland = degenerate_streak >= opt_.bland_after;
      int dir = 0;
      const int q = price(bland, dir);
      if (q < 0) return LpStatus::kOptimal;
      ++iterations_;

      // Harris two-pass ratio test.
      double t_relaxed = kInf;
      if (std::isfinite(lo_[q]) && std::isfinite(hi_[q])) t_relaxed = hi_[q] - lo_[q];
      const double flip_limit = t_relaxed;
      for (int i = 0; i < m_; ++i) {
        const double rate = -dir * at(i, q);
        if (std::abs(rate) <= opt_.pivot_tol) continue;
        const double v = basic_value(i);
        double t;
        if (rate < 0) {
          const double lo = basic_lo(i);
          if (!std::isfinite(lo)) continue;
          t = (v - lo + opt_.feasibility_tol) / -rate;
        } else {
          const double hi = basic_hi(i);
          if (!std::isfinite(hi)) continue;
          t = (hi - v + opt_.feasibility_tol) / rate;
        }
        t_relaxed = std::min(t_relaxed, t);
      }
      if (!std::isfinite(t_relaxed)) return LpStatus::kUnbounded;

      int leave = -1;
      double best_pivot = 0.0;
      double t_leave = kInf;
      for (int i = 0; i < m_; ++i) {
        const double rate = -dir * at(i, q);
        if (std::abs(rate) <= opt_.pivot_tol) continue;
        const double v = basic_value(i);
        double t;
        if (rate < 0) {
          const double lo = basic_lo(i);
          if (!std::isfinite(lo)) continue;
          t = (v - lo) / -rate;
        } else {
          const double hi = basic_hi(i);
          if (!std::isfinite(hi)) continue;
          t = (hi - v) / rate;
        }
        if (t > t_relaxed) continue;
        bool take;
        if (leave < 0) take = true;
        else if (bland) take = basic_id(i) < basic_id(leave);
        else take = std::abs(rate) > best_pivot;
        if (take) {
          leave = i;
          best_pivot = std::abs(rate);
          t_leave = std::max(t, 0.0);
        }
      }

      if (leave < 0 || flip_limit <= t_leave) {
        // Bound flip of the entering variable; basis unchanged.
        const double t = flip_limit;
        move(q, dir, t);
        value_[q] = dir > 0 ? hi_[q] : lo_[q];
        degenerate_streak = 0;
        continue;
      }

      const double t = t_leave;
      const double rate = -dir * at(leave, q);
      move(q, dir, t);
      // Leaving variable lands exactly on the bound it hit.
      const double landed = rate < 0 ? basic_lo(leave) : basic_hi(leave);
      const int old = basis_[leave];
      if (old == kArtificial) {
        art_value_[leave] = 0.0;
        art_active_[leave] = false;
      } else {
        value_[old] = landed;
        is_basic_[old] = false;
      }
      pivot(leave, q);
      basis_[leave] = q;
      is_basic_[q] = true;
      degenerate_streak = t <= 1e-12 ? degenerate_streak + 1 : 0;
    }
  }

  int basic_id(int i) const { return basis_[i] == kArtificial ? cols_ + i : basis_[i]; }

  void move(int q, int dir, double t) {
    if (t == 0.0) return;
    for (int i = 0; i < m_; ++i) {
      const double a = at(i, q);
      if (a == 0.0) continue;
      set_basic_value(i, basic_value(i) - dir * a * t);
    }
    value_[q] += dir * t;
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] != kArtificial) continue;
      int q = -1;
      double best = 1e-7;
      for (int j = 0; j < cols_; ++j) {
        if (is_basic_[j]) continue;
        if (std::abs(at(i, j)) > best) {
          best = std::abs(at(i, j));
          q = j;
        }
      }
      if (q < 0) continue;  // redundant row; artificial stays basic at 0
      art_active_[i] = false;
      pivot(i, q);
      basis_[i] = q;
      is_basic_[q] = true;
    }
    for (int i = 0; i < m_; ++i)
      if (basis_[i] == kArtificial) art_value_[i] = 0.0;
    // Recompute basic values from the nonbasic ones.
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] == kArtificial) continue;
      double v = 0.0;
      const double* row = &T_[static_cast<std::size_t>(i) * cols_];
      for (int j = 0; j < cols_; ++j)
        if (!is_basic_[j] && row[j] != 0.0) v -= row[j] * value_[j];
      value_[basis_[i]] = v;
    }
  }

  // Recomputes the basic values from the original data (LU of the basis).
  void refine() {
    std::vector<int> cols;
    cols.reserve(m_);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int k = 0; k < m_; ++k) {
      const int j = basis_[k];
      if (j < 0) {
        B(k, k) = 1.0;  // artificial column (value forced to 0 below)
        continue;
      }
      if (j < n_) B.col(k) = p_.A.col(j);
      else B(j - n_, k) = -1.0;
    }
    for (int j = 0; j < cols_; ++j) {
      if (is_basic_[j] || value_[j] == 0.0) continue;
      if (j < n_) rhs -= p_.A.col(j) * value_[j];
      else rhs[j - n_] += value_[j];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    const Eigen::VectorXd xb = lu.solve(rhs);
    if (!xb.allFinite()) return;
    for (int k = 0; k < m_; ++k)
      if (basis_[k] >= 0) value_[basis_[k]] = xb[k];
  }

  double residual() const {
    double res = 0.0;
    for (int i = 0; i < m_; ++i) {
      double act = 0.0;
      for (int j = 0; j < n_; ++j) act += p_.A(i, j) * value_[j];
      res = std::max(res, std::abs(act - value_[n_ + i]));
    }
    return res;
  }

  LpResult& finish(LpResult& r, LpStatus status) {
    r.status = status;
    r.iterations = iterations_;
    if (status != LpStatus::kOptimal) return r;
    if (residual() > 1e-9) refine();
    r.x = Eigen::Map<const Eigen::VectorXd>(value_.data(), n_);
    r.activity = p_.A * r.x;
    r.residual = m_ > 0 ? (r.activity - Eigen::Map<const Eigen::VectorXd>(value_.data() + n_, m_))
                              .cwiseAbs()
                              .maxCoeff()
                        : 0.0;
    r.objective = p_.objective.dot(r.x);
    r.row_duals.resize(m_);
    for (int i = 0; i < m_; ++i) r.row_duals[i] = d_[n_ + i];
    return r;
  }

  const LpProblem& p_;
  LpOptions opt_;
  int m_, n_, cols_;
  long max_iter_ = 0;
  long iterations_ = 0;
  int phase_ = 1;
  std::vector<double> T_;
  std::vector<double> lo_, hi_, value_, d_;
  std::vector<int> basis_;
  std::vector<bool> is_basic_;
  std::vector<double> art_value_;
  std::vector<bool> art_active_;
  std::vector<bool> banned_;
  std::vector<int> nz_;
};

}  // namespace

LpResult solve_lp(const LpProblem& problem, const LpOptions& options) {
  problem.validate();
  if (problem.num_rows() == 0) {
    // Box-constrained: each variable independently at its best bound.
    LpResult r;
    const Eigen::Index n = problem.num_cols();
    r.x.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double c = problem.objective[j];
      const double lo = problem.col_lo[j], hi = problem.col_hi[j];
      double v;
      if (c > 0) v = lo;
      else if (c < 0) v = hi;
      else v = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
      if (!std::isfinite(v)) {
        r.status = LpStatus::kUnbounded;
        return r;
      }
      r.x[j] = v;
    }
    r.status = LpStatus::kOptimal;
    r.objective = problem.objective.dot(r.x);
    r.activity.resize(0);
    r.row_duals.resize(0);
    return r;
  }
  Tableau tableau(problem, options);
  return tableau.solve();
}

}  // namespace ccpart::solver
