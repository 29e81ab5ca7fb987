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

#include "ccpart/problems.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ccpart/error.hpp"
#include "ccpart/lp.hpp"

namespace ccpart::problems {

using solver::kInf;
using solver::MilpModel;

CostTerm CostTerm::zero(int n_x, int n_theta) {
  CostTerm c;
  c.P = Mat::Zero(0, n_x);
  c.Q = Mat::Zero(0, n_theta);
  c.q = Vec::Zero(0);
  c.lin_x = Vec::Zero(n_x);
  c.lin_theta = Vec::Zero(n_theta);
  return c;
}

double CostTerm::evaluate(const Vec& x, const Vec& theta) const {
  double v = constant + lin_x.dot(x) + lin_theta.dot(theta);
  if (P.rows() > 0) v += (P * x + Q * theta + q).lpNorm<1>();
  return v;
}

bool CostTerm::theta_free() const {
  return (Q.size() == 0 || Q.isZero(0.0)) && (lin_theta.size() == 0 || lin_theta.isZero(0.0));
}

bool Branch::has_selector() const {
  return std::any_of(selector.begin(), selector.end(), [](char c) { return c != 0; });
}

double Branch::value(const Vec& x, const Vec& theta) const {
  if (rows() == 0) return -kInf;
  return (C * x + D * theta + b).maxCoeff();
}

bool Branch::selected(const Vec& x, const Vec& theta, double tol) const {
  const bool any = has_selector();
  for (Eigen::Index l = 0; l < rows(); ++l) {
    if (any && !selector[l]) continue;
    if (C.row(l).dot(x) + D.row(l).dot(theta) + b[l] > tol) return false;
  }
  return true;
}

void ConstraintSystem::validate() const {
  require(n_x >= 1, "ConstraintSystem: decision dimension must be positive");
  require(n_theta >= 0, "ConstraintSystem: negative uncertainty dimension");
  require(Z() >= 1, "ConstraintSystem: need at least one branch");
  require(decision_box.dim() == n_x, "ConstraintSystem: decision box dimension mismatch");
  for (const auto& br : branches) {
    require(br.C.cols() == n_x && br.D.cols() == n_theta, "ConstraintSystem: branch width mismatch");
    require(br.D.rows() == br.rows() && br.b.size() == br.rows(),
            "ConstraintSystem: branch row count mismatch");
    require(br.selector.empty() || static_cast<Eigen::Index>(br.selector.size()) == br.rows(),
            "ConstraintSystem: selector length mismatch");
  }
  require(G.rows() == g.size() && (G.rows() == 0 || G.cols() == n_x),
          "ConstraintSystem: decision rows mismatch");
  require(branch_costs.empty() || static_cast<int>(branch_costs.size()) == Z(),
          "ConstraintSystem: one branch cost per branch expected");
  auto check_cost = [&](const CostTerm& c) {
    require(c.P.cols() == n_x && c.Q.cols() == n_theta && c.P.rows() == c.Q.rows() &&
                c.q.size() == c.P.rows() && c.lin_x.size() == n_x && c.lin_theta.size() == n_theta,
            "ConstraintSystem: cost term shape mismatch");
  };
  check_cost(cost);
  for (const auto& c : branch_costs) check_cost(c);
}

bool ConstraintSystem::satisfied(const Vec& x, const Vec& theta, double tol) const {
  for (const auto& br : branches)
    if (br.value(x, theta) <= tol) return true;
  return false;
}

int ConstraintSystem::selected_branch(const Vec& x, const Vec& theta, double tol) const {
  for (int h = 0; h < Z(); ++h)
    if (branches[h].selected(x, theta, tol)) return h;
  return -1;
}

double ConstraintSystem::nominal_cost(const Vec& x, const Vec& theta) const {
  double v = cost.evaluate(x, theta);
  if (!branch_costs.empty()) {
    const int h = selected_branch(x, theta);
    if (h < 0) return std::nan("");
    v += branch_costs[h].evaluate(x, theta);
  }
  return v;
}

ConstraintSystem prune_branches(const ConstraintSystem& system, const Box& theta_domain) {
  system.validate();
  require(theta_domain.dim() == system.n_theta, "prune_branches: domain dimension mismatch");
  ConstraintSystem out = system;
  out.branches.clear();
  out.branch_costs.clear();
  const int n = system.n_x + system.n_theta;
  for (int h = 0; h < system.Z(); ++h) {
    const Branch& br = system.branches[h];
    const bool any = br.has_selector();
    std::vector<Eigen::Index> rows;
    for (Eigen::Index l = 0; l < br.rows(); ++l)
      if (!any || br.selector[l]) rows.push_back(l);
    const Eigen::Index m = static_cast<Eigen::Index>(rows.size()) + system.G.rows();
    Mat A = Mat::Zero(m, n);
    Vec rhs(m);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      A.block(k, 0, 1, system.n_x) = br.C.row(rows[k]);
      A.block(k, system.n_x, 1, system.n_theta) = br.D.row(rows[k]);
      rhs[k] = -br.b[rows[k]];
    }
    for (Eigen::Index r = 0; r < system.G.rows(); ++r) {
      A.block(rows.size() + r, 0, 1, system.n_x) = system.G.row(r);
      rhs[rows.size() + r] = system.g[r];
    }
    Vec lo(n), hi(n);
    lo << system.decision_box.lo(), theta_domain.lo();
    hi << system.decision_box.hi(), theta_domain.hi();
    const auto r = solver::solve_lp(
        solver::LpProblem::from_inequalities(Vec::Zero(n), A, rhs, lo, hi));
    if (r.status == solver::LpStatus::kInfeasible) continue;
    out.branches.push_back(br);
    if (!system.branch_costs.empty()) out.branch_costs.push_back(system.branch_costs[h]);
  }
  if (out.branches.empty())
    fail(ErrorCode::kInfeasible, "prune_branches: no branch admits any (x, theta)");
  return out;
}

namespace {

// max and min of d'theta over the cell.
std::pair<double, double> row_range(const partition::Cell& cell, const Vec& d) {
  if (d.isZero(0.0)) return {0.0, 0.0};
  if (cell.box) {
    double hi = 0.0, lo = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const double a = d[i] * cell.box->lo()[i], b = d[i] * cell.box->hi()[i];
      hi += std::max(a, b);
      lo += std::min(a, b);
    }
    return {hi, lo};
  }
  return {geometry::linear_max(cell.region, d), -geometry::linear_max(cell.region, -d)};
}

struct RowKey {
  std::vector<double> v;
  bool operator<(const RowKey& o) const { return v < o.v; }
};

double box_max(const Eigen::RowVectorXd& c, const Box& box) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    s += std::max(c[i] * box.lo()[i], c[i] * box.hi()[i]);
  return s;
}

double box_min(const Eigen::RowVectorXd& c, const Box& box) { return -box_max(-c, box); }

}  // namespace

Tightening compute_tightening(const ConstraintSystem& system, const partition::Partition& partition,
                              double margin) {
  system.validate();
  require(margin >= 0.0, "compute_tightening: margin must be nonnegative");
  require(partition.domain.dim() == system.n_theta, "compute_tightening: dimension mismatch");
  Tightening t;
  t.margin = margin;
  const int K = partition.K();
  t.tau.assign(K, std::vector<Vec>(system.Z()));
  t.gamma.assign(K, std::vector<Vec>(system.Z()));
  for (int j = 0; j < K; ++j) {
    const auto& cell = partition.cells[j];
    const Vec& rep = cell.representative;
    std::map<RowKey, std::pair<double, double>> cache;
    for (int h = 0; h < system.Z(); ++h) {
      const Mat& D = system.branches[h].D;
      Vec tau(D.rows()), gam(D.rows());
      for (Eigen::Index l = 0; l < D.rows(); ++l) {
        const Vec d = D.row(l).transpose();
        RowKey key{std::vector<double>(d.data(), d.data() + d.size())};
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, row_range(cell, d)).first;
        const double at_rep = d.dot(rep);
        tau[l] = it->second.first - at_rep + margin;
        gam[l] = at_rep - it->second.second + margin;
      }
      t.tau[j][h] = tau;
      t.gamma[j][h] = gam;
    }
  }
  return t;
}

std::vector<std::vector<Vec>> big_m_values(const ConstraintSystem& system,
                                           const partition::Partition& partition,
                                           const Tightening& tightening) {
  const Box& X = system.decision_box;
  for (Eigen::Index i = 0; i < X.dim(); ++i)
    if (!std::isfinite(X.lo()[i]) || !std::isfinite(X.hi()[i]))
      fail(ErrorCode::kUnbounded, "big_m_values: decision box must be bounded");
  std::vector<std::vector<Vec>> M(partition.K(), std::vector<Vec>(system.Z()));
  for (int j = 0; j < partition.K(); ++j) {
    const Vec& rep = partition.cells[j].representative;
    for (int h = 0; h < system.Z(); ++h) {
      const Branch& br = system.branches[h];
      Vec m(br.rows());
      for (Eigen::Index l = 0; l < br.rows(); ++l) {
        const double slack = std::max(tightening.tau[j][h][l], tightening.gamma[j][h][l]);
        const double v = box_max(br.C.row(l), X) + br.D.row(l).dot(rep) + br.b[l] + slack + 1.0;
        m[l] = std::max(0.0, v);
      }
      M[j][h] = m;
    }
  }
  return M;
}

std::vector<int> greedy_cover(const Vec& masses, double eps_eff) {
  require(eps_eff >= 0.0 && eps_eff < 1.0, "greedy_cover: eps_eff must lie in [0,1)");
  const Eigen::Index K = masses.size();
  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return masses[a] > masses[b]; });
  std::vector<int> z(static_cast<std::size_t>(K), 0);
  const double target = 1.0 - eps_eff - 1e-12;
  double acc = 0.0;
  for (int j : order) {
    if (acc >= target) break;
    z[j] = 1;
    acc += masses[j];
  }
  if (acc < target) fail(ErrorCode::kCoverageImpossible, "greedy_cover: masses cannot reach 1 - eps");
  return z;
}

namespace {

class SurrogateBuilder {
 public:
  SurrogateBuilder(const ConstraintSystem& sys, const partition::Partition& part,
                   const Tightening& tt, double eps, const SurrogateOptions& opt,
                   SurrogateKind kind)
      : sys_(sys), part_(part), tt_(tt), eps_(eps), opt_(opt), m_(s_.model) {
    s_.kind = kind;
  }

  Surrogate build() {
    sys_.validate();
    require(eps_ >= 0.0 && eps_ < 1.0, "surrogate: effective risk must lie in [0,1)");
    const int K = part_.K();
    const int Z = sys_.Z();
    require(part_.domain.dim() == sys_.n_theta, "surrogate: partition dimension mismatch");
    require(static_cast<int>(tt_.tau.size()) == K, "surrogate: tightening does not match partition");
    if (static_cast<std::size_t>(K) * static_cast<std::size_t>(Z) > opt_.max_binaries)
      fail(ErrorCode::kModelTooLarge, "surrogate: K*Z exceeds the binary cap");
    s_.K = K;
    s_.Z = Z;
    s_.eps_eff = eps_;
    M_ = big_m_values(sys_, part_, tt_);

    for (int i = 0; i < sys_.n_x; ++i)
      s_.x_var.push_back(m_.add_variable("x" + std::to_string(i), sys_.decision_box.lo()[i],
                                         sys_.decision_box.hi()[i], 0.0));
    for (Eigen::Index r = 0; r < sys_.G.rows(); ++r)
      add_x_row(sys_.G.row(r), sys_.g[r], {}, "G" + std::to_string(r));

    const Vec masses = part_.masses();
    std::vector<int> greedy;
    if (opt_.selection == Selection::kGreedy) greedy = greedy_cover(masses, eps_);

    s_.z_var.assign(K, -1);
    s_.z_fixed.assign(K, 0);
    s_.y_var.assign(K, std::vector<int>(Z, -1));
    std::vector<int> coverage_idx;
    std::vector<double> coverage_val;
    double total_mass = 0.0;

    for (int j = 0; j < K; ++j) {
      const double p = masses[j];
      if (p <= 0.0) continue;  // zero-mass cells neither cost nor cover
      total_mass += p;
      const std::string tag = std::to_string(j);
      if (opt_.selection == Selection::kGreedy) {
        s_.z_fixed[j] = greedy[j];
      } else {
        s_.z_var[j] = m_.add_binary("z" + tag);
        coverage_idx.push_back(s_.z_var[j]);
        coverage_val.push_back(p);
      }
      const bool may_cover = s_.z_var[j] >= 0 || s_.z_fixed[j] == 1;
      const bool branch_cost = !sys_.branch_costs.empty() && Z > 1;
      const bool link_y = s_.kind == SurrogateKind::kTightened && branch_cost;
      if (Z > 1 && (may_cover || link_y)) {
        std::vector<int> idx;
        for (int h = 0; h < Z; ++h) {
          s_.y_var[j][h] = m_.add_binary("y" + tag + "_" + std::to_string(h));
          idx.push_back(s_.y_var[j][h]);
        }
        m_.add_row(idx, std::vector<double>(idx.size(), 1.0), 1.0, 1.0, "one" + tag);
      }
      if (may_cover) add_cell_rows(j);
      add_cell_cost(j, p, branch_cost, link_y);
    }
    if (!coverage_idx.empty())
      m_.add_row(coverage_idx, coverage_val, 1.0 - eps_ - 1e-12, kInf, "coverage");

    // theta-free global cost charged once with the total mass.
    if (sys_.cost.theta_free()) add_cost_term(sys_.cost, Vec::Zero(sys_.n_theta), total_mass, "g");
    m_.set_offset(offset_);
    return std::move(s_);
  }

 private:
  // C x + sum coef*bin <= rhs, skipping rows that can never bind.
  void add_x_row(const Eigen::RowVectorXd& c, double rhs,
                 const std::vector<std::pair<int, double>>& bins, const std::string& name) {
    std::vector<int> idx;
    std::vector<double> val;
    for (int i = 0; i < sys_.n_x; ++i)
      if (c[i] != 0.0) {
        idx.push_back(s_.x_var[i]);
        val.push_back(c[i]);
      }
    if (bins.empty() && box_max(c, sys_.decision_box) <= rhs) return;
    for (auto& [v, a] : bins) {
      idx.push_back(v);
      val.push_back(a);
    }
    m_.add_le(idx, val, rhs, name);
  }

  void add_cell_rows(int j) {
    const Vec& rep = part_.cells[j].representative;
    const bool tight = s_.kind == SurrogateKind::kTightened;
    for (int h = 0; h < sys_.Z(); ++h) {
      const Branch& br = sys_.branches[h];
      const int y = s_.y_var[j][h];
      const int z = s_.z_var[j];
      for (Eigen::Index l = 0; l < br.rows(); ++l) {
        const double shift = tight ? -tt_.tau[j][h][l] : tt_.gamma[j][h][l];
        double rhs = -br.D.row(l).dot(rep) - br.b[l] + shift;
        const double M = M_[j][h][l];
        std::vector<std::pair<int, double>> bins;
        if (y >= 0) {
          bins.emplace_back(y, M);
          rhs += M;
        }
        if (z >= 0) {
          bins.emplace_back(z, M);
          rhs += M;
        }
        add_x_row(br.C.row(l), rhs, bins,
                  "r" + std::to_string(j) + "_" + std::to_string(h) + "_" + std::to_string(l));
      }
    }
  }

  // sum_r |P_r x + c_r| weighted; returns aux vars (cost zero when weight 0).
  std::vector<int> add_abs(const CostTerm& c, const Vec& theta, double weight,
                           const std::string& name) {
    std::vector<int> aux;
    const Vec cst = c.Q * theta + c.q;
    for (Eigen::Index r = 0; r < c.P.rows(); ++r) {
      if (c.P.row(r).isZero(0.0)) {
        offset_ += weight * std::abs(cst[r]);
        continue;
      }
      const int a = m_.add_variable("a" + name + "_" + std::to_string(r), 0.0, kInf, weight);
      std::vector<int> idx;
      std::vector<double> pos, neg;
      for (int i = 0; i < sys_.n_x; ++i)
        if (c.P(r, i) != 0.0) {
          idx.push_back(s_.x_var[i]);
          pos.push_back(c.P(r, i));
          neg.push_back(-c.P(r, i));
        }
      idx.push_back(a);
      pos.push_back(-1.0);
      neg.push_back(-1.0);
      m_.add_le(idx, pos, -cst[r], "ap" + name + "_" + std::to_string(r));
      m_.add_le(idx, neg, cst[r], "an" + name + "_" + std::to_string(r));
      aux.push_back(a);
    }
    return aux;
  }

  void add_cost_term(const CostTerm& c, const Vec& theta, double weight, const std::string& name) {
    add_abs(c, theta, weight, name);
    for (int i = 0; i < sys_.n_x; ++i)
      if (c.lin_x[i] != 0.0)
        m_.set_cost(s_.x_var[i], m_.cost()[s_.x_var[i]] + weight * c.lin_x[i]);
    offset_ += weight * (c.lin_theta.dot(theta) + c.constant);
  }

  // Upper and lower bounds of a cost term over the decision box at theta.
  std::pair<double, double> cost_range(const CostTerm& c, const Vec& theta) const {
    double hi = c.lin_theta.dot(theta) + c.constant;
    double lo = hi;
    const Box& X = sys_.decision_box;
    hi += box_max(c.lin_x.transpose(), X);
    lo += box_min(c.lin_x.transpose(), X);
    const Vec cst = c.Q * theta + c.q;
    for (Eigen::Index r = 0; r < c.P.rows(); ++r) {
      const double a = box_max(c.P.row(r), X) + cst[r];
      const double b = box_min(c.P.row(r), X) + cst[r];
      hi += std::max(std::abs(a), std::abs(b));
      lo += (a >= 0 && b <= 0) ? 0.0 : std::min(std::abs(a), std::abs(b));
    }
    return {hi, lo};
  }

  void add_cell_cost(int j, double p, bool branch_cost, bool link_y) {
    const Vec& rep = part_.cells[j].representative;
    const std::string tag = std::to_string(j);
    if (!sys_.cost.theta_free()) add_cost_term(sys_.cost, rep, p, "c" + tag);
    if (sys_.branch_costs.empty()) return;
    if (!branch_cost) {
      add_cost_term(sys_.branch_costs[0], rep, p, "b" + tag);
      return;
    }
    const int Z = sys_.Z();
    // Branch selector binaries: the witness itself in the tightened model,
    // a separate nominal selection in the relaxed one.
    std::vector<int> sel(Z);
    if (link_y) {
      sel = s_.y_var[j];
    } else {
      std::vector<int> idx;
      for (int h = 0; h < Z; ++h) {
        sel[h] = m_.add_binary("w" + tag + "_" + std::to_string(h));
        idx.push_back(sel[h]);
      }
      m_.add_row(idx, std::vector<double>(idx.size(), 1.0), 1.0, 1.0, "onew" + tag);
    }
    double lb = kInf;
    std::vector<double> ub(Z);
    for (int h = 0; h < Z; ++h) {
      auto [hi, lo] = cost_range(sys_.branch_costs[h], rep);
      ub[h] = hi;
      lb = std::min(lb, lo);
    }
    const int t = m_.add_variable("t" + tag, lb, kInf, p);
    for (int h = 0; h < Z; ++h) {
      const Branch& br = sys_.branches[h];
      const bool any = br.has_selector();
      const std::string bt = tag + "_" + std::to_string(h);
      // Nominal selection at the representative.
      for (Eigen::Index l = 0; l < br.rows(); ++l) {
        if (any && !br.selector[l]) continue;
        const double M = std::max(0.0, box_max(br.C.row(l), sys_.decision_box) +
                                           br.D.row(l).dot(rep) + br.b[l] + 1.0);
        add_x_row(br.C.row(l), -br.D.row(l).dot(rep) - br.b[l] + M, {{sel[h], M}},
                  "s" + bt + "_" + std::to_string(l));
      }
      const CostTerm& c = sys_.branch_costs[h];
      const std::vector<int> aux = add_abs(c, rep, 0.0, "h" + bt);
      const double Mt = ub[h] - lb + 1.0;
      std::vector<int> idx = aux;
      std::vector<double> val(aux.size(), 1.0);
      for (int i = 0; i < sys_.n_x; ++i)
        if (c.lin_x[i] != 0.0) {
          idx.push_back(s_.x_var[i]);
          val.push_back(c.lin_x[i]);
        }
      idx.push_back(t);
      val.push_back(-1.0);
      idx.push_back(sel[h]);
      val.push_back(Mt);
      // Constant |.| parts were pushed to offset_ by add_abs with weight 0,
      // so add them back explicitly on this row.
      double cst = c.lin_theta.dot(rep) + c.constant;
      const Vec q = c.Q * rep + c.q;
      for (Eigen::Index r = 0; r < c.P.rows(); ++r)
        if (c.P.row(r).isZero(0.0)) cst += std::abs(q[r]);
      m_.add_le(idx, val, Mt - cst, "t" + bt);
    }
  }

  const ConstraintSystem& sys_;
  const partition::Partition& part_;
  const Tightening& tt_;
  double eps_;
  SurrogateOptions opt_;
  Surrogate s_;
  MilpModel& m_;
  std::vector<std::vector<Vec>> M_;
  double offset_ = 0.0;
};

}  // namespace

Surrogate build_pp(const ConstraintSystem& system, const partition::Partition& partition,
                   const Tightening& tightening, double eps_eff, const SurrogateOptions& options) {
  return SurrogateBuilder(system, partition, tightening, eps_eff, options,
                          SurrogateKind::kTightened)
      .build();
}

Surrogate build_rp(const ConstraintSystem& system, const partition::Partition& partition,
                   const Tightening& tightening, double eps_eff, const SurrogateOptions& options) {
  return SurrogateBuilder(system, partition, tightening, eps_eff, options, SurrogateKind::kRelaxed)
      .build();
}

SurrogateResult solve_surrogate(const Surrogate& s, const solver::MilpOptions& options,
                                const solver::ExternalEngine* engine) {
  SurrogateResult out;
  out.raw = solver::solve_with_fallback(s.model, options, engine);
  out.status = out.raw.status;
  if (!out.raw.has_solution()) return out;
  const Vec& v = out.raw.x;
  out.x.resize(static_cast<Eigen::Index>(s.x_var.size()));
  for (std::size_t i = 0; i < s.x_var.size(); ++i) out.x[static_cast<Eigen::Index>(i)] = v[s.x_var[i]];
  out.objective = out.raw.objective;
  out.cover.assign(s.K, 0);
  out.branch.assign(s.K, -1);
  for (int j = 0; j < s.K; ++j) {
    out.cover[j] = s.z_var[j] >= 0 ? static_cast<int>(std::lround(v[s.z_var[j]])) : s.z_fixed[j];
    if (!out.cover[j]) continue;
    if (s.Z == 1) {
      out.branch[j] = 0;
      continue;
    }
    for (int h = 0; h < s.Z; ++h)
      if (s.y_var[j][h] >= 0 && v[s.y_var[j][h]] > 0.5) out.branch[j] = h;
  }
  return out;
}

double partition_cost(const ConstraintSystem& system, const partition::Partition& partition,
                      const Vec& x) {
  double v = 0.0;
  for (const auto& cell : partition.cells) {
    if (cell.mass <= 0.0) continue;
    v += cell.mass * system.nominal_cost(x, cell.representative);
  }
  return v;
}

}  // namespace ccpart::problems
