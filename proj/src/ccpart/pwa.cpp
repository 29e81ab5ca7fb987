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

#include "ccpart/pwa.hpp"

#include <cmath>

#include "ccpart/error.hpp"

namespace ccpart::pwa {

void PwaModel::validate() const {
  require(n_s >= 1 && n_u >= 1 && n_eta >= 0, "PwaModel: bad dimensions");
  require(m() >= 1, "PwaModel: need at least one mode");
  require(static_cast<int>(regions.size()) == m(), "PwaModel: one region per mode");
  for (const auto& md : modes) {
    require(md.A.rows() == n_s && md.A.cols() == n_s, "PwaModel: A must be n_s x n_s");
    require(md.B.rows() == n_s && md.B.cols() == n_u, "PwaModel: B must be n_s x n_u");
    require(md.C.rows() == n_s && md.C.cols() == n_eta, "PwaModel: C must be n_s x n_eta");
    require(md.v.size() == n_s, "PwaModel: v must have n_s entries");
  }
  for (const auto& r : regions)
    require(r.dim() == n_s + n_u + n_eta, "PwaModel: regions live in (s,u,eta) space");
  require(state_set.dim() == n_s, "PwaModel: state set dimension mismatch");
  require(input_set.dim() == n_u, "PwaModel: input set dimension mismatch");
}

bool PwaModel::regions_disjoint(double margin) const {
  for (int i = 0; i < m(); ++i)
    for (int j = i + 1; j < m(); ++j)
      if (geometry::interiors_overlap(regions[i], regions[j], margin)) return false;
  return true;
}

PwaModel benchmark_model() {
  PwaModel md;
  md.n_s = 3;
  md.n_u = 1;
  md.n_eta = 2;
  Mat B(3, 1);
  B << 0, 0, 1;
  Mat C(3, 2);
  C << 0, 0, 1, 0, 0, 1;
  Mat A1(3, 3), A2(3, 3), A3(3, 3);
  A1 << 0.8, 1, 1, 0, 0.9, 1, 0, 0, 0.2;
  A2 << 0.8, 1, 1, 0, -0.9, 1, 0, 0, -0.2;
  A3 << 0.8, 1, 1, 0, 0.5, 1, 0, 0, 0.5;
  for (const Mat& A : {A1, A2, A3}) md.modes.push_back({A, B, C, Vec::Zero(3)});
  const int n = 6;
  auto row = [&](double coef) {
    Mat r = Mat::Zero(1, n);
    r(0, 0) = coef;
    return r;
  };
  md.regions.emplace_back(row(1.0), Vec::Constant(1, -1.0));
  Mat A_mid(2, n);
  A_mid << row(1.0), row(-1.0);
  md.regions.emplace_back(A_mid, Vec::Constant(2, 1.0));
  md.regions.emplace_back(row(-1.0), Vec::Constant(1, -1.0));
  Mat S(2, 3);
  S << 0, 0, 1, 0, 0, -1;
  md.state_set = Polytope(S, Vec::Constant(2, 0.7));
  Mat U(2, 1);
  U << 1, -1;
  md.input_set = Polytope(U, Vec::Constant(2, 0.7));
  return md;
}

Vec benchmark_initial_state() {
  Vec s(3);
  s << 1.5, 2.0, 1.0;
  return s;
}

void StageCost::validate(int n_s, int n_u) const {
  require(Q.rows() == n_s && Q.cols() == n_s, "StageCost: Q must be n_s x n_s");
  require(R.rows() == n_u && R.cols() == n_u, "StageCost: R must be n_u x n_u");
  require((Q.array() >= 0).all() && (R.array() >= 0).all(), "StageCost: entries must be nonnegative");
}

StageCost benchmark_cost() {
  StageCost c;
  c.Q = 2.0 * Mat::Identity(3, 3);
  c.R = Mat::Ones(1, 1);
  return c;
}

std::vector<Sequence> enumerate_sequences(int m, int N, std::size_t cap) {
  require(m >= 1 && N >= 1, "enumerate_sequences: need m >= 1 and N >= 1");
  std::size_t count = 1;
  for (int k = 0; k < N; ++k) {
    if (count > cap / static_cast<std::size_t>(m))
      fail(ErrorCode::kCombinatorialBlowup, "enumerate_sequences: m^N exceeds the cap");
    count *= static_cast<std::size_t>(m);
  }
  if (count > cap) fail(ErrorCode::kCombinatorialBlowup, "enumerate_sequences: m^N exceeds the cap");
  std::vector<Sequence> out;
  out.reserve(count);
  Sequence seq(static_cast<std::size_t>(N), 0);
  while (true) {
    out.push_back(seq);
    int k = N - 1;
    while (k >= 0 && seq[k] == m - 1) seq[k--] = 0;
    if (k < 0) break;
    ++seq[k];
  }
  return out;
}

std::string sequence_label(const Sequence& seq) {
  std::string s;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (k) s += '-';
    s += std::to_string(seq[k] + 1);
  }
  return s;
}

Prediction prediction_matrices(const PwaModel& model, const Sequence& seq) {
  const int N = static_cast<int>(seq.size());
  const int ns = model.n_s, nu = model.n_u, ne = model.n_eta;
  Prediction p;
  p.F = Mat::Zero((N + 1) * ns, ns);
  p.G = Mat::Zero((N + 1) * ns, N * nu);
  p.Gamma = Mat::Zero((N + 1) * ns, N * ne);
  p.v = Vec::Zero((N + 1) * ns);
  p.F.topRows(ns).setIdentity();
  for (int k = 0; k < N; ++k) {
    require(seq[k] >= 0 && seq[k] < model.m(), "prediction_matrices: mode index out of range");
    const Mode& md = model.modes[seq[k]];
    const int r0 = k * ns, r1 = (k + 1) * ns;
    p.F.middleRows(r1, ns) = md.A * p.F.middleRows(r0, ns);
    p.G.middleRows(r1, ns) = md.A * p.G.middleRows(r0, ns);
    p.G.block(r1, k * nu, ns, nu) += md.B;
    p.Gamma.middleRows(r1, ns) = md.A * p.Gamma.middleRows(r0, ns);
    if (ne > 0) p.Gamma.block(r1, k * ne, ns, ne) += md.C;
    p.v.segment(r1, ns) = md.A * p.v.segment(r0, ns) + md.v;
  }
  return p;
}

PredictionModel build_prediction_model(const PwaModel& model, int N, std::size_t cap) {
  model.validate();
  PredictionModel pm;
  pm.N = N;
  pm.sequences = enumerate_sequences(model.m(), N, cap);
  pm.stacks.reserve(pm.sequences.size());
  for (const auto& s : pm.sequences) pm.stacks.push_back(prediction_matrices(model, s));
  return pm;
}

namespace {

Mat block_diag(const Mat& M, int count) {
  Mat out = Mat::Zero(M.rows() * count, M.cols() * count);
  for (int k = 0; k < count; ++k) out.block(k * M.rows(), k * M.cols(), M.rows(), M.cols()) = M;
  return out;
}

}  // namespace

problems::ConstraintSystem compile_ocp(const PwaModel& model, const PredictionModel& prediction,
                                       const StageCost& cost, const Vec& s_t) {
  model.validate();
  cost.validate(model.n_s, model.n_u);
  require(s_t.size() == model.n_s && s_t.allFinite(), "compile_ocp: bad initial state");
  const int N = prediction.N;
  const int ns = model.n_s, nu = model.n_u, ne = model.n_eta;
  const int nx = N * nu, nth = N * ne;

  problems::ConstraintSystem sys;
  sys.n_x = nx;
  sys.n_theta = nth;

  // Input rows L_u x <= l_u and their bounding box.
  const Polytope& U = model.input_set;
  sys.G = Mat::Zero(N * U.rows(), nx);
  sys.g = Vec::Zero(N * U.rows());
  for (int k = 0; k < N; ++k) {
    sys.G.block(k * U.rows(), k * nu, U.rows(), nu) = U.A();
    sys.g.segment(k * U.rows(), U.rows()) = U.b();
  }
  Vec ulo(nu), uhi(nu);
  for (int i = 0; i < nu; ++i) {
    Vec e = Vec::Zero(nu);
    e[i] = 1.0;
    uhi[i] = geometry::linear_max(U, e);
    ulo[i] = -geometry::linear_max(U, -e);
  }
  sys.decision_box = Box(ulo.replicate(N, 1), uhi.replicate(N, 1));

  sys.cost = problems::CostTerm::zero(nx, nth);
  sys.cost.P = block_diag(cost.R, N);
  sys.cost.Q = Mat::Zero(sys.cost.P.rows(), nth);
  sys.cost.q = Vec::Zero(sys.cost.P.rows());

  const Polytope& S = model.state_set;
  const Mat Qbig = block_diag(cost.Q, N);
  for (std::size_t h = 0; h < prediction.sequences.size(); ++h) {
    const Sequence& seq = prediction.sequences[h];
    const Prediction& p = prediction.stacks[h];
    const Vec s_free = p.F * s_t + p.v;  // affine part of the stacked state
    std::vector<Eigen::RowVectorXd> Cr, Dr;
    std::vector<double> br;
    std::vector<char> sel;
    bool dead = false;
    for (int k = 0; k < N && !dead; ++k) {
      const Polytope& Om = model.regions[seq[k]];
      const Mat Hs = Om.A().leftCols(ns);
      const Mat Hu = Om.A().middleCols(ns, nu);
      const Mat He = Om.A().rightCols(ne);
      for (Eigen::Index l = 0; l < Om.rows(); ++l) {
        Eigen::RowVectorXd c = Hs.row(l) * p.G.middleRows(k * ns, ns);
        c.segment(k * nu, nu) += Hu.row(l);
        Eigen::RowVectorXd d = Hs.row(l) * p.Gamma.middleRows(k * ns, ns);
        if (ne > 0) d.segment(k * ne, ne) += He.row(l);
        const double b = Hs.row(l).dot(s_free.segment(k * ns, ns)) - Om.b()[l];
        if (c.isZero(0.0) && d.isZero(0.0)) {
          if (b > 1e-12) dead = true;
          continue;
        }
        Cr.push_back(c);
        Dr.push_back(d);
        br.push_back(b);
        sel.push_back(1);
      }
    }
    if (dead) continue;
    for (int k = 1; k <= N; ++k) {
      for (Eigen::Index l = 0; l < S.rows(); ++l) {
        Cr.push_back(S.A().row(l) * p.G.middleRows(k * ns, ns));
        Dr.push_back(S.A().row(l) * p.Gamma.middleRows(k * ns, ns));
        br.push_back(S.A().row(l).dot(s_free.segment(k * ns, ns)) - S.b()[l]);
        sel.push_back(0);
      }
    }
    problems::Branch b;
    const Eigen::Index rows = static_cast<Eigen::Index>(br.size());
    b.C.resize(rows, nx);
    b.D.resize(rows, nth);
    b.b.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      b.C.row(r) = Cr[r];
      b.D.row(r) = Dr[r];
      b.b[r] = br[r];
    }
    b.selector = sel;
    b.label = sequence_label(seq);
    sys.branches.push_back(std::move(b));

    problems::CostTerm ct = problems::CostTerm::zero(nx, nth);
    ct.P = Qbig * p.G.bottomRows(N * ns);
    ct.Q = Qbig * p.Gamma.bottomRows(N * ns);
    ct.q = Qbig * s_free.tail(N * ns);
    sys.branch_costs.push_back(std::move(ct));
  }
  if (sys.branches.empty())
    fail(ErrorCode::kNoActiveRegion, "compile_ocp: the state lies in no region");
  sys.validate();
  return sys;
}

double induced_one_norm(const Mat& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().colwise().sum().maxCoeff();
}

Lipschitz lipschitz_constants(const PredictionModel& prediction, const StageCost& cost, int n_u) {
  double g = 0.0, gam = 0.0;
  for (const auto& p : prediction.stacks) {
    g = std::max(g, induced_one_norm(p.G));
    gam = std::max(gam, induced_one_norm(p.Gamma));
  }
  const double q = induced_one_norm(cost.Q);
  Lipschitz L;
  L.L_eta = q * gam;
  L.L_u = (q * g + induced_one_norm(cost.R)) * std::sqrt(static_cast<double>(prediction.N * n_u));
  return L;
}

int active_mode(const PwaModel& model, const Vec& s, const Vec& u, const Vec& eta) {
  Vec z(model.n_s + model.n_u + model.n_eta);
  z << s, u, eta;
  for (int l = 0; l < model.m(); ++l)
    if (model.regions[l].contains(z, 1e-12)) return l;
  fail(ErrorCode::kNoActiveRegion, "simulate_step: no region contains the point");
}

Vec simulate_step(const PwaModel& model, const Vec& s, const Vec& u, const Vec& eta, int* mode) {
  const int l = active_mode(model, s, u, eta);
  if (mode) *mode = l;
  const Mode& md = model.modes[l];
  Vec next = md.A * s + md.B * u + md.v;
  if (model.n_eta > 0) next += md.C * eta;
  return next;
}

Vec simulate_stack(const PwaModel& model, const Vec& s0, const Vec& u_stack, const Vec& eta_stack,
                   Sequence* modes) {
  const int nu = model.n_u, ne = model.n_eta, ns = model.n_s;
  const int N = static_cast<int>(u_stack.size() / nu);
  Vec out((N + 1) * ns);
  out.head(ns) = s0;
  if (modes) modes->assign(N, 0);
  Vec s = s0;
  for (int k = 0; k < N; ++k) {
    int l = 0;
    s = simulate_step(model, s, u_stack.segment(k * nu, nu), eta_stack.segment(k * ne, ne), &l);
    if (modes) (*modes)[k] = l;
    out.segment((k + 1) * ns, ns) = s;
  }
  return out;
}

double rollout_cost(const PwaModel& model, const StageCost& cost, const Vec& s0, const Vec& u_stack,
                    const Vec& eta_stack) {
  const Vec traj = simulate_stack(model, s0, u_stack, eta_stack);
  const int ns = model.n_s, nu = model.n_u;
  const int N = static_cast<int>(u_stack.size() / nu);
  double v = 0.0;
  for (int k = 1; k <= N; ++k)
    v += (cost.Q * traj.segment(k * ns, ns)).lpNorm<1>() +
         (cost.R * u_stack.segment((k - 1) * nu, nu)).lpNorm<1>();
  return v;
}

Box stacked_box(const Box& per_step, int N) {
  return Box(per_step.lo().replicate(N, 1), per_step.hi().replicate(N, 1));
}

}  // namespace ccpart::pwa
