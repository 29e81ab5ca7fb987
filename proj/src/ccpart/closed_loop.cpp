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

#include "ccpart/closed_loop.hpp"

#include <limits>

#include "ccpart/error.hpp"

namespace ccpart::pwa {

std::string to_string(Splitting s) {
  switch (s) {
    case Splitting::kGrid: return "grid";
    case Splitting::kKMeans: return "kmeans";
    case Splitting::kAdaptive: return "adaptive";
  }
  return "?";
}

Splitting splitting_from_string(const std::string& s) {
  if (s == "grid") return Splitting::kGrid;
  if (s == "kmeans") return Splitting::kKMeans;
  if (s == "adaptive") return Splitting::kAdaptive;
  fail(ErrorCode::kConfigError, "unknown splitting strategy '" + s + "'");
}

int critical_step(const PwaModel& model, const Vec& s, const Vec& u_stack, const Vec& eta_stack) {
  const Vec traj = simulate_stack(model, s, u_stack, eta_stack);
  const int ns = model.n_s;
  const int N = static_cast<int>(u_stack.size() / model.n_u);
  const Polytope& S = model.state_set;
  int best = 1;
  double best_slack = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= N; ++k) {
    const double slack = (S.b() - S.A() * traj.segment(k * ns, ns)).minCoeff();
    if (slack < best_slack) {
      best_slack = slack;
      best = k;
    }
  }
  return best;
}

ClosedLoopResult closed_loop(const PwaModel& model, const StageCost& cost, const Vec& s0, int T_cl,
                             int N_pred, const Controller& controller,
                             const RealizedDisturbance& realized) {
  model.validate();
  cost.validate(model.n_s, model.n_u);
  require(T_cl >= 1 && N_pred >= 1, "closed_loop: need T_cl >= 1 and N_pred >= 1");
  require(s0.size() == model.n_s, "closed_loop: initial state dimension mismatch");
  const int nu = model.n_u;

  ClosedLoopResult r;
  r.states.resize(T_cl + 1, model.n_s);
  r.inputs.resize(T_cl, nu);
  r.stage_cost.resize(T_cl);
  r.held.assign(T_cl, 0);
  r.critical_block.assign(T_cl, -1);
  r.status.assign(T_cl, "");
  r.partition_ms.assign(T_cl, 0.0);
  r.solve_ms.assign(T_cl, 0.0);
  r.states.row(0) = s0.transpose();

  Vec s = s0;
  Vec u_prev = Vec::Zero(nu);
  int block = -1;
  for (int t = 0; t < T_cl; ++t) {
    r.critical_block[t] = block;
    ControlStep step = controller(t, s, block);
    r.status[t] = step.status;
    r.partition_ms[t] = step.partition_ms;
    r.solve_ms[t] = step.solve_ms;
    r.nodes += step.nodes;
    Vec u = u_prev;
    if (step.ok && step.u_stack.size() == N_pred * nu) {
      u = step.u_stack.head(nu);
      // eta_{t+kbar} is block kbar - 1 of the next step's stack.
      const int kbar = critical_step(model, s, step.u_stack, step.theta_nominal);
      block = std::min(std::max(kbar - 1, 0), N_pred - 1);
    } else {
      r.held[t] = 1;
    }
    const Vec eta = realized(t);
    s = simulate_step(model, s, u, eta);
    r.states.row(t + 1) = s.transpose();
    r.inputs.row(t) = u.transpose();
    r.stage_cost[t] = (cost.Q * s).lpNorm<1>() + (cost.R * u).lpNorm<1>();
    u_prev = u;
  }
  return r;
}

}  // namespace ccpart::pwa
