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

#include <functional>
#include <string>
#include <vector>

#include "ccpart/pwa.hpp"

namespace ccpart::pwa {

enum class Splitting { kGrid, kKMeans, kAdaptive };
std::string to_string(Splitting s);
Splitting splitting_from_string(const std::string& s);

// What the controller hands back at each step.
struct ControlStep {
  bool ok = false;
  Vec u_stack;          // N_pred * n_u inputs, first block applied
  Vec theta_nominal;    // mass-weighted representative, used for the slack scan
  std::string status;
  long nodes = 0;
  double partition_ms = 0.0;
  double solve_ms = 0.0;
};

// (t, s_t, critical block or -1) -> solve. The critical block is the
// disturbance step index to refine; -1 means no preference (first step).
using Controller = std::function<ControlStep(int, const Vec&, int)>;
// Realized disturbance applied between t and t+1.
using RealizedDisturbance = std::function<Vec(int)>;

struct ClosedLoopResult {
  Mat states;               // (T_cl + 1) x n_s
  Mat inputs;               // T_cl x n_u
  Vec stage_cost;           // l_cl(t) = ||Q s_t||_1 + ||R u_{t-1}||_1, t = 1..T_cl
  std::vector<char> held;   // step reused the previous input
  std::vector<int> critical_block;
  std::vector<std::string> status;
  std::vector<double> partition_ms;
  std::vector<double> solve_ms;
  long nodes = 0;
};

// Step index k in 1..N with the smallest state-row slack along the trajectory
// simulated from s under u_stack and eta_stack; ties go to the earliest step.
int critical_step(const PwaModel& model, const Vec& s, const Vec& u_stack, const Vec& eta_stack);

ClosedLoopResult closed_loop(const PwaModel& model, const StageCost& cost, const Vec& s0, int T_cl,
                             int N_pred, const Controller& controller,
                             const RealizedDisturbance& realized);

}  // namespace ccpart::pwa
