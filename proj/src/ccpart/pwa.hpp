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

#include "ccpart/geometry.hpp"
#include "ccpart/problems.hpp"

namespace ccpart::pwa {

using geometry::Box;
using geometry::Mat;
using geometry::Polytope;
using geometry::Vec;

// s+ = A s + B u + v + C eta.
struct Mode {
  Mat A, B, C;
  Vec v;
};

struct PwaModel {
  int n_s = 0, n_u = 0, n_eta = 0;
  std::vector<Mode> modes;
  // Region l over the stacked vector (s, u, eta).
  std::vector<Polytope> regions;
  Polytope state_set;  // over s
  Polytope input_set;  // over u

  int m() const { return static_cast<int>(modes.size()); }
  void validate() const;
  // True when region interiors are pairwise disjoint (LP per pair).
  bool regions_disjoint(double margin = 1e-9) const;
};

// Three-mode system with regions split on s_1 at -1 and 1, |s_3| <= 0.7 and
// |u| <= 0.7.
PwaModel benchmark_model();
Vec benchmark_initial_state();

struct StageCost {
  Mat Q, R;  // nonnegative; l(s,u) = ||Q s||_1 + ||R u||_1
  void validate(int n_s, int n_u) const;
};
StageCost benchmark_cost();

using Sequence = std::vector<int>;

// All m^N mode sequences in lexicographic order.
std::vector<Sequence> enumerate_sequences(int m, int N, std::size_t cap = 100000);
std::string sequence_label(const Sequence& seq);

// Stacked prediction s = F s_t + G u + Gamma eta + v over blocks k = 0..N.
struct Prediction {
  Mat F, G, Gamma;
  Vec v;
};

Prediction prediction_matrices(const PwaModel& model, const Sequence& seq);

struct PredictionModel {
  int N = 0;
  std::vector<Sequence> sequences;
  std::vector<Prediction> stacks;
};

PredictionModel build_prediction_model(const PwaModel& model, int N, std::size_t cap = 100000);

// Condensed OCP at s_t: x = stacked inputs, theta = stacked disturbances, one
// branch per mode sequence (region rows for steps 0..N-1 as selector rows,
// state rows for steps 1..N), input rows as decision rows, stage costs split
// into a per-branch state term and a shared input term. Region rows that do
// not depend on (x, theta) are evaluated: satisfied ones are dropped, a
// violated one removes the branch.
problems::ConstraintSystem compile_ocp(const PwaModel& model, const PredictionModel& prediction,
                                       const StageCost& cost, const Vec& s_t);

struct Lipschitz {
  double L_eta = 0.0;
  double L_u = 0.0;
};

// ||Q||_1 max_h ||Gamma_h||_1 and (||Q||_1 max_h ||G_h||_1 + ||R||_1) sqrt(N n_u),
// with induced 1-norms (max absolute column sum).
Lipschitz lipschitz_constants(const PredictionModel& prediction, const StageCost& cost, int n_u);
double induced_one_norm(const Mat& M);

// Lowest-index region containing (s, u, eta). Throws Error(kNoActiveRegion).
int active_mode(const PwaModel& model, const Vec& s, const Vec& u, const Vec& eta);
Vec simulate_step(const PwaModel& model, const Vec& s, const Vec& u, const Vec& eta,
                  int* mode = nullptr);
// States s_0..s_N (as a stacked vector) from step-by-step simulation.
Vec simulate_stack(const PwaModel& model, const Vec& s0, const Vec& u_stack, const Vec& eta_stack,
                   Sequence* modes = nullptr);

// sum_{k=1..N} ||Q s_k||_1 + ||R u_{k-1}||_1 along the simulated trajectory.
double rollout_cost(const PwaModel& model, const StageCost& cost, const Vec& s0, const Vec& u_stack,
                    const Vec& eta_stack);

// Box bounding the uncertainty stack from per-step eta boxes.
Box stacked_box(const Box& per_step, int N);

}  // namespace ccpart::pwa
