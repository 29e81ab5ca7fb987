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

#include <cstdint>
#include <functional>
#include <vector>

#include "ccpart/geometry.hpp"
#include "ccpart/partition.hpp"
#include "ccpart/problems.hpp"
#include "ccpart/rng.hpp"

namespace ccpart::certify {

using geometry::Mat;
using geometry::Vec;

struct RiskSpec {
  double epsilon = 0.1;
  double delta = 0.05;
  double beta = 1e-4;

  // 0 < delta <= epsilon < 1, 0 < beta <= 1.
  void validate() const;
};

struct BoundContext {
  double L_theta = 1.0;
  double L_x = 1.0;
  double q = 1.0;  // norm index of L_theta and D
  double D = 1.0;  // diameter of the uncertainty superset
  double R = 1.0;  // 2-norm diameter of the decision set
  int n = 1;       // decision dimension
  double r = 1.0;  // covering radius in (0, R]

  void validate() const;
};

struct PerformanceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double confidence = 0.0;
};

// Smallest N with N >= (K ln 2 + ln(1/beta)) / (2 delta^2).
long required_samples(int K, double delta, double beta);

// max over subsets J of |sum_{j in J} (p_j - p_hat_j)| = half the L1 distance.
double subset_discrepancy(const Vec& p_true, const Vec& p_hat);

struct Constants {
  double c1 = 0.0;
  double c2 = 0.0;
};

Constants concentration_constants(const BoundContext& ctx, long N, double beta);
// r in (0, R] minimizing c1 + c2 by golden-section search (tolerance 1e-6 R).
double optimize_r(const BoundContext& ctx, long N, double beta);

// (1/N) sum_j sum_{i in cell j} L_theta ||rep_j - theta_i||_q.
double partition_roughness(const partition::Partition& partition,
                           const partition::SampleSet& samples, double L_theta, double q);

// [J_rp - c, J_pp + c] with c = c1 + c2 + c3 and confidence 1 - 3 beta.
// Throws Error(kOrderingViolated) when J_rp exceeds J_pp beyond tol.
PerformanceInterval performance_interval(double J_pp, double J_rp, double c1, double c2,
                                         double c3, double beta, double tol = 1e-6);

// Upper end of (0, min over proper subsets J of |eps - sum_J p_j|).
double delta_continuity_interval(const Vec& masses, double epsilon);

// L_x * max_{j,h} ||tau_jh + gamma_jh||_2 / sigma(C_h). sigma values are
// computed by geometry::sigma_constant.
double analytic_gap(const std::vector<std::vector<Vec>>& tau,
                    const std::vector<std::vector<Vec>>& gamma, const std::vector<Mat>& C,
                    double L_x);

// Writes one fresh draw into the output vector.
using Sampler = std::function<void(Rng&, Eigen::Ref<Vec>)>;

// Fraction of M draws with no branch satisfied at x. Draw i uses its own
// counter-based stream, so the estimate does not depend on sharding.
double monte_carlo_violation(const Vec& x, const problems::ConstraintSystem& system,
                             const Sampler& sampler, long M, std::uint64_t seed,
                             std::uint32_t repetition = 0);

}  // namespace ccpart::certify
