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

#include "ccpart/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccpart/error.hpp"

namespace ccpart::certify {

void RiskSpec::validate() const {
  require(delta > 0.0 && delta <= epsilon && epsilon < 1.0,
          "RiskSpec: need 0 < delta <= epsilon < 1");
  require(beta > 0.0 && beta <= 1.0, "RiskSpec: need 0 < beta <= 1");
}

void BoundContext::validate() const {
  require(L_theta > 0 && L_x > 0 && D > 0 && R > 0 && n >= 1 && r > 0,
          "BoundContext: constants must be positive");
  require(r <= R, "BoundContext: r must not exceed R");
  require(q >= 1.0, "BoundContext: q must be >= 1");
}

long required_samples(int K, double delta, double beta) {
  require(K >= 1, "required_samples: K must be positive");
  require(delta > 0.0 && delta <= 1.0, "required_samples: delta must lie in (0,1]");
  require(beta > 0.0 && beta <= 1.0, "required_samples: beta must lie in (0,1]");
  const double v = (K * std::log(2.0) + std::log(1.0 / beta)) / (2.0 * delta * delta);
  return std::max(1L, static_cast<long>(std::ceil(v)));
}

namespace {

void check_probability(const Vec& p, const char* what) {
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (!(p[i] >= 0.0) || !std::isfinite(p[i]))
      fail(ErrorCode::kNotAProbabilityVector, std::string(what) + ": negative or non-finite entry");
  if (std::abs(p.sum() - 1.0) > 1e-12)
    fail(ErrorCode::kNotAProbabilityVector, std::string(what) + ": entries do not sum to 1");
}

}  // namespace

double subset_discrepancy(const Vec& p_true, const Vec& p_hat) {
  require(p_true.size() == p_hat.size(), "subset_discrepancy: length mismatch");
  check_probability(p_true, "subset_discrepancy");
  check_probability(p_hat, "subset_discrepancy");
  return 0.5 * (p_true - p_hat).lpNorm<1>();
}

Constants concentration_constants(const BoundContext& ctx, long N, double beta) {
  ctx.validate();
  require(N >= 1, "concentration_constants: N must be positive");
  require(beta > 0.0 && beta <= 1.0, "concentration_constants: beta must lie in (0,1]");
  Constants c;
  const double log_term = std::log(1.0 / beta) + ctx.n * std::log(3.0 * ctx.R / ctx.r);
  c.c1 = std::sqrt(ctx.L_theta * ctx.L_theta * ctx.D * ctx.D / (2.0 * N) * log_term);
  c.c2 = 2.0 * ctx.L_x * ctx.r;
  return c;
}

double optimize_r(const BoundContext& ctx, long N, double beta) {
  BoundContext c = ctx;
  auto total = [&](double r) {
    c.r = r;
    const auto k = concentration_constants(c, N, beta);
    return k.c1 + k.c2;
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 1e-12 * ctx.R, b = ctx.R;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = total(x1), f2 = total(x2);
  while (b - a > 1e-6 * ctx.R) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = total(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = total(x2);
    }
  }
  const double r = 0.5 * (a + b);
  // The objective is convex in r; the endpoint R can still win on a flat tail.
  return total(ctx.R) <= total(r) ? ctx.R : r;
}

double partition_roughness(const partition::Partition& partition,
                           const partition::SampleSet& samples, double L_theta, double q) {
  require(L_theta >= 0.0, "partition_roughness: L_theta must be nonnegative");
  require(partition.num_samples == samples.size(), "partition_roughness: sample count mismatch");
  double s = 0.0;
  for (const auto& cell : partition.cells) {
    for (Eigen::Index i : cell.members) {
      const Vec d = cell.representative - samples.samples.row(i).transpose();
      double norm;
      if (std::isinf(q)) norm = d.lpNorm<Eigen::Infinity>();
      else if (q == 1.0) norm = d.lpNorm<1>();
      else if (q == 2.0) norm = d.norm();
      else norm = std::pow(d.array().abs().pow(q).sum(), 1.0 / q);
      s += norm;
    }
  }
  return L_theta * s / static_cast<double>(samples.size());
}

PerformanceInterval performance_interval(double J_pp, double J_rp, double c1, double c2, double c3,
                                         double beta, double tol) {
  require(c1 >= 0 && c2 >= 0 && c3 >= 0, "performance_interval: constants must be nonnegative");
  if (J_rp > J_pp + tol * std::max(1.0, std::abs(J_pp)))
    fail(ErrorCode::kOrderingViolated, "relaxed optimum exceeds tightened optimum");
  PerformanceInterval pi;
  const double c = c1 + c2 + c3;
  pi.lower = J_rp - c;
  pi.upper = J_pp + c;
  pi.c1 = c1;
  pi.c2 = c2;
  pi.c3 = c3;
  pi.confidence = 1.0 - 3.0 * beta;
  return pi;
}

double delta_continuity_interval(const Vec& masses, double epsilon) {
  const Eigen::Index K = masses.size();
  require(K >= 1, "delta_continuity_interval: empty mass vector");
  if (K > 24) fail(ErrorCode::kCombinatorialBlowup, "delta_continuity_interval: K above 24");
  const std::uint32_t full = (1u << K) - 1u;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t s = 0; s < full; ++s) {  // proper subsets only
    double sum = 0.0;
    for (Eigen::Index j = 0; j < K; ++j)
      if (s & (1u << j)) sum += masses[j];
    const double gap = std::abs(epsilon - sum);
    if (gap <= 1e-12) fail(ErrorCode::kDegenerateEpsilon, "epsilon equals a proper subset mass");
    best = std::min(best, gap);
  }
  return best;
}

double analytic_gap(const std::vector<std::vector<Vec>>& tau,
                    const std::vector<std::vector<Vec>>& gamma, const std::vector<Mat>& C,
                    double L_x) {
  require(tau.size() == gamma.size(), "analytic_gap: tau/gamma size mismatch");
  require(L_x >= 0.0, "analytic_gap: L_x must be nonnegative");
  std::vector<double> sigma(C.size());
  for (std::size_t h = 0; h < C.size(); ++h) sigma[h] = geometry::sigma_constant(C[h]);
  double worst = 0.0;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    require(tau[j].size() == C.size() && gamma[j].size() == C.size(),
            "analytic_gap: one matrix per branch expected");
    for (std::size_t h = 0; h < C.size(); ++h)
      worst = std::max(worst, (tau[j][h] + gamma[j][h]).norm() / sigma[h]);
  }
  return L_x * worst;
}

double monte_carlo_violation(const Vec& x, const problems::ConstraintSystem& system,
                             const Sampler& sampler, long M, std::uint64_t seed,
                             std::uint32_t repetition) {
  require(M >= 1, "monte_carlo_violation: M must be positive");
  long violated = 0;
  Vec theta(system.n_theta);
  for (long i = 0; i < M; ++i) {
    Rng rng(seed, make_stream(StreamTag::kValidation, repetition, static_cast<std::uint32_t>(i)));
    sampler(rng, theta);
    if (!system.satisfied(x, theta)) ++violated;
  }
  return static_cast<double>(violated) / static_cast<double>(M);
}

}  // namespace ccpart::certify
