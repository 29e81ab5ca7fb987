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

#include "ccpart/harness/disturbance.hpp"

#include <cmath>
#include <algorithm>

#include "ccpart/error.hpp"

namespace ccpart::harness {

void DisturbanceGenerator::validate() const {
  const std::size_t m = amp_lo.size();
  require(horizon >= 1, "disturbance: horizon must be positive");
  require(amp_hi.size() == m && noise.size() == m && freq_means.size() == m && bound.size() == m,
          "disturbance: per-component parameter lists must share one length");
  require(!freq_weights.empty(), "disturbance: mixture weights are empty");
  for (std::size_t i = 0; i < m; ++i) {
    require(amp_lo[i] <= amp_hi[i], "disturbance: amplitude range is reversed");
    require(noise[i] >= 0.0 && bound[i] >= 0.0, "disturbance: noise and bound must be nonnegative");
    require(freq_means[i].size() == freq_weights.size(),
            "disturbance: one mixture weight per frequency mean");
  }
  double w = 0.0;
  for (double x : freq_weights) {
    require(x >= 0.0, "disturbance: mixture weights must be nonnegative");
    w += x;
  }
  require(std::abs(w - 1.0) <= 1e-9, "disturbance: mixture weights must sum to 1");
  require(freq_variance >= 0.0 && phase_lo <= phase_hi, "disturbance: bad frequency or phase range");
}

Box DisturbanceGenerator::domain() const {
  const int m = n_eta();
  Vec hi(dim());
  for (int k = 0; k < horizon; ++k)
    for (int i = 0; i < m; ++i) hi[k * m + i] = bound[i] * (k + 1);
  return Box(-hi, hi);
}

bool DisturbanceGenerator::draw(Rng& rng, Eigen::Ref<Vec> out) const {
  const int m = n_eta();
  const double sd = std::sqrt(freq_variance);
  std::vector<double> omega(m), phi(m);
  for (int i = 0; i < m; ++i) {
    const double u = rng.uniform();
    std::size_t c = 0;
    double acc = freq_weights[0];
    while (u >= acc && c + 1 < freq_weights.size()) acc += freq_weights[++c];
    omega[i] = freq_means[i][c] + sd * rng.normal();
    phi[i] = rng.uniform(phase_lo, phase_hi);
  }
  bool clipped = false;
  for (int k = 0; k < horizon; ++k) {
    const double scale = k + 1.0;
    for (int i = 0; i < m; ++i) {
      const double a = rng.uniform(amp_lo[i] * scale, amp_hi[i] * scale);
      const double w = rng.uniform(-noise[i] * scale, noise[i] * scale);
      double v = a * std::sin(omega[i] * k + phi[i]) + w;
      const double lim = bound[i] * scale;
      if (v > lim || v < -lim) {
        v = std::clamp(v, -lim, lim);
        clipped = true;
      }
      out[k * m + i] = v;
    }
  }
  return clipped;
}

partition::SampleSet generate_disturbances(const DisturbanceGenerator& gen, long count, Rng& rng,
                                           long* clipped) {
  gen.validate();
  require(count >= 1, "generate_disturbances: count must be positive");
  partition::SampleSet s;
  s.seed = rng.seed();
  s.samples.resize(count, gen.dim());
  Vec row(gen.dim());
  long c = 0;
  for (long i = 0; i < count; ++i) {
    if (gen.draw(rng, row)) ++c;
    s.samples.row(i) = row.transpose();
  }
  if (clipped) *clipped = c;
  return s;
}

}  // namespace ccpart::harness
