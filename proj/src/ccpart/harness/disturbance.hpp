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

#include <vector>

#include "ccpart/geometry.hpp"
#include "ccpart/partition.hpp"
#include "ccpart/rng.hpp"

namespace ccpart::harness {

using geometry::Box;
using geometry::Mat;
using geometry::Vec;

// eta_{k,i} = a_{k,i} sin(omega_i k + phi_i) + w_{k,i}, k = 0..horizon-1, with
// a_{k,i} ~ U[amp_lo_i (k+1), amp_hi_i (k+1)], w_{k,i} ~ U[-noise_i (k+1),
// noise_i (k+1)], omega_i from a Gaussian mixture and phi_i ~ U[phase_lo,
// phase_hi]. Samples are stacked step-major: (eta_0, eta_1, ...).
struct DisturbanceGenerator {
  int horizon = 3;
  std::vector<double> amp_lo{0.02, 0.04};
  std::vector<double> amp_hi{0.03, 0.06};
  std::vector<double> noise{0.03, 0.03};
  std::vector<std::vector<double>> freq_means{{0.05, 0.12, 0.3, 0.5, 0.75},
                                              {0.1, 0.24, 0.6, 1.0, 1.5}};
  std::vector<double> freq_weights{0.05, 0.1, 0.4, 0.4, 0.05};
  double freq_variance = 0.01;
  double phase_lo = -0.1, phase_hi = 0.1;
  // Per-step half-widths of the declared box: bound_i (k+1).
  std::vector<double> bound{0.06, 0.09};

  int n_eta() const { return static_cast<int>(amp_lo.size()); }
  int dim() const { return horizon * n_eta(); }
  void validate() const;
  Box domain() const;

  // One stacked draw. Returns true when a coordinate had to be clipped into
  // the declared box.
  bool draw(Rng& rng, Eigen::Ref<Vec> out) const;
};

// count draws from one stream; clipped draws are counted.
partition::SampleSet generate_disturbances(const DisturbanceGenerator& gen, long count, Rng& rng,
                                           long* clipped = nullptr);

}  // namespace ccpart::harness
