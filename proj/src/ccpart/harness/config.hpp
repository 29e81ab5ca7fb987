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
#include <string>
#include <vector>

#include "ccpart/certify.hpp"
#include "ccpart/closed_loop.hpp"
#include "ccpart/harness/disturbance.hpp"
#include "ccpart/harness/emit.hpp"
#include "ccpart/problems.hpp"
#include "ccpart/pwa.hpp"

namespace ccpart::harness {

struct SolverSettings {
  // "builtin", "external" (command or CCPART_MILP_ENGINE required) or "auto"
  // (external when the environment names an engine).
  std::string engine = "builtin";
  std::string command;
  double gap = 1e-6;
  double time_limit = 0.0;
  long node_limit = 0;
};

struct ExperimentConfig {
  pwa::PwaModel model;
  pwa::StageCost cost;
  Vec x0;
  int horizon = 3;

  certify::RiskSpec risk{0.15, 0.05, 1e-4};
  pwa::Splitting strategy = pwa::Splitting::kGrid;
  int K = 8;
  problems::Selection selection = problems::Selection::kOptimal;
  double margin = problems::kDefaultMargin;

  long N = 0;  // 0: required_samples(K, delta, beta)
  std::uint64_t seed = 1;
  std::string samples_csv;

  DisturbanceGenerator disturbance;
  SolverSettings solver;

  int repetitions = 20;
  long validation_draws = 10000;
  std::vector<long> N_grid;
  std::vector<int> K_grid;
  std::vector<double> delta_grid;
  int T_cl = 80;
  std::vector<pwa::Splitting> strategies{pwa::Splitting::kAdaptive, pwa::Splitting::kKMeans};
  bool scenario_baseline = false;
  long scenario_max_N = 500;

  std::string output;
  Format format = Format::kCsv;

  std::vector<std::string> warnings;

  // Explicit N, or the certified sample size for (K, delta, beta).
  long sample_size(int K, double delta) const;
};

// Throws Error(kConfigError) on schema or value errors, kParseError on bad
// JSON text, kIoError on unreadable files.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Fully populated default document; also serves as schema reference.
std::string default_config_json();

}  // namespace ccpart::harness
