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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccpart/external.hpp"
#include "ccpart/harness/config.hpp"
#include "ccpart/harness/emit.hpp"
#include "ccpart/milp.hpp"
#include "ccpart/partition.hpp"
#include "ccpart/problems.hpp"
#include "ccpart/pwa.hpp"

namespace ccpart::harness {

// Everything derived once from a config: prediction stacks, the uncertainty
// box, Lipschitz constants, solver settings and the OCP compiled at x0.
struct Scenario {
  explicit Scenario(const ExperimentConfig& config);

  const ExperimentConfig& cfg;
  pwa::PredictionModel prediction;
  Box domain;
  pwa::Lipschitz lipschitz;
  solver::MilpOptions milp;
  std::optional<solver::ExternalEngine> engine;
  problems::ConstraintSystem system_x0;  // empty when the OCP at x0 is infeasible
  std::string x0_status;
  std::optional<partition::SampleSet> fixed_samples;  // from sampling.samples_csv

  const solver::ExternalEngine* engine_ptr() const { return engine ? &*engine : nullptr; }
  problems::ConstraintSystem compile_at(const Vec& s) const;
  certify::BoundContext bound_context() const;
};

struct PipelineRequest {
  int K = 1;
  double delta = 0.05;
  long N = 1;
  int rep = 0;
  int sub = 0;  // time step in closed loop
  pwa::Splitting strategy = pwa::Splitting::kGrid;
  int critical_block = -1;
  bool relaxed = false;
  bool scenario = false;  // every sample becomes its own fully covered cell
};

struct PipelineResult {
  long N = 0;
  long clipped = 0;
  partition::SampleSet samples;
  partition::Partition part;
  int Z = 0;
  std::string status_pp = "NotRun", status_rp = "NotRun";
  problems::SurrogateResult pp, rp;
  long nodes_pp = 0, nodes_rp = 0;
  bool pp_ok = false, rp_ok = false;
  double partition_ms = 0.0, pp_ms = 0.0, rp_ms = 0.0;
};

// sample -> partition -> PP (and RP) at state s. Errors land in the status
// strings rather than propagating.
PipelineResult run_pipeline(const Scenario& sc, const problems::ConstraintSystem& system,
                            const PipelineRequest& rq);

partition::SampleSet training_samples(const Scenario& sc, long N, int rep, int sub,
                                      long* clipped = nullptr);
partition::Regions make_regions(const Scenario& sc, pwa::Splitting strategy, int K,
                                const partition::SampleSet& samples, int critical_block, int rep,
                                int sub);

// Fraction of validation draws whose simulated trajectory from x0 under u
// leaves the state set. Draw i of repetition rep uses its own stream.
double simulated_violation(const Scenario& sc, const Vec& u, long draws, int rep);

struct RunOutput {
  Table table;
  std::vector<std::pair<std::string, Table>> sidecars;  // file suffix -> table
  std::vector<std::string> warnings;
  int failures = 0;       // repetitions whose solve did not succeed
  bool fatal = false;     // single-solve command whose solve failed
  std::string message;
};

RunOutput run_partition(const ExperimentConfig& cfg);
RunOutput run_solve(const ExperimentConfig& cfg);
RunOutput run_bounds(const ExperimentConfig& cfg);
RunOutput run_validate(const ExperimentConfig& cfg);
RunOutput run_fig2(const ExperimentConfig& cfg);
RunOutput run_table1(const ExperimentConfig& cfg);
RunOutput run_closedloop(const ExperimentConfig& cfg);

// Dispatch by subcommand name; throws Error(kConfigError) for unknown names.
RunOutput run_experiment(const ExperimentConfig& cfg, const std::string& name);
const std::vector<std::string>& experiment_names();

// Main table to path, sidecars to path + suffix.
void write_output(const RunOutput& out, const std::string& path, Format format);

}  // namespace ccpart::harness
