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

#include <string>

#include "ccpart/milp.hpp"

namespace ccpart::solver {

// Environment variable holding the external engine command template.
inline constexpr const char* kEngineEnvVar = "CCPART_MILP_ENGINE";

// The command is a shell template; {model} and {solution} are replaced by
// quoted file paths, {gap} and {time_limit} by the numeric settings.
// The engine writes a solution file:
//   status <Optimal|Infeasible|Unbounded|TimeLimit|GapLimit|Error>
//   objective <value>
//   <variable name> <value>      (one line per variable)
struct ExternalEngine {
  std::string command;
  double gap_tol = 1e-6;
  double time_limit = 0.0;
  bool keep_files = false;
};

// Command template from CCPART_MILP_ENGINE, empty when unset.
std::string engine_from_environment();

// Throws Error(kEngineUnavailable) when the engine cannot be run or returns
// an unreadable answer. A returned solution is re-checked against the model.
MilpSolution solve_external(const MilpModel& model, const ExternalEngine& engine);

// Uses the external engine when a command is configured, otherwise (or when
// the engine is unavailable) the built-in solver; the fallback is recorded in
// MilpSolution::message.
MilpSolution solve_with_fallback(const MilpModel& model, const MilpOptions& options,
                                 const ExternalEngine* engine);

// Parses the solution-file format above against the model's variable names.
MilpSolution read_solution(const MilpModel& model, std::istream& in);

}  // namespace ccpart::solver
