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

#include <iosfwd>
#include <string>

#include "ccpart/milp.hpp"

namespace ccpart::solver {

// CPLEX-style LP text. Ranged rows are written as two rows suffixed _lo/_hi,
// the objective offset as a "\offset" comment that read_lp understands.
void write_lp(const MilpModel& model, std::ostream& out);
void write_lp_file(const MilpModel& model, const std::string& path);

// Reads the subset produced by write_lp (plus Maximize, "st", free bounds and
// multi-line rows). Throws Error(kParseError) on anything else.
MilpModel read_lp(std::istream& in);
MilpModel read_lp_file(const std::string& path);

}  // namespace ccpart::solver
