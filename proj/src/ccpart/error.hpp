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

#include <stdexcept>
#include <string>

namespace ccpart {

// Every failure the library can report. The numeric values are part of the
// C API (see include/ccpart/ccpart.h) and must not be reordered.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kInfeasible = 2,
  kUnbounded = 3,
  kIterationLimit = 4,
  kDimensionUnsupported = 5,
  kEmptySet = 6,
  kCombinatorialBlowup = 7,
  kNoInvertibleSubmatrix = 8,
  kDegenerateClustering = 9,
  kSampleOutsideDomain = 10,
  kNotAProbabilityVector = 11,
  kOrderingViolated = 12,
  kDegenerateEpsilon = 13,
  kCoverageImpossible = 14,
  kModelTooLarge = 15,
  kTimeLimit = 16,
  kEngineUnavailable = 17,
  kNoActiveRegion = 18,
  kSolverInfeasible = 19,
  kIoError = 20,
  kConfigError = 21,
  kParseError = 22,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace ccpart
