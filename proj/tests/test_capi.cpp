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

#include <cstring>
#include <string>

#include "ccpart/ccpart.h"
#include "doctest.h"

namespace {

const char* kSmall = R"({"horizon": 2, "partition": {"K": 4},
  "experiment": {"repetitions": 2, "validation_draws": 300}})";

struct Config {
  ccpart_config* c = nullptr;
  ~Config() { ccpart_config_free(c); }
};

struct Result {
  ccpart_result* r = nullptr;
  ~Result() { ccpart_result_free(r); }
};

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(ccpart_status_name(CCPART_OK)) == "Ok");
  CHECK(std::string(ccpart_status_name(CCPART_CONFIG_ERROR)) == "ConfigError");
  CHECK(std::strlen(ccpart_version()) > 0);
  CHECK(std::string(ccpart_status_name(12345)).size() > 0);
}

TEST_CASE("stand-alone helpers") {
  long n = 0;
  CHECK(ccpart_required_samples(20, 0.05, 1e-4, &n) == CCPART_OK);
  CHECK(n == 4615);
  CHECK(ccpart_required_samples(20, 0.0, 1e-4, &n) == CCPART_INVALID_ARGUMENT);
  CHECK(std::string(ccpart_last_error()).size() > 0);
  const double p[] = {0.2, 0.3, 0.5}, q[] = {0.3, 0.3, 0.4}, bad[] = {0.5, 0.5, 0.5};
  double d = 0;
  CHECK(ccpart_subset_discrepancy(p, q, 3, &d) == CCPART_OK);
  CHECK(d == doctest::Approx(0.1));
  CHECK(ccpart_subset_discrepancy(p, bad, 3, &d) == CCPART_NOT_A_PROBABILITY_VECTOR);
  CHECK(ccpart_subset_discrepancy(nullptr, q, 3, &d) == CCPART_INVALID_ARGUMENT);
}

TEST_CASE("config handles") {
  Config c;
  CHECK(ccpart_config_from_string("{", &c.c) == CCPART_PARSE_ERROR);
  CHECK(c.c == nullptr);
  CHECK(ccpart_config_from_string(R"({"bogus": 1})", &c.c) == CCPART_CONFIG_ERROR);
  CHECK(ccpart_config_from_file("/nonexistent.json", &c.c) == CCPART_IO_ERROR);
  REQUIRE(ccpart_config_from_string(ccpart_default_config(), &c.c) == CCPART_OK);
  CHECK(ccpart_config_warning_count(c.c) == 0);
  CHECK(ccpart_config_set(c.c, "/sampling/N", "50") == CCPART_OK);
  CHECK(ccpart_config_warning_count(c.c) == 1);
  CHECK(std::string(ccpart_config_warning(c.c, 0)).size() > 0);
  CHECK(ccpart_config_set(c.c, "/partition/K", "-3") == CCPART_CONFIG_ERROR);
  CHECK(ccpart_config_set(c.c, "/partition/K", "4 x") == CCPART_PARSE_ERROR);
  CHECK(ccpart_config_set(c.c, "no-slash", "4") == CCPART_CONFIG_ERROR);
  CHECK(ccpart_config_set(nullptr, "/partition/K", "4") == CCPART_INVALID_ARGUMENT);
}

TEST_CASE("runs produce CSV and sidecars") {
  Config c;
  REQUIRE(ccpart_config_from_string(kSmall, &c.c) == CCPART_OK);
  Result a, b;
  CHECK(ccpart_run(c.c, "nonsense", &a.r) == CCPART_CONFIG_ERROR);
  REQUIRE(ccpart_run(c.c, "fig2", &a.r) == CCPART_OK);
  REQUIRE(ccpart_run(c.c, "fig2", &b.r) == CCPART_OK);
  const std::string csv = ccpart_result_csv(a.r);
  CHECK(csv == ccpart_result_csv(b.r));
  CHECK(csv.rfind("method,seed,N,K", 0) == 0);
  CHECK(ccpart_result_sidecar_count(a.r) >= 2);
  bool timing = false;
  for (size_t i = 0; i < ccpart_result_sidecar_count(a.r); ++i)
    timing = timing || std::string(ccpart_result_sidecar_suffix(a.r, i)) == ".timing.csv";
  CHECK(timing);
  CHECK(std::string(ccpart_result_sidecar_suffix(a.r, 99)).empty());
  CHECK(ccpart_result_failures(a.r) >= 0);
  CHECK(ccpart_result_write(a.r, "/nonexistent-dir/out.csv", 0) == CCPART_IO_ERROR);
}

TEST_CASE("a failing single solve still returns a result") {
  Config c;
  // A state far outside the state set cannot be steered back in one step.
  REQUIRE(ccpart_config_from_string(R"({"horizon": 1, "partition": {"K": 2},
    "system": {"preset": "benchmark", "x0": [0, 0, 50]}})", &c.c) == CCPART_OK);
  Result r;
  CHECK(ccpart_run(c.c, "solve", &r.r) == CCPART_SOLVER_INFEASIBLE);
  REQUIRE(r.r != nullptr);
  CHECK(std::string(ccpart_result_csv(r.r)).find("Infeasible") != std::string::npos);
}
