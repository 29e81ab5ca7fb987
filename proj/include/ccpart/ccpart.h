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

#ifndef CCPART_CCPART_H_
#define CCPART_CCPART_H_

#include <stddef.h>

#if defined(CCPART_BUILDING_LIBRARY)
#define CCPART_API __attribute__((visibility("default")))
#else
#define CCPART_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values are stable. */
typedef enum ccpart_status {
  CCPART_OK = 0,
  CCPART_INVALID_ARGUMENT = 1,
  CCPART_INFEASIBLE = 2,
  CCPART_UNBOUNDED = 3,
  CCPART_ITERATION_LIMIT = 4,
  CCPART_DIMENSION_UNSUPPORTED = 5,
  CCPART_EMPTY_SET = 6,
  CCPART_COMBINATORIAL_BLOWUP = 7,
  CCPART_NO_INVERTIBLE_SUBMATRIX = 8,
  CCPART_DEGENERATE_CLUSTERING = 9,
  CCPART_SAMPLE_OUTSIDE_DOMAIN = 10,
  CCPART_NOT_A_PROBABILITY_VECTOR = 11,
  CCPART_ORDERING_VIOLATED = 12,
  CCPART_DEGENERATE_EPSILON = 13,
  CCPART_COVERAGE_IMPOSSIBLE = 14,
  CCPART_MODEL_TOO_LARGE = 15,
  CCPART_TIME_LIMIT = 16,
  CCPART_ENGINE_UNAVAILABLE = 17,
  CCPART_NO_ACTIVE_REGION = 18,
  CCPART_SOLVER_INFEASIBLE = 19,
  CCPART_IO_ERROR = 20,
  CCPART_CONFIG_ERROR = 21,
  CCPART_PARSE_ERROR = 22,
  CCPART_INTERNAL_ERROR = 99
} ccpart_status;

typedef struct ccpart_config ccpart_config;
typedef struct ccpart_result ccpart_result;

CCPART_API const char* ccpart_version(void);
CCPART_API const char* ccpart_status_name(int status);
/* Message of the last failing call on this thread ("" when none). */
CCPART_API const char* ccpart_last_error(void);

/* Config documents are JSON; see ccpart_default_config(). */
CCPART_API int ccpart_config_from_file(const char* path, ccpart_config** out);
CCPART_API int ccpart_config_from_string(const char* json, ccpart_config** out);
CCPART_API void ccpart_config_free(ccpart_config* config);
/* Replaces the value at an RFC 6901 pointer (e.g. "/partition/K") with a JSON
 * value and re-validates the document. */
CCPART_API int ccpart_config_set(ccpart_config* config, const char* pointer, const char* json_value);
/* Warnings raised while validating (e.g. N below the certified size). */
CCPART_API size_t ccpart_config_warning_count(const ccpart_config* config);
CCPART_API const char* ccpart_config_warning(const ccpart_config* config, size_t i);
/* Default document; the string lives until the library is unloaded. */
CCPART_API const char* ccpart_default_config(void);

/* Runs one of: partition, solve, bounds, validate, fig2, table1, closedloop.
 * A run whose single solve fails still yields a result (with the failure
 * recorded) and returns CCPART_SOLVER_INFEASIBLE. */
CCPART_API int ccpart_run(const ccpart_config* config, const char* experiment, ccpart_result** out);
CCPART_API void ccpart_result_free(ccpart_result* result);
/* Main table as CSV text. */
CCPART_API const char* ccpart_result_csv(const ccpart_result* result);
/* Sidecar tables: suffix (".timing.csv", ...) and CSV text; "" when i is out
 * of range. */
CCPART_API size_t ccpart_result_sidecar_count(const ccpart_result* result);
CCPART_API const char* ccpart_result_sidecar_suffix(const ccpart_result* result, size_t i);
CCPART_API const char* ccpart_result_sidecar_csv(const ccpart_result* result, size_t i);
/* Repetitions (or closed-loop steps) whose solve failed. */
CCPART_API int ccpart_result_failures(const ccpart_result* result);
/* Writes path, sidecars at path + suffix, and with plot_data != 0 the column
 * role file path + ".columns.json". */
CCPART_API int ccpart_result_write(const ccpart_result* result, const char* path, int plot_data);

/* Stand-alone helpers. */
CCPART_API int ccpart_required_samples(int K, double delta, double beta, long* out);
CCPART_API int ccpart_subset_discrepancy(const double* p_true, const double* p_hat, size_t K,
                                         double* out);

#ifdef __cplusplus
}
#endif

#endif /* CCPART_CCPART_H_ */
