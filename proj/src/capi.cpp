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

#include "ccpart/ccpart.h"

#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "ccpart/certify.hpp"
#include "ccpart/error.hpp"
#include "ccpart/harness/config.hpp"
#include "ccpart/harness/experiments.hpp"
#include "json.hpp"

struct ccpart_config {
  nlohmann::json doc;
  ccpart::harness::ExperimentConfig cfg;
};

struct ccpart_result {
  ccpart::harness::RunOutput out;
  std::string csv;
  std::vector<std::string> sidecar_csv;
};

namespace {

thread_local std::string g_last_error;

int record(int code, const std::string& what) {
  g_last_error = what;
  return code;
}

// Runs f, mapping exceptions to status codes.
template <typename F>
int guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const ccpart::Error& e) {
    return record(static_cast<int>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return record(CCPART_CONFIG_ERROR, std::string("config: ") + e.what());
  } catch (const std::bad_alloc&) {
    return record(CCPART_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return record(CCPART_INTERNAL_ERROR, e.what());
  }
}

int load(const std::string& text, ccpart_config** out) {
  if (!out) return record(CCPART_INVALID_ARGUMENT, "null output handle");
  *out = nullptr;
  auto c = std::make_unique<ccpart_config>();
  try {
    c->doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    return record(CCPART_PARSE_ERROR, std::string("config: ") + e.what());
  }
  c->cfg = ccpart::harness::parse_config(text);
  *out = c.release();
  return CCPART_OK;
}

}  // namespace

extern "C" {

const char* ccpart_version(void) { return "1.0.0"; }

const char* ccpart_status_name(int status) {
  if (status == CCPART_INTERNAL_ERROR) return "InternalError";
  if (status < 0 || status > CCPART_PARSE_ERROR) return "Unknown";
  return ccpart::to_string(static_cast<ccpart::ErrorCode>(status));
}

const char* ccpart_last_error(void) { return g_last_error.c_str(); }

int ccpart_config_from_string(const char* json, ccpart_config** out) {
  return guarded([&] {
    if (!json) return record(CCPART_INVALID_ARGUMENT, "null config text");
    return load(json, out);
  });
}

int ccpart_config_from_file(const char* path, ccpart_config** out) {
  return guarded([&] {
    if (!path) return record(CCPART_INVALID_ARGUMENT, "null path");
    std::ifstream f(path, std::ios::binary);
    if (!f) return record(CCPART_IO_ERROR, std::string("cannot open config '") + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return load(ss.str(), out);
  });
}

void ccpart_config_free(ccpart_config* config) { delete config; }

int ccpart_config_set(ccpart_config* config, const char* pointer, const char* json_value) {
  return guarded([&] {
    if (!config || !pointer || !json_value) return record(CCPART_INVALID_ARGUMENT, "null argument");
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(json_value);
    } catch (const nlohmann::json::parse_error& e) {
      return record(CCPART_PARSE_ERROR, std::string("override value: ") + e.what());
    }
    nlohmann::json doc = config->doc;
    doc[nlohmann::json::json_pointer(pointer)] = value;
    config->cfg = ccpart::harness::parse_config(doc.dump());
    config->doc = std::move(doc);
    return static_cast<int>(CCPART_OK);
  });
}

size_t ccpart_config_warning_count(const ccpart_config* config) {
  return config ? config->cfg.warnings.size() : 0;
}

const char* ccpart_config_warning(const ccpart_config* config, size_t i) {
  if (!config || i >= config->cfg.warnings.size()) return "";
  return config->cfg.warnings[i].c_str();
}

const char* ccpart_default_config(void) {
  static const std::string text = ccpart::harness::default_config_json();
  return text.c_str();
}

int ccpart_run(const ccpart_config* config, const char* experiment, ccpart_result** out) {
  return guarded([&] {
    if (!config || !experiment || !out) return record(CCPART_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    auto r = std::make_unique<ccpart_result>();
    r->out = ccpart::harness::run_experiment(config->cfg, experiment);
    r->csv = ccpart::harness::to_csv(r->out.table);
    for (const auto& s : r->out.sidecars) r->sidecar_csv.push_back(ccpart::harness::to_csv(s.second));
    const bool fatal = r->out.fatal;
    const std::string message = r->out.message;
    *out = r.release();
    if (fatal) return record(CCPART_SOLVER_INFEASIBLE, message);
    return static_cast<int>(CCPART_OK);
  });
}

void ccpart_result_free(ccpart_result* result) { delete result; }

const char* ccpart_result_csv(const ccpart_result* result) { return result ? result->csv.c_str() : ""; }

size_t ccpart_result_sidecar_count(const ccpart_result* result) {
  return result ? result->sidecar_csv.size() : 0;
}

const char* ccpart_result_sidecar_suffix(const ccpart_result* result, size_t i) {
  if (!result || i >= result->sidecar_csv.size()) return "";
  return result->out.sidecars[i].first.c_str();
}

const char* ccpart_result_sidecar_csv(const ccpart_result* result, size_t i) {
  if (!result || i >= result->sidecar_csv.size()) return "";
  return result->sidecar_csv[i].c_str();
}

int ccpart_result_failures(const ccpart_result* result) { return result ? result->out.failures : 0; }

int ccpart_result_write(const ccpart_result* result, const char* path, int plot_data) {
  return guarded([&] {
    if (!result || !path) return record(CCPART_INVALID_ARGUMENT, "null argument");
    ccpart::harness::write_output(result->out, path,
                                  plot_data ? ccpart::harness::Format::kPlotData
                                            : ccpart::harness::Format::kCsv);
    return static_cast<int>(CCPART_OK);
  });
}

int ccpart_required_samples(int K, double delta, double beta, long* out) {
  return guarded([&] {
    if (!out) return record(CCPART_INVALID_ARGUMENT, "null output");
    *out = ccpart::certify::required_samples(K, delta, beta);
    return static_cast<int>(CCPART_OK);
  });
}

int ccpart_subset_discrepancy(const double* p_true, const double* p_hat, size_t K, double* out) {
  return guarded([&] {
    if (!p_true || !p_hat || !out || K == 0) return record(CCPART_INVALID_ARGUMENT, "bad argument");
    const Eigen::Index n = static_cast<Eigen::Index>(K);
    *out = ccpart::certify::subset_discrepancy(Eigen::Map<const ccpart::geometry::Vec>(p_true, n),
                                               Eigen::Map<const ccpart::geometry::Vec>(p_hat, n));
    return static_cast<int>(CCPART_OK);
  });
}

}  // extern "C"
