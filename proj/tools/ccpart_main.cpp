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

// Command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 usage or output error, 2 config error,
// 3 solver failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccpart/ccpart.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

int exit_code_for(int status) {
  switch (status) {
    case CCPART_OK: return 0;
    case CCPART_CONFIG_ERROR:
    case CCPART_PARSE_ERROR:
    case CCPART_INVALID_ARGUMENT:
    case CCPART_IO_ERROR:
    case CCPART_COMBINATORIAL_BLOWUP:
      return kExitConfig;
    default: return kExitSolver;
  }
}

int report(int status, const char* what) {
  std::cerr << "ccpart: " << what << ": " << ccpart_status_name(status) << ": "
            << ccpart_last_error() << "\n";
  return exit_code_for(status);
}

struct Options {
  std::string config;
  std::string output;
  bool plot_data = false;
  std::vector<std::string> sets;
  long long seed = -1;
  int K = 0;
  int reps = 0;
  bool quiet = false;
};

int run(const std::string& experiment, const Options& o) {
  ccpart_config* cfg = nullptr;
  int st = o.config.empty() ? ccpart_config_from_string("{}", &cfg)
                            : ccpart_config_from_file(o.config.c_str(), &cfg);
  if (st != CCPART_OK) return report(st, "loading config");

  auto set = [&](const std::string& ptr, const std::string& value) {
    const int s = ccpart_config_set(cfg, ptr.c_str(), value.c_str());
    if (s != CCPART_OK) report(s, ("setting " + ptr).c_str());
    return s;
  };
  int code = 0;
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || kv.empty() || kv[0] != '/') {
      std::cerr << "ccpart: --set expects /json/pointer=value, got '" << kv << "'\n";
      ccpart_config_free(cfg);
      return kExitConfig;
    }
    if ((st = set(kv.substr(0, eq), kv.substr(eq + 1))) != CCPART_OK) code = exit_code_for(st);
  }
  if (!code && o.seed >= 0 && (st = set("/sampling/seed", std::to_string(o.seed))) != CCPART_OK)
    code = exit_code_for(st);
  if (!code && o.K > 0 && (st = set("/partition/K", std::to_string(o.K))) != CCPART_OK)
    code = exit_code_for(st);
  if (!code && o.reps > 0 && (st = set("/experiment/repetitions", std::to_string(o.reps))) != CCPART_OK)
    code = exit_code_for(st);
  if (code) {
    ccpart_config_free(cfg);
    return code;
  }
  if (!o.quiet)
    for (size_t i = 0; i < ccpart_config_warning_count(cfg); ++i)
      std::cerr << "ccpart: warning: " << ccpart_config_warning(cfg, i) << "\n";

  ccpart_result* res = nullptr;
  st = ccpart_run(cfg, experiment.c_str(), &res);
  ccpart_config_free(cfg);
  if (!res) return report(st, experiment.c_str());

  int rc = 0;
  if (st != CCPART_OK) rc = report(st, experiment.c_str());
  if (o.output.empty()) {
    std::fputs(ccpart_result_csv(res), stdout);
  } else {
    const int w = ccpart_result_write(res, o.output.c_str(), o.plot_data ? 1 : 0);
    if (w != CCPART_OK) {
      report(w, "writing output");
      rc = rc ? rc : kExitUsage;
    }
  }
  if (!o.quiet && ccpart_result_failures(res) > 0)
    std::cerr << "ccpart: " << ccpart_result_failures(res) << " solve(s) did not succeed\n";
  ccpart_result_free(res);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition-based chance-constrained optimization and PWA MPC experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ccpart_version()));

  Options o;
  std::string experiment;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"partition", "Sample, partition and list cells with masses and representatives"},
      {"solve", "Solve the tightened surrogate once at the initial state"},
      {"bounds", "Solve tightened and relaxed surrogates and report the performance interval"},
      {"validate", "Solve once and estimate the constraint violation by simulation"},
      {"fig2", "Violation statistics over an (N, K, delta) grid"},
      {"table1", "Averaged performance bounds over a (K, delta) grid"},
      {"closedloop", "Receding-horizon closed loop for each (strategy, K)"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", o.config, "JSON config file (defaults apply when omitted)");
    sub->add_option("-o,--output", o.output, "CSV path; sidecars are written next to it");
    sub->add_flag("--plot-data", o.plot_data, "Also write the column-role file");
    sub->add_option("--set", o.sets, "Override a config value: /json/pointer=value");
    sub->add_option("--seed", o.seed, "Override sampling.seed");
    sub->add_option("-K", o.K, "Override partition.K");
    sub->add_option("--reps", o.reps, "Override experiment.repetitions");
    sub->add_flag("-q,--quiet", o.quiet, "Suppress warnings");
    sub->callback([&experiment, n = std::string(name)] { experiment = n; });
  }
  app.add_subcommand("default-config", "Print the default config document")->callback([] {
    std::fputs(ccpart_default_config(), stdout);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  if (experiment.empty()) return 0;
  return run(experiment, o);
}
