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

#include "ccpart/external.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <unistd.h>

#include "ccpart/error.hpp"
#include "ccpart/lp_format.hpp"

namespace ccpart::solver {

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

MilpStatus parse_status(const std::string& s) {
  if (s == "Optimal") return MilpStatus::kOptimal;
  if (s == "Infeasible") return MilpStatus::kInfeasible;
  if (s == "Unbounded") return MilpStatus::kUnbounded;
  if (s == "TimeLimit") return MilpStatus::kTimeLimit;
  if (s == "GapLimit") return MilpStatus::kGapLimit;
  return MilpStatus::kError;
}

}  // namespace

std::string engine_from_environment() {
  const char* v = std::getenv(kEngineEnvVar);
  return v ? std::string(v) : std::string();
}

MilpSolution read_solution(const MilpModel& model, std::istream& in) {
  MilpSolution sol;
  sol.engine = "external";
  std::unordered_map<std::string, int> index;
  for (int j = 0; j < model.num_vars(); ++j) index[model.names()[j]] = j;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(model.num_vars(), std::nan(""));
  std::string key;
  bool have_status = false;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    if (!(ls >> key)) continue;
    if (key == "status") {
      std::string s;
      ls >> s;
      sol.status = parse_status(s);
      have_status = true;
    } else if (key == "objective") {
      ls >> sol.objective;
    } else if (key == "bound") {
      ls >> sol.bound;
    } else if (key == "nodes") {
      ls >> sol.node_count;
    } else {
      auto it = index.find(key);
      if (it == index.end())
        fail(ErrorCode::kEngineUnavailable, "external solution names unknown variable " + key);
      double v;
      if (!(ls >> v)) fail(ErrorCode::kEngineUnavailable, "bad value for " + key);
      x[it->second] = v;
    }
  }
  if (!have_status) fail(ErrorCode::kEngineUnavailable, "external solution has no status line");
  const bool has_point = sol.status == MilpStatus::kOptimal || sol.status == MilpStatus::kGapLimit ||
                         sol.status == MilpStatus::kTimeLimit;
  if (!has_point) return sol;
  for (int j = 0; j < model.num_vars(); ++j) {
    if (std::isnan(x[j]))
      fail(ErrorCode::kEngineUnavailable, "external solution misses " + model.names()[j]);
    if (model.is_binary(j)) x[j] = std::round(x[j]);
  }
  sol.x = x;
  for (int j = 0; j < model.num_vars(); ++j)
    if (model.is_binary(j)) sol.binaries.push_back(static_cast<int>(x[j]));
  sol.objective = model.evaluate(x);
  sol.incumbent_history.push_back(sol.objective);
  if (!std::isfinite(sol.bound)) sol.bound = sol.objective;
  sol.gap = std::max(0.0, (sol.objective - sol.bound) / std::max(1.0, std::abs(sol.objective)));
  return sol;
}

MilpSolution solve_external(const MilpModel& model, const ExternalEngine& engine) {
  if (engine.command.empty()) fail(ErrorCode::kEngineUnavailable, "no external engine configured");
  static std::atomic<long> counter{0};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const std::string stem =
      "ccpart_" + std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1));
  const fs::path model_path = dir / (stem + ".lp");
  const fs::path sol_path = dir / (stem + ".sol");
  write_lp_file(model, model_path.string());
  std::error_code ec;
  fs::remove(sol_path, ec);

  std::string cmd = engine.command;
  replace_all(cmd, "{model}", shell_quote(model_path.string()));
  replace_all(cmd, "{solution}", shell_quote(sol_path.string()));
  replace_all(cmd, "{gap}", fmt(engine.gap_tol));
  replace_all(cmd, "{time_limit}", fmt(engine.time_limit));
  const int rc = std::system(cmd.c_str());
  auto cleanup = [&] {
    if (engine.keep_files) return;
    fs::remove(model_path, ec);
    fs::remove(sol_path, ec);
  };
  if (rc != 0) {
    cleanup();
    fail(ErrorCode::kEngineUnavailable, "external engine exited with status " + std::to_string(rc));
  }
  std::ifstream in(sol_path);
  if (!in) {
    cleanup();
    fail(ErrorCode::kEngineUnavailable, "external engine wrote no solution file");
  }
  MilpSolution sol;
  try {
    sol = read_solution(model, in);
  } catch (...) {
    cleanup();
    throw;
  }
  cleanup();
  if (sol.has_solution() && model.max_violation(sol.x) > 1e-5) {
    fail(ErrorCode::kEngineUnavailable, "external solution violates the model by " +
                                            fmt(model.max_violation(sol.x)));
  }
  return sol;
}

MilpSolution solve_with_fallback(const MilpModel& model, const MilpOptions& options,
                                 const ExternalEngine* engine) {
  if (engine && !engine->command.empty()) {
    try {
      return solve_external(model, *engine);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEngineUnavailable) throw;
      MilpSolution sol = solve_milp(model, options);
      sol.message = std::string("EngineUnavailable: ") + e.what();
      return sol;
    }
  }
  return solve_milp(model, options);
}

}  // namespace ccpart::solver
