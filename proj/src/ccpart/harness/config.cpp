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

#include "ccpart/harness/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "ccpart/error.hpp"
#include "json.hpp"

namespace ccpart::harness {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::kConfigError, "config: " + what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) bad("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(where + "." + key + " has the wrong type");
  }
}

Mat matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where + " must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Mat M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad(where + " rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) bad(where + " entries must be numbers");
      M(r, c) = j[r][c].get<double>();
    }
  }
  return M;
}

Vec vector(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where + " must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad(where + " entries must be numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

std::vector<double> doubles(const json& j, const std::string& where) {
  const Vec v = vector(j, where);
  return std::vector<double>(v.data(), v.data() + v.size());
}

geometry::Polytope polytope(const json& j, const std::string& where) {
  only_keys(j, where, {"A", "b"});
  if (!j.contains("A") || !j.contains("b")) bad(where + " needs A and b");
  Mat A = matrix(j["A"], where + ".A");
  Vec b = vector(j["b"], where + ".b");
  if (A.rows() != b.size()) bad(where + ": A and b row counts differ");
  return geometry::Polytope(std::move(A), std::move(b));
}

void parse_system(const json& j, ExperimentConfig& c) {
  if (j.is_string()) {
    if (j.get<std::string>() != "benchmark") bad("unknown system preset '" + j.get<std::string>() + "'");
    return;
  }
  only_keys(j, "system", {"preset", "modes", "regions", "state_set", "input_set", "Q", "R", "x0"});
  if (j.contains("preset")) {
    if (j["preset"] != "benchmark") bad("unknown system preset");
    if (j.contains("modes") || j.contains("regions") || j.contains("state_set") ||
        j.contains("input_set"))
      bad("system: a preset cannot be combined with modes, regions or sets");
  } else {
    for (const char* k : {"modes", "regions", "state_set", "input_set", "Q", "R", "x0"})
      if (!j.contains(k)) bad(std::string("system.") + k + " is required without a preset");
    pwa::PwaModel m;
    if (!j["modes"].is_array() || j["modes"].empty()) bad("system.modes must be a non-empty array");
    for (std::size_t l = 0; l < j["modes"].size(); ++l) {
      const json& md = j["modes"][l];
      const std::string w = "system.modes[" + std::to_string(l) + "]";
      only_keys(md, w, {"A", "B", "C", "v"});
      pwa::Mode mode;
      mode.A = matrix(md.at("A"), w + ".A");
      mode.B = matrix(md.at("B"), w + ".B");
      mode.C = md.contains("C") ? matrix(md["C"], w + ".C") : Mat::Zero(mode.A.rows(), 0);
      mode.v = md.contains("v") ? vector(md["v"], w + ".v") : Vec::Zero(mode.A.rows());
      m.modes.push_back(std::move(mode));
    }
    m.n_s = static_cast<int>(m.modes[0].A.rows());
    m.n_u = static_cast<int>(m.modes[0].B.cols());
    m.n_eta = static_cast<int>(m.modes[0].C.cols());
    if (!j["regions"].is_array()) bad("system.regions must be an array");
    for (std::size_t l = 0; l < j["regions"].size(); ++l) {
      geometry::Polytope r = polytope(j["regions"][l], "system.regions[" + std::to_string(l) + "]");
      // Regions given over s only are lifted to (s, u, eta).
      if (r.dim() == m.n_s) {
        Mat A = Mat::Zero(r.rows(), m.n_s + m.n_u + m.n_eta);
        A.leftCols(m.n_s) = r.A();
        r = geometry::Polytope(A, r.b());
      }
      m.regions.push_back(std::move(r));
    }
    m.state_set = polytope(j["state_set"], "system.state_set");
    m.input_set = polytope(j["input_set"], "system.input_set");
    try {
      m.validate();
    } catch (const Error& e) {
      bad(e.what());
    }
    c.model = std::move(m);
  }
  if (j.contains("Q")) c.cost.Q = matrix(j["Q"], "system.Q");
  if (j.contains("R")) c.cost.R = matrix(j["R"], "system.R");
  if (j.contains("x0")) c.x0 = vector(j["x0"], "system.x0");
}

void parse_disturbance(const json& j, DisturbanceGenerator& g) {
  only_keys(j, "disturbance", {"amp_lo", "amp_hi", "noise", "freq_means", "freq_weights",
                               "freq_variance", "phase", "bound"});
  if (j.contains("amp_lo")) g.amp_lo = doubles(j["amp_lo"], "disturbance.amp_lo");
  if (j.contains("amp_hi")) g.amp_hi = doubles(j["amp_hi"], "disturbance.amp_hi");
  if (j.contains("noise")) g.noise = doubles(j["noise"], "disturbance.noise");
  if (j.contains("bound")) g.bound = doubles(j["bound"], "disturbance.bound");
  if (j.contains("freq_weights")) g.freq_weights = doubles(j["freq_weights"], "disturbance.freq_weights");
  if (j.contains("freq_means")) {
    if (!j["freq_means"].is_array()) bad("disturbance.freq_means must be an array of arrays");
    g.freq_means.clear();
    for (const auto& row : j["freq_means"]) g.freq_means.push_back(doubles(row, "disturbance.freq_means"));
  }
  g.freq_variance = get<double>(j, "freq_variance", "disturbance", g.freq_variance);
  if (j.contains("phase")) {
    const auto p = doubles(j["phase"], "disturbance.phase");
    if (p.size() != 2) bad("disturbance.phase must be [lo, hi]");
    g.phase_lo = p[0];
    g.phase_hi = p[1];
  }
}

pwa::Splitting splitting(const std::string& s) {
  try {
    return pwa::splitting_from_string(s);
  } catch (const Error&) {
    bad("unknown partition strategy '" + s + "'");
  }
}

}  // namespace

long ExperimentConfig::sample_size(int K_, double delta) const {
  if (N > 0) return N;
  return certify::required_samples(K_, delta, risk.beta);
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParseError, std::string("config: ") + e.what());
  }
  only_keys(j, "config", {"system", "horizon", "risk", "partition", "sampling", "disturbance",
                          "solver", "tightening", "experiment", "output"});

  ExperimentConfig c;
  c.model = pwa::benchmark_model();
  c.cost = pwa::benchmark_cost();
  c.x0 = pwa::benchmark_initial_state();
  if (j.contains("system")) parse_system(j["system"], c);

  c.horizon = get<int>(j, "horizon", "config", c.horizon);
  if (c.horizon < 1) bad("horizon must be at least 1");

  if (j.contains("risk")) {
    const json& r = j["risk"];
    only_keys(r, "risk", {"epsilon", "delta", "beta"});
    c.risk.epsilon = get<double>(r, "epsilon", "risk", c.risk.epsilon);
    c.risk.delta = get<double>(r, "delta", "risk", c.risk.delta);
    c.risk.beta = get<double>(r, "beta", "risk", c.risk.beta);
  }
  if (j.contains("partition")) {
    const json& p = j["partition"];
    only_keys(p, "partition", {"strategy", "K", "selection"});
    c.strategy = splitting(get<std::string>(p, "strategy", "partition", "grid"));
    c.K = get<int>(p, "K", "partition", c.K);
    const auto sel = get<std::string>(p, "selection", "partition", "optimal");
    if (sel == "optimal") c.selection = problems::Selection::kOptimal;
    else if (sel == "greedy") c.selection = problems::Selection::kGreedy;
    else bad("partition.selection must be optimal or greedy");
  }
  if (j.contains("sampling")) {
    const json& s = j["sampling"];
    only_keys(s, "sampling", {"N", "seed", "samples_csv"});
    if (s.contains("N")) {
      if (s["N"].is_string()) {
        if (s["N"] != "auto") bad("sampling.N must be a count or \"auto\"");
      } else {
        c.N = get<long>(s, "N", "sampling", 0);
        if (c.N < 1) bad("sampling.N must be positive");
      }
    }
    c.seed = get<std::uint64_t>(s, "seed", "sampling", c.seed);
    c.samples_csv = get<std::string>(s, "samples_csv", "sampling", "");
  }
  if (j.contains("disturbance")) parse_disturbance(j["disturbance"], c.disturbance);
  c.disturbance.horizon = c.horizon;
  if (j.contains("solver")) {
    const json& s = j["solver"];
    only_keys(s, "solver", {"engine", "command", "gap", "time_limit", "node_limit"});
    c.solver.engine = get<std::string>(s, "engine", "solver", c.solver.engine);
    c.solver.command = get<std::string>(s, "command", "solver", "");
    c.solver.gap = get<double>(s, "gap", "solver", c.solver.gap);
    c.solver.time_limit = get<double>(s, "time_limit", "solver", c.solver.time_limit);
    c.solver.node_limit = get<long>(s, "node_limit", "solver", c.solver.node_limit);
    if (c.solver.engine != "builtin" && c.solver.engine != "external" && c.solver.engine != "auto")
      bad("solver.engine must be builtin, external or auto");
    if (c.solver.gap < 0 || c.solver.time_limit < 0 || c.solver.node_limit < 0)
      bad("solver limits must be nonnegative");
  }
  if (j.contains("tightening")) {
    only_keys(j["tightening"], "tightening", {"margin"});
    c.margin = get<double>(j["tightening"], "margin", "tightening", c.margin);
    if (c.margin < 0) bad("tightening.margin must be nonnegative");
  }
  if (j.contains("experiment")) {
    const json& e = j["experiment"];
    only_keys(e, "experiment", {"repetitions", "validation_draws", "N_grid", "K_grid", "delta_grid",
                                "T_cl", "strategies", "scenario_baseline", "scenario_max_N"});
    c.repetitions = get<int>(e, "repetitions", "experiment", c.repetitions);
    c.validation_draws = get<long>(e, "validation_draws", "experiment", c.validation_draws);
    c.N_grid = get<std::vector<long>>(e, "N_grid", "experiment", {});
    c.K_grid = get<std::vector<int>>(e, "K_grid", "experiment", {});
    c.delta_grid = get<std::vector<double>>(e, "delta_grid", "experiment", {});
    c.T_cl = get<int>(e, "T_cl", "experiment", c.T_cl);
    if (e.contains("strategies")) {
      c.strategies.clear();
      for (const auto& s : get<std::vector<std::string>>(e, "strategies", "experiment", {}))
        c.strategies.push_back(splitting(s));
    }
    c.scenario_baseline = get<bool>(e, "scenario_baseline", "experiment", false);
    c.scenario_max_N = get<long>(e, "scenario_max_N", "experiment", c.scenario_max_N);
    if (c.repetitions < 1 || c.validation_draws < 1 || c.T_cl < 1)
      bad("repetitions, validation_draws and T_cl must be positive");
    for (long n : c.N_grid)
      if (n < 1) bad("experiment.N_grid entries must be positive");
    for (int k : c.K_grid)
      if (k < 1) bad("experiment.K_grid entries must be positive");
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    only_keys(o, "output", {"path", "format"});
    c.output = get<std::string>(o, "path", "output", "");
    const auto f = get<std::string>(o, "format", "output", "csv");
    if (f == "csv") c.format = Format::kCsv;
    else if (f == "plot") c.format = Format::kPlotData;
    else bad("output.format must be csv or plot");
  }

  try {
    c.model.validate();
    c.cost.validate(c.model.n_s, c.model.n_u);
    c.risk.validate();
    c.disturbance.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  if (c.x0.size() != c.model.n_s) bad("system.x0 has the wrong dimension");
  if (c.disturbance.n_eta() != c.model.n_eta)
    bad("disturbance component count differs from the model's n_eta");
  if (c.K < 1) bad("partition.K must be positive");
  for (double d : c.delta_grid)
    if (!(d > 0.0 && d <= c.risk.epsilon)) bad("experiment.delta_grid entries must lie in (0, epsilon]");
  if (c.N > 0) {
    std::vector<int> Ks = c.K_grid.empty() ? std::vector<int>{c.K} : c.K_grid;
    std::vector<double> ds = c.delta_grid.empty() ? std::vector<double>{c.risk.delta} : c.delta_grid;
    for (int k : Ks)
      for (double d : ds) {
        const long need = certify::required_samples(k, d, c.risk.beta);
        if (c.N < need)
          c.warnings.push_back("N=" + std::to_string(c.N) + " is below the certified size " +
                               std::to_string(need) + " for K=" + std::to_string(k));
      }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIoError, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string default_config_json() {
  const ExperimentConfig c;
  const DisturbanceGenerator& g = c.disturbance;
  json j;
  j["system"] = "benchmark";
  j["horizon"] = c.horizon;
  j["risk"] = {{"epsilon", c.risk.epsilon}, {"delta", c.risk.delta}, {"beta", c.risk.beta}};
  j["partition"] = {{"strategy", "grid"}, {"K", c.K}, {"selection", "optimal"}};
  j["sampling"] = {{"N", "auto"}, {"seed", c.seed}};
  j["disturbance"] = {{"amp_lo", g.amp_lo},
                      {"amp_hi", g.amp_hi},
                      {"noise", g.noise},
                      {"freq_means", g.freq_means},
                      {"freq_weights", g.freq_weights},
                      {"freq_variance", g.freq_variance},
                      {"phase", {g.phase_lo, g.phase_hi}},
                      {"bound", g.bound}};
  j["solver"] = {{"engine", c.solver.engine}, {"gap", c.solver.gap},
                 {"time_limit", c.solver.time_limit}, {"node_limit", c.solver.node_limit}};
  j["tightening"] = {{"margin", c.margin}};
  j["experiment"] = {{"repetitions", c.repetitions},
                     {"validation_draws", c.validation_draws},
                     {"N_grid", json::array()},
                     {"K_grid", json::array()},
                     {"delta_grid", json::array()},
                     {"T_cl", c.T_cl},
                     {"strategies", {"adaptive", "kmeans"}},
                     {"scenario_baseline", false},
                     {"scenario_max_N", c.scenario_max_N}};
  j["output"] = {{"format", "csv"}};
  return j.dump(2) + "\n";
}

}  // namespace ccpart::harness
