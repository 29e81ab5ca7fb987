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

#include "ccpart/harness/experiments.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "ccpart/certify.hpp"
#include "ccpart/closed_loop.hpp"
#include "ccpart/error.hpp"
#include "ccpart/rng.hpp"

namespace ccpart::harness {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Stats {
  double mean = kNaN, std = kNaN, max = kNaN;
  long count = 0;
};

// Mean, sample standard deviation and max of the finite entries.
Stats stats(const std::vector<double>& v) {
  Stats s;
  double sum = 0.0;
  for (double x : v)
    if (std::isfinite(x)) {
      sum += x;
      ++s.count;
      s.max = s.count == 1 ? x : std::max(s.max, x);
    }
  if (s.count == 0) return s;
  s.mean = sum / s.count;
  double ss = 0.0;
  for (double x : v)
    if (std::isfinite(x)) ss += (x - s.mean) * (x - s.mean);
  s.std = s.count > 1 ? std::sqrt(ss / (s.count - 1)) : 0.0;
  return s;
}

std::vector<int> k_list(const ExperimentConfig& c) {
  return c.K_grid.empty() ? std::vector<int>{c.K} : c.K_grid;
}
std::vector<double> delta_list(const ExperimentConfig& c) {
  return c.delta_grid.empty() ? std::vector<double>{c.risk.delta} : c.delta_grid;
}

std::int64_t i64(long v) { return static_cast<std::int64_t>(v); }

std::string combined_status(const std::vector<std::string>& s) {
  if (s.empty()) return "NotRun";
  for (const auto& x : s)
    if (x != s.front()) return "Mixed";
  return s.front();
}

void add_u_columns(Table& t, int n) {
  for (int i = 0; i < n; ++i) {
    t.columns.push_back("u_" + std::to_string(i));
    t.roles.push_back("y");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Scenario::Scenario(const ExperimentConfig& config) : cfg(config) {
  prediction = pwa::build_prediction_model(cfg.model, cfg.horizon);
  domain = cfg.disturbance.domain();
  require(domain.dim() == cfg.horizon * cfg.model.n_eta, "Scenario: disturbance box dimension mismatch");
  lipschitz = pwa::lipschitz_constants(prediction, cfg.cost, cfg.model.n_u);
  milp.gap_tol = cfg.solver.gap;
  milp.time_limit = cfg.solver.time_limit;
  milp.node_limit = cfg.solver.node_limit;

  std::string command = cfg.solver.command;
  if (command.empty() && cfg.solver.engine != "builtin") command = solver::engine_from_environment();
  if (cfg.solver.engine == "external" && command.empty())
    fail(ErrorCode::kConfigError, std::string("config: solver.engine is external but neither "
                                              "solver.command nor ") + solver::kEngineEnvVar +
                                      " is set");
  if (cfg.solver.engine != "builtin" && !command.empty()) {
    solver::ExternalEngine e;
    e.command = command;
    e.gap_tol = cfg.solver.gap;
    e.time_limit = cfg.solver.time_limit;
    engine = e;
  }

  if (!cfg.samples_csv.empty()) {
    const auto rows = read_csv_file(cfg.samples_csv);
    std::vector<std::vector<double>> data;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::vector<double> row;
      try {
        for (const auto& f : rows[r]) row.push_back(parse_double(f));
      } catch (const Error&) {
        if (r == 0) continue;  // header
        fail(ErrorCode::kConfigError, "samples_csv: non-numeric field in row " + std::to_string(r + 1));
      }
      if (static_cast<Eigen::Index>(row.size()) != domain.dim())
        fail(ErrorCode::kConfigError, "samples_csv: row " + std::to_string(r + 1) + " has " +
                                          std::to_string(row.size()) + " fields, expected " +
                                          std::to_string(domain.dim()));
      data.push_back(std::move(row));
    }
    if (data.empty()) fail(ErrorCode::kConfigError, "samples_csv: no samples");
    partition::SampleSet s;
    s.samples.resize(static_cast<Eigen::Index>(data.size()), domain.dim());
    for (std::size_t i = 0; i < data.size(); ++i)
      for (Eigen::Index k = 0; k < domain.dim(); ++k) s.samples(i, k) = data[i][k];
    fixed_samples = std::move(s);
  }

  // An OCP that is infeasible at x0 is a solve outcome, not a config error:
  // system_x0 stays empty and every pipeline run reports the status.
  try {
    system_x0 = compile_at(cfg.x0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInfeasible && e.code() != ErrorCode::kNoActiveRegion) throw;
    x0_status = to_string(e.code());
  }
}

problems::ConstraintSystem Scenario::compile_at(const Vec& s) const {
  return problems::prune_branches(pwa::compile_ocp(cfg.model, prediction, cfg.cost, s), domain);
}

certify::BoundContext Scenario::bound_context() const {
  certify::BoundContext ctx;
  ctx.L_theta = lipschitz.L_eta;
  ctx.L_x = lipschitz.L_u;
  ctx.q = 1.0;
  ctx.D = domain.diameter(1.0);
  ctx.R = system_x0.decision_box.diameter(2.0);
  ctx.n = system_x0.n_x;
  ctx.r = ctx.R;
  return ctx;
}

partition::SampleSet training_samples(const Scenario& sc, long N, int rep, int sub, long* clipped) {
  if (sc.fixed_samples) {
    if (clipped) *clipped = 0;
    return *sc.fixed_samples;
  }
  Rng rng(sc.cfg.seed, make_stream(StreamTag::kTraining, static_cast<std::uint64_t>(rep),
                                   static_cast<std::uint64_t>(sub)));
  return generate_disturbances(sc.cfg.disturbance, N, rng, clipped);
}

partition::Regions make_regions(const Scenario& sc, pwa::Splitting strategy, int K,
                                const partition::SampleSet& samples, int critical_block, int rep,
                                int sub) {
  switch (strategy) {
    case pwa::Splitting::kGrid:
      return partition::grid_partition(sc.domain, K);
    case pwa::Splitting::kKMeans: {
      Rng rng(sc.cfg.seed, make_stream(StreamTag::kClustering, static_cast<std::uint64_t>(rep),
                                       static_cast<std::uint64_t>(sub)));
      return partition::voronoi_partition(sc.domain, samples, K, rng.next_u64());
    }
    case pwa::Splitting::kAdaptive: {
      if (critical_block < 0) return partition::grid_partition(sc.domain, K);
      const int ne = sc.cfg.model.n_eta;
      std::vector<int> coords;
      for (int i = 0; i < ne; ++i) coords.push_back(critical_block * ne + i);
      return partition::adaptive_split(sc.domain, coords, K);
    }
  }
  fail(ErrorCode::kInvalidArgument, "make_regions: unknown strategy");
}

namespace {

partition::Regions scenario_regions(const Box& domain, const partition::SampleSet& samples) {
  partition::Regions r;
  r.domain = domain;
  for (Eigen::Index i = 0; i < samples.samples.rows(); ++i) {
    const Vec p = samples.samples.row(i).transpose();
    Box b(p, p);
    r.cells.push_back(b.to_polytope());
    r.boxes.emplace_back(b);
  }
  return r;
}

void solve_one(const Scenario& sc, const problems::ConstraintSystem& system,
               const partition::Partition& part, const problems::Tightening& tight,
               problems::SurrogateKind kind, double eps_eff, problems::SurrogateResult& out,
               std::string& status, bool& ok, long& nodes, double& ms) {
  const auto t0 = Clock::now();
  try {
    problems::SurrogateOptions so;
    so.selection = sc.cfg.selection;
    const problems::Surrogate s = kind == problems::SurrogateKind::kTightened
                                      ? problems::build_pp(system, part, tight, eps_eff, so)
                                      : problems::build_rp(system, part, tight, eps_eff, so);
    out = problems::solve_surrogate(s, sc.milp, sc.engine_ptr());
    status = solver::to_string(out.status);
    ok = out.ok();
    nodes = out.raw.node_count;
  } catch (const Error& e) {
    status = to_string(e.code());
    ok = false;
  }
  ms = ms_since(t0);
}

}  // namespace

PipelineResult run_pipeline(const Scenario& sc, const problems::ConstraintSystem& system,
                            const PipelineRequest& rq) {
  PipelineResult r;
  r.Z = system.Z();
  if (r.Z == 0) {
    r.status_pp = sc.x0_status.empty() ? "Infeasible" : sc.x0_status;
    if (rq.relaxed) r.status_rp = r.status_pp;
    return r;
  }
  problems::Tightening tight;
  try {
    r.samples = training_samples(sc, rq.N, rq.rep, rq.sub, &r.clipped);
    r.N = r.samples.samples.rows();
    const auto t0 = Clock::now();
    const partition::Regions regions =
        rq.scenario ? scenario_regions(sc.domain, r.samples)
                    : make_regions(sc, rq.strategy, rq.K, r.samples, rq.critical_block, rq.rep, rq.sub);
    r.part = partition::summarize(regions, r.samples);
    r.partition_ms = ms_since(t0);
    tight = problems::compute_tightening(system, r.part, sc.cfg.margin);
  } catch (const Error& e) {
    r.status_pp = to_string(e.code());
    if (rq.relaxed) r.status_rp = r.status_pp;
    return r;
  }
  const double eps = sc.cfg.risk.epsilon;
  const double eps_pp = rq.scenario ? 0.0 : std::max(0.0, eps - rq.delta);
  solve_one(sc, system, r.part, tight, problems::SurrogateKind::kTightened, eps_pp, r.pp, r.status_pp,
            r.pp_ok, r.nodes_pp, r.pp_ms);
  if (rq.relaxed)
    solve_one(sc, system, r.part, tight, problems::SurrogateKind::kRelaxed, eps + rq.delta, r.rp,
              r.status_rp, r.rp_ok, r.nodes_rp, r.rp_ms);
  return r;
}

double simulated_violation(const Scenario& sc, const Vec& u, long draws, int rep) {
  const auto& model = sc.cfg.model;
  const geometry::Polytope& S = model.state_set;
  const int ns = model.n_s;
  const int N = sc.cfg.horizon;
  Vec eta(sc.domain.dim());
  long bad = 0;
  for (long i = 0; i < draws; ++i) {
    Rng rng(sc.cfg.seed, make_stream(StreamTag::kValidation, static_cast<std::uint64_t>(rep),
                                     static_cast<std::uint64_t>(i)));
    sc.cfg.disturbance.draw(rng, eta);
    const Vec traj = pwa::simulate_stack(model, sc.cfg.x0, u, eta);
    for (int k = 1; k <= N; ++k) {
      if ((S.A() * traj.segment(k * ns, ns) - S.b()).maxCoeff() > 1e-9) {
        ++bad;
        break;
      }
    }
  }
  return static_cast<double>(bad) / static_cast<double>(draws);
}

// ---------------------------------------------------------------------------

namespace {

struct Bounds {
  certify::PerformanceInterval interval;
  double r = kNaN;
  std::string status = "NotRun";
  bool ok = false;
};

Bounds bounds_for(const Scenario& sc, const PipelineResult& pr) {
  Bounds b;
  if (!pr.pp_ok || !pr.rp_ok) {
    b.status = pr.pp_ok ? pr.status_rp : pr.status_pp;
    return b;
  }
  try {
    certify::BoundContext ctx = sc.bound_context();
    const double beta = sc.cfg.risk.beta;
    ctx.r = certify::optimize_r(ctx, pr.N, beta);
    const auto c = certify::concentration_constants(ctx, pr.N, beta);
    const double c3 = certify::partition_roughness(pr.part, pr.samples, ctx.L_theta, ctx.q);
    b.interval = certify::performance_interval(pr.pp.objective, pr.rp.objective, c.c1, c.c2, c3, beta);
    b.r = ctx.r;
    b.status = "Optimal";
    b.ok = true;
  } catch (const Error& e) {
    b.status = to_string(e.code());
  }
  return b;
}

PipelineRequest single_request(const ExperimentConfig& cfg, bool relaxed) {
  PipelineRequest rq;
  rq.K = cfg.K;
  rq.delta = cfg.risk.delta;
  rq.N = cfg.sample_size(cfg.K, cfg.risk.delta);
  rq.strategy = cfg.strategy;
  rq.relaxed = relaxed;
  return rq;
}

Table timing_table(std::vector<std::string> columns) {
  Table t;
  t.columns = std::move(columns);
  return t;
}

}  // namespace

RunOutput run_partition(const ExperimentConfig& cfg) {
  const Scenario sc(cfg);
  RunOutput out;
  out.warnings = cfg.warnings;
  const long N = cfg.sample_size(cfg.K, cfg.risk.delta);
  long clipped = 0;
  const auto samples = training_samples(sc, N, 0, 0, &clipped);
  const auto t0 = Clock::now();
  const auto part = partition::summarize(make_regions(sc, cfg.strategy, cfg.K, samples, -1, 0, 0), samples);
  const double ms = ms_since(t0);

  Table& t = out.table;
  t.columns = {"seed", "N", "K", "strategy", "cell", "count", "mass"};
  t.roles = {"meta", "meta", "meta", "meta", "group", "meta", "y"};
  const Eigen::Index d = samples.samples.cols();
  for (Eigen::Index i = 0; i < d; ++i) {
    t.columns.push_back("rep_" + std::to_string(i));
    t.roles.push_back("x");
  }
  for (int j = 0; j < part.K(); ++j) {
    const auto& c = part.cells[j];
    std::vector<Value> row{static_cast<std::int64_t>(cfg.seed), i64(samples.samples.rows()),
                           std::int64_t{cfg.K}, pwa::to_string(cfg.strategy), std::int64_t{j},
                           i64(c.count), c.mass};
    for (Eigen::Index i = 0; i < d; ++i) row.push_back(c.representative[i]);
    t.add_row(std::move(row));
  }
  Table timing = timing_table({"K", "strategy", "partition_ms"});
  timing.add_row({std::int64_t{cfg.K}, pwa::to_string(cfg.strategy), ms});
  out.sidecars.emplace_back(".timing.csv", std::move(timing));
  if (clipped) out.warnings.push_back(std::to_string(clipped) + " samples were clipped into the box");
  return out;
}

namespace {

RunOutput single_solve(const ExperimentConfig& cfg, bool relaxed, bool validate) {
  const Scenario sc(cfg);
  RunOutput out;
  out.warnings = cfg.warnings;
  const PipelineRequest rq = single_request(cfg, relaxed);
  const PipelineResult pr = run_pipeline(sc, sc.system_x0, rq);
  const int nu_total = cfg.horizon * cfg.model.n_u;

  Table& t = out.table;
  t.columns = {"seed", "N", "K", "delta", "beta", "epsilon", "strategy", "Z"};
  t.roles.assign(t.columns.size(), "meta");
  std::vector<Value> row{static_cast<std::int64_t>(cfg.seed), i64(pr.N ? pr.N : rq.N), std::int64_t{cfg.K},
                         rq.delta, cfg.risk.beta, cfg.risk.epsilon, pwa::to_string(cfg.strategy),
                         std::int64_t{pr.Z}};
  auto push = [&](const char* name, Value v) {
    t.columns.push_back(name);
    t.roles.push_back("y");
    row.push_back(std::move(v));
  };
  if (!relaxed) {
    push("status", pr.status_pp);
    push("objective", pr.pp_ok ? pr.pp.objective : kNaN);
    push("nodes", i64(pr.nodes_pp));
  } else {
    const Bounds b = bounds_for(sc, pr);
    push("status_pp", pr.status_pp);
    push("status_rp", pr.status_rp);
    push("J_pp", pr.pp_ok ? pr.pp.objective : kNaN);
    push("J_rp", pr.rp_ok ? pr.rp.objective : kNaN);
    push("c1", b.ok ? b.interval.c1 : kNaN);
    push("c2", b.ok ? b.interval.c2 : kNaN);
    push("c3", b.ok ? b.interval.c3 : kNaN);
    push("r", b.r);
    push("LB", b.ok ? b.interval.lower : kNaN);
    push("UB", b.ok ? b.interval.upper : kNaN);
    push("confidence", b.ok ? b.interval.confidence : kNaN);
    push("nodes_pp", i64(pr.nodes_pp));
    push("nodes_rp", i64(pr.nodes_rp));
    if (!b.ok) {
      out.fatal = true;
      out.message = "bounds: " + b.status;
    }
  }
  if (validate) {
    push("violation", pr.pp_ok ? simulated_violation(sc, pr.pp.x, cfg.validation_draws, 0) : kNaN);
    push("draws", i64(cfg.validation_draws));
  }
  for (int i = 0; i < nu_total; ++i) row.push_back(pr.pp_ok ? pr.pp.x[i] : kNaN);
  add_u_columns(t, nu_total);
  t.add_row(std::move(row));

  Table timing = timing_table({"partition_ms", "pp_ms", "rp_ms"});
  timing.add_row({pr.partition_ms, pr.pp_ms, pr.rp_ms});
  out.sidecars.emplace_back(".timing.csv", std::move(timing));
  if (!pr.pp_ok) {
    out.fatal = true;
    out.message = "tightened problem: " + pr.status_pp;
    out.failures = 1;
  }
  return out;
}

}  // namespace

RunOutput run_solve(const ExperimentConfig& cfg) { return single_solve(cfg, false, false); }
RunOutput run_bounds(const ExperimentConfig& cfg) { return single_solve(cfg, true, false); }
RunOutput run_validate(const ExperimentConfig& cfg) { return single_solve(cfg, false, true); }

RunOutput run_fig2(const ExperimentConfig& cfg) {
  const Scenario sc(cfg);
  RunOutput out;
  out.warnings = cfg.warnings;
  Table& t = out.table;
  t.columns = {"method", "seed", "N", "K", "delta", "beta", "epsilon", "repetitions", "solved",
               "status", "nodes", "clipped", "mean_violation", "std_violation", "max_violation",
               "within_epsilon"};
  t.roles = {"group", "meta", "x", "group", "group", "meta", "meta", "meta", "meta",
             "meta", "meta", "meta", "y", "err", "meta", "meta"};
  Table reps;
  reps.columns = {"method", "seed", "rep", "N", "K", "delta", "beta", "status", "nodes", "objective",
                  "violation"};
  Table timing = timing_table({"method", "N", "K", "delta", "rep", "partition_ms", "solve_ms"});

  struct Point {
    std::string method;
    long N;
    int K;
    double delta;
  };
  std::vector<Point> points;
  for (int K : k_list(cfg))
    for (double d : delta_list(cfg)) {
      const std::vector<long> Ns = cfg.N_grid.empty() ? std::vector<long>{cfg.sample_size(K, d)} : cfg.N_grid;
      for (long N : Ns) points.push_back({"pp", N, K, d});
    }
  if (cfg.scenario_baseline) {
    std::vector<long> Ns = cfg.N_grid.empty() ? std::vector<long>{cfg.scenario_max_N} : cfg.N_grid;
    for (long N : Ns)
      if (N <= cfg.scenario_max_N) points.push_back({"scenario", N, static_cast<int>(N), 0.0});
  }

  for (const Point& p : points) {
    std::vector<double> viol;
    std::vector<std::string> statuses;
    long nodes = 0, clipped = 0, solved = 0, within = 0, N_used = p.N;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      PipelineRequest rq;
      rq.K = p.K;
      rq.delta = p.delta;
      rq.N = p.N;
      rq.rep = rep;
      rq.strategy = cfg.strategy;
      rq.scenario = p.method == "scenario";
      const PipelineResult pr = run_pipeline(sc, sc.system_x0, rq);
      N_used = pr.N ? pr.N : p.N;
      double v = kNaN;
      if (pr.pp_ok) {
        v = simulated_violation(sc, pr.pp.x, cfg.validation_draws, rep);
        ++solved;
        if (v <= cfg.risk.epsilon) ++within;
      } else {
        ++out.failures;
      }
      viol.push_back(v);
      statuses.push_back(pr.status_pp);
      nodes += pr.nodes_pp;
      clipped += pr.clipped;
      reps.add_row({p.method, static_cast<std::int64_t>(cfg.seed), std::int64_t{rep}, i64(N_used),
                    std::int64_t{p.K}, p.delta, cfg.risk.beta, pr.status_pp, i64(pr.nodes_pp),
                    pr.pp_ok ? pr.pp.objective : kNaN, v});
      timing.add_row({p.method, i64(N_used), std::int64_t{p.K}, p.delta, std::int64_t{rep},
                      pr.partition_ms, pr.pp_ms});
    }
    const Stats s = stats(viol);
    t.add_row({p.method, static_cast<std::int64_t>(cfg.seed), i64(N_used), std::int64_t{p.K}, p.delta,
               cfg.risk.beta, cfg.risk.epsilon, std::int64_t{cfg.repetitions}, i64(solved),
               combined_status(statuses), i64(nodes), i64(clipped), s.mean, s.std, s.max, i64(within)});
  }
  out.sidecars.emplace_back(".reps.csv", std::move(reps));
  out.sidecars.emplace_back(".timing.csv", std::move(timing));
  return out;
}

RunOutput run_table1(const ExperimentConfig& cfg) {
  const Scenario sc(cfg);
  RunOutput out;
  out.warnings = cfg.warnings;
  Table& t = out.table;
  t.columns = {"seed", "K", "delta", "beta", "epsilon", "N", "repetitions", "solved", "status",
               "LB", "UB", "J_pp", "J_rp", "c1", "c2", "c3", "nodes"};
  t.roles = {"meta", "x", "group", "meta", "meta", "meta", "meta", "meta", "meta",
             "y", "y", "meta", "meta", "meta", "meta", "meta", "meta"};
  Table reps;
  reps.columns = {"seed", "rep", "K", "delta", "N", "status_pp", "status_rp", "J_pp", "J_rp",
                  "c1", "c2", "c3", "r", "LB", "UB", "nodes_pp", "nodes_rp"};
  Table timing = timing_table({"K", "delta", "mean_time_total_s"});

  for (int K : k_list(cfg))
    for (double d : delta_list(cfg)) {
      const long N = cfg.sample_size(K, d);
      std::vector<double> lb, ub, jpp, jrp, c1, c2, c3;
      std::vector<std::string> statuses;
      long nodes = 0, solved = 0, N_used = N;
      double seconds = 0.0;
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        PipelineRequest rq;
        rq.K = K;
        rq.delta = d;
        rq.N = N;
        rq.rep = rep;
        rq.strategy = cfg.strategy;
        rq.relaxed = true;
        const PipelineResult pr = run_pipeline(sc, sc.system_x0, rq);
        N_used = pr.N ? pr.N : N;
        const Bounds b = bounds_for(sc, pr);
        seconds += (pr.pp_ms + pr.rp_ms) / 1000.0;
        nodes += pr.nodes_pp + pr.nodes_rp;
        statuses.push_back(b.status);
        const auto val = [&](double x) { return b.ok ? x : kNaN; };
        if (b.ok) ++solved;
        else ++out.failures;
        lb.push_back(val(b.interval.lower));
        ub.push_back(val(b.interval.upper));
        jpp.push_back(val(pr.pp.objective));
        jrp.push_back(val(pr.rp.objective));
        c1.push_back(val(b.interval.c1));
        c2.push_back(val(b.interval.c2));
        c3.push_back(val(b.interval.c3));
        reps.add_row({static_cast<std::int64_t>(cfg.seed), std::int64_t{rep}, std::int64_t{K}, d,
                      i64(N_used), pr.status_pp, pr.status_rp, pr.pp_ok ? pr.pp.objective : kNaN,
                      pr.rp_ok ? pr.rp.objective : kNaN, c1.back(), c2.back(), c3.back(), b.r,
                      lb.back(), ub.back(), i64(pr.nodes_pp), i64(pr.nodes_rp)});
      }
      t.add_row({static_cast<std::int64_t>(cfg.seed), std::int64_t{K}, d, cfg.risk.beta,
                 cfg.risk.epsilon, i64(N_used), std::int64_t{cfg.repetitions}, i64(solved),
                 combined_status(statuses), stats(lb).mean, stats(ub).mean, stats(jpp).mean,
                 stats(jrp).mean, stats(c1).mean, stats(c2).mean, stats(c3).mean, i64(nodes)});
      timing.add_row({std::int64_t{K}, d, seconds / cfg.repetitions});
    }
  out.sidecars.emplace_back(".reps.csv", std::move(reps));
  out.sidecars.emplace_back(".timing.csv", std::move(timing));
  return out;
}

RunOutput run_closedloop(const ExperimentConfig& cfg) {
  const Scenario sc(cfg);
  RunOutput out;
  out.warnings = cfg.warnings;
  const int N_pred = cfg.horizon;
  const int ne = cfg.model.n_eta;
  const double delta = cfg.risk.delta;

  Table& t = out.table;
  t.columns = {"strategy", "K", "seed", "N", "delta", "beta", "t", "repetitions", "mean_cost",
               "std_cost", "held"};
  t.roles = {"group", "group", "meta", "meta", "meta", "meta", "x", "meta", "y", "err", "meta"};
  Table reps;
  reps.columns = {"strategy", "K", "rep", "t", "cost", "held", "status", "critical_block", "u_0"};
  for (int i = 0; i < cfg.model.n_s; ++i) reps.columns.push_back("s_" + std::to_string(i));
  Table timing = timing_table({"strategy", "K", "mean_partition_ms", "mean_solve_ms"});

  for (pwa::Splitting strategy : cfg.strategies)
    for (int K : k_list(cfg)) {
      const long N = cfg.sample_size(K, delta);
      std::vector<std::vector<double>> cost(cfg.T_cl);
      std::vector<long> held(cfg.T_cl, 0);
      double part_ms = 0.0, solve_ms = 0.0;
      long steps = 0;
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        auto controller = [&](int step, const Vec& s, int block) {
          pwa::ControlStep cs;
          PipelineRequest rq;
          rq.K = K;
          rq.delta = delta;
          rq.N = N;
          rq.rep = rep;
          rq.sub = step;
          rq.strategy = strategy;
          rq.critical_block = block;
          problems::ConstraintSystem system;
          try {
            system = sc.compile_at(s);
          } catch (const Error& e) {
            cs.status = to_string(e.code());
            return cs;
          }
          const PipelineResult pr = run_pipeline(sc, system, rq);
          cs.ok = pr.pp_ok;
          cs.status = pr.status_pp;
          cs.nodes = pr.nodes_pp;
          cs.partition_ms = pr.partition_ms;
          cs.solve_ms = pr.pp_ms;
          if (cs.ok) {
            cs.u_stack = pr.pp.x;
            cs.theta_nominal = pr.part.representatives().transpose() * pr.part.masses();
          }
          return cs;
        };
        auto realized = [&](int step) {
          Rng rng(cfg.seed, make_stream(StreamTag::kRealized, static_cast<std::uint64_t>(rep),
                                        static_cast<std::uint64_t>(step)));
          Vec full(sc.domain.dim());
          cfg.disturbance.draw(rng, full);
          return Vec(full.head(ne));
        };
        const pwa::ClosedLoopResult r =
            pwa::closed_loop(cfg.model, cfg.cost, cfg.x0, cfg.T_cl, N_pred, controller, realized);
        for (int k = 0; k < cfg.T_cl; ++k) {
          cost[k].push_back(r.stage_cost[k]);
          held[k] += r.held[k];
          part_ms += r.partition_ms[k];
          solve_ms += r.solve_ms[k];
          ++steps;
          std::vector<Value> row{pwa::to_string(strategy), std::int64_t{K}, std::int64_t{rep},
                                 std::int64_t{k + 1}, r.stage_cost[k], std::int64_t{r.held[k]},
                                 r.status[k], std::int64_t{r.critical_block[k]}, r.inputs(k, 0)};
          for (int i = 0; i < cfg.model.n_s; ++i) row.push_back(r.states(k + 1, i));
          reps.add_row(std::move(row));
        }
        for (char h : r.held) out.failures += h;
      }
      for (int k = 0; k < cfg.T_cl; ++k) {
        const Stats s = stats(cost[k]);
        t.add_row({pwa::to_string(strategy), std::int64_t{K}, static_cast<std::int64_t>(cfg.seed),
                   i64(N), delta, cfg.risk.beta, std::int64_t{k + 1}, std::int64_t{cfg.repetitions},
                   s.mean, s.std, i64(held[k])});
      }
      timing.add_row({pwa::to_string(strategy), std::int64_t{K}, part_ms / std::max(1L, steps),
                      solve_ms / std::max(1L, steps)});
    }
  out.sidecars.emplace_back(".reps.csv", std::move(reps));
  out.sidecars.emplace_back(".timing.csv", std::move(timing));
  return out;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"partition", "solve",  "bounds",    "validate",
                                              "fig2",      "table1", "closedloop"};
  return names;
}

RunOutput run_experiment(const ExperimentConfig& cfg, const std::string& name) {
  if (name == "partition") return run_partition(cfg);
  if (name == "solve") return run_solve(cfg);
  if (name == "bounds") return run_bounds(cfg);
  if (name == "validate") return run_validate(cfg);
  if (name == "fig2") return run_fig2(cfg);
  if (name == "table1") return run_table1(cfg);
  if (name == "closedloop") return run_closedloop(cfg);
  fail(ErrorCode::kConfigError, "unknown experiment '" + name + "'");
}

void write_output(const RunOutput& out, const std::string& path, Format format) {
  emit(out.table, path, format);
  for (const auto& [suffix, table] : out.sidecars) emit(table, path + suffix, Format::kCsv);
}

}  // namespace ccpart::harness
