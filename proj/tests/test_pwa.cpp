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

#include <algorithm>
#include <cmath>

#include "ccpart/certify.hpp"
#include "ccpart/closed_loop.hpp"
#include "ccpart/error.hpp"
#include "ccpart/pwa.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ccpart::pwa;
using ccpart::ErrorCode;

namespace {

Mat scalar(double a) { return Mat::Constant(1, 1, a); }

// One scalar mode valid everywhere, |s| <= s_max, |u| <= u_max.
PwaModel scalar_model(double A, double B, double C, double v, double s_max, double u_max) {
  PwaModel md;
  md.n_s = md.n_u = md.n_eta = 1;
  md.modes.push_back({scalar(A), scalar(B), scalar(C), Vec::Constant(1, v)});
  md.regions.push_back(Box(Vec::Constant(3, -1e4), Vec::Constant(3, 1e4)).to_polytope());
  Mat pm(2, 1);
  pm << 1, -1;
  md.state_set = Polytope(pm, Vec::Constant(2, s_max));
  md.input_set = Polytope(pm, Vec::Constant(2, u_max));
  return md;
}

StageCost scalar_cost(double q, double r) { return {scalar(q), scalar(r)}; }

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const ccpart::Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

}  // namespace

TEST_CASE("enumerate_sequences") {
  CHECK(enumerate_sequences(1, 4).size() == 1);
  const auto s = enumerate_sequences(3, 2);
  REQUIRE(s.size() == 9);
  CHECK(s.front() == Sequence{0, 0});
  CHECK(s[1] == Sequence{0, 1});
  CHECK(s.back() == Sequence{2, 2});
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(enumerate_sequences(3, 5).size() == 243);
  CHECK(code_of([] { enumerate_sequences(3, 11); }) == ErrorCode::kCombinatorialBlowup);
  CHECK(sequence_label({2, 2, 0}) == "3-3-1");
}

TEST_CASE("prediction matrices of the scalar integrator") {
  const auto md = scalar_model(1, 1, 1, 0, 10, 1);
  const auto p = prediction_matrices(md, {0, 0});
  Mat F(3, 1), G(3, 2);
  F << 1, 1, 1;
  G << 0, 0, 1, 0, 1, 1;
  CHECK(p.F == F);
  CHECK(p.G == G);
  CHECK(p.Gamma == G);
  CHECK(p.v.isZero(0.0));
}

TEST_CASE("prediction structure on the benchmark model") {
  const auto md = benchmark_model();
  const auto pm = build_prediction_model(md, 4);
  CHECK(pm.stacks.size() == 81);
  for (const auto& p : pm.stacks) {
    CHECK(p.F.rows() == 15);
    CHECK(p.F.topRows(3) == Mat::Identity(3, 3));
    CHECK(p.G.topRows(3).isZero(0.0));
    CHECK(p.Gamma.topRows(3).isZero(0.0));
    CHECK(p.v.isZero(0.0));
    for (int k = 0; k <= 4; ++k) {
      CHECK(p.G.block(3 * k, k, 3, 4 - k).isZero(0.0));
      CHECK(p.Gamma.block(3 * k, 2 * k, 3, 2 * (4 - k)).isZero(0.0));
    }
  }
}

TEST_CASE("offsets accumulate through the dynamics") {
  auto md = scalar_model(0.5, 1, 0, 1.0, 10, 1);
  const auto p = prediction_matrices(md, {0, 0, 0});
  // s1 = 1, s2 = 1.5, s3 = 1.75 from s0 = 0 with zero input.
  CHECK(p.v[1] == doctest::Approx(1.0));
  CHECK(p.v[2] == doctest::Approx(1.5));
  CHECK(p.v[3] == doctest::Approx(1.75));
  const Vec sim = simulate_stack(md, Vec::Zero(1), Vec::Zero(3), Vec::Zero(3));
  CHECK((sim - p.v).norm() < 1e-12);
}

TEST_CASE("stacked prediction agrees with step simulation") {
  const auto md = benchmark_model();
  ccpart::Rng rng(51, 0);
  const int N = 5;
  for (int t = 0; t < 100; ++t) {
    const Vec s0 = oracle::random_vector(rng, 3, -3, 3);
    const Vec u = oracle::random_vector(rng, N, -0.7, 0.7);
    const Vec eta = oracle::random_vector(rng, 2 * N, -0.5, 0.5);
    Sequence seq;
    const Vec sim = simulate_stack(md, s0, u, eta, &seq);
    const auto p = prediction_matrices(md, seq);
    const Vec pred = p.F * s0 + p.G * u + p.Gamma * eta + p.v;
    CHECK((sim - pred).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("active modes of the benchmark") {
  const auto md = benchmark_model();
  const Vec u = Vec::Zero(1), eta = Vec::Zero(2);
  CHECK(active_mode(md, benchmark_initial_state(), u, eta) == 2);
  Vec s(3);
  s << 1.0, 0, 0;
  CHECK(active_mode(md, s, u, eta) == 1);
  s[0] = -1.0;
  CHECK(active_mode(md, s, u, eta) == 0);
  s[0] = -3.0;
  CHECK(active_mode(md, s, u, eta) == 0);
  CHECK(md.regions_disjoint());
  int mode = -1;
  const Vec next = simulate_step(md, benchmark_initial_state(), Vec::Constant(1, 0.5), eta, &mode);
  CHECK(mode == 2);
  CHECK(next.isApprox(md.modes[2].A * benchmark_initial_state() + md.modes[2].B * 0.5));
}

TEST_CASE("zero dynamics and tiling gaps") {
  auto md = scalar_model(0, 0, 0, 0, 1, 1);
  CHECK(simulate_step(md, Vec::Constant(1, 5), Vec::Constant(1, 1), Vec::Constant(1, 2)).isZero(0.0));
  md.regions[0] = Box(Vec::Constant(3, -1), Vec::Constant(3, 1)).to_polytope();
  CHECK(code_of([&] { simulate_step(md, Vec::Constant(1, 5), Vec::Zero(1), Vec::Zero(1)); }) ==
        ErrorCode::kNoActiveRegion);
}

TEST_CASE("Lipschitz constants") {
  const auto bench = lipschitz_constants(build_prediction_model(benchmark_model(), 5),
                                         benchmark_cost(), 1);
  CHECK(bench.L_eta == doctest::Approx(34.64).epsilon(5e-4));
  CHECK(bench.L_u == doctest::Approx(79.69).epsilon(5e-4));
  const auto md = scalar_model(0, 1, 1, 0, 1, 1);
  const auto s = lipschitz_constants(build_prediction_model(md, 1), scalar_cost(1, 0), 1);
  CHECK(s.L_eta == doctest::Approx(1.0));
  CHECK(s.L_u == doctest::Approx(1.0));
  const auto z = lipschitz_constants(build_prediction_model(scalar_model(0.5, 1, 0, 0, 1, 1), 3),
                                     scalar_cost(1, 1), 1);
  CHECK(z.L_eta == 0.0);
  Mat M(2, 2);
  M << 1, -4, -2, 1;
  CHECK(induced_one_norm(M) == 5.0);
}

TEST_CASE("Lipschitz constants bound the branch costs") {
  const auto md = benchmark_model();
  const auto pm = build_prediction_model(md, 3);
  const auto cost = benchmark_cost();
  const auto L = lipschitz_constants(pm, cost, 1);
  ccpart::Rng rng(52, 0);
  const auto sys = compile_ocp(md, pm, cost, oracle::random_vector(rng, 3, -2, 2));
  for (int t = 0; t < 1000; ++t) {
    const int h = static_cast<int>(rng.below(sys.branch_costs.size()));
    auto J = [&](const Vec& x, const Vec& th) {
      return sys.cost.evaluate(x, th) + sys.branch_costs[h].evaluate(x, th);
    };
    const Vec x = oracle::random_vector(rng, 3, -0.7, 0.7), x2 = oracle::random_vector(rng, 3, -0.7, 0.7);
    const Vec th = oracle::random_vector(rng, 6, -0.3, 0.3), th2 = oracle::random_vector(rng, 6, -0.3, 0.3);
    CHECK(std::abs(J(x, th) - J(x, th2)) <= L.L_eta * (th - th2).lpNorm<1>() + 1e-9);
    CHECK(std::abs(J(x, th) - J(x2, th)) <= L.L_u * (x - x2).norm() + 1e-9);
  }
}

TEST_CASE("compile_ocp structure") {
  const auto md = benchmark_model();
  const auto pm = build_prediction_model(md, 3);
  const auto sys = compile_ocp(md, pm, benchmark_cost(), benchmark_initial_state());
  CHECK(sys.n_x == 3);
  CHECK(sys.n_theta == 6);
  CHECK(sys.G.rows() == 2 * 3 * 1);
  CHECK(sys.decision_box.lo() == Vec::Constant(3, -0.7));
  CHECK(sys.decision_box.hi() == Vec::Constant(3, 0.7));
  // s_0 fixes the first mode, and s_1 = A3 s_0 is free of (u, eta) in its
  // first coordinate, which fixes the second mode as well.
  REQUIRE(sys.Z() == 3);
  CHECK(sys.branches[0].label == "3-3-1");
  CHECK(sys.branches[2].label == "3-3-3");

  const auto one = compile_ocp(md, build_prediction_model(md, 1), benchmark_cost(),
                               benchmark_initial_state());
  REQUIRE(one.Z() == 1);
  CHECK(one.branches[0].label == "3");
}

TEST_CASE("compile_ocp branch rows reproduce simulation") {
  const auto md = benchmark_model();
  const auto pm = build_prediction_model(md, 3);
  const auto cost = benchmark_cost();
  ccpart::Rng rng(53, 0);
  for (int t = 0; t < 100; ++t) {
    const Vec s0 = oracle::random_vector(rng, 3, -2, 2);
    const auto sys = compile_ocp(md, pm, cost, s0);
    const Vec u = oracle::random_vector(rng, 3, -0.7, 0.7);
    const Vec eta = oracle::random_vector(rng, 6, -0.3, 0.3);
    Sequence seq;
    const Vec stack = simulate_stack(md, s0, u, eta, &seq);
    const int h = sys.selected_branch(u, eta, 1e-9);
    REQUIRE(h >= 0);
    CHECK(sys.branches[h].label == sequence_label(seq));
    CHECK(sys.nominal_cost(u, eta) == doctest::Approx(rollout_cost(md, cost, s0, u, eta)).epsilon(1e-9));
    bool inside = true;
    for (int k = 1; k <= 3; ++k) inside = inside && md.state_set.contains(stack.segment(3 * k, 3), 1e-9);
    CHECK(inside == (sys.branches[h].value(u, eta) <= 1e-9));
  }
}

TEST_CASE("deterministic compile_ocp equals condensed MPC") {
  // s+ = 0.9 s + u, N = 2, cost |s1| + |s2| + 0.5(|u0| + |u1|), |u| <= 0.7, |s| <= 5.
  const auto md = scalar_model(0.9, 1, 0, 0, 5, 0.7);
  const auto pm = build_prediction_model(md, 2);
  const auto cost = scalar_cost(1, 0.5);
  ccpart::Rng rng(54, 0);
  for (int t = 0; t < 30; ++t) {
    const double s0 = rng.uniform(-4, 4);
    const auto sys = compile_ocp(md, pm, cost, Vec::Constant(1, s0));
    ccpart::partition::SampleSet smp;
    smp.samples = Mat::Zero(1, 2);
    const auto part = ccpart::partition::summarize(
        ccpart::partition::grid_partition(Box(Vec::Constant(2, -1), Vec::Constant(2, 1)), 1), smp);
    const auto tt = ccpart::problems::compute_tightening(sys, part, 0.0);
    const auto res = ccpart::problems::solve_surrogate(ccpart::problems::build_pp(sys, part, tt, 0.0));

    // Convex piecewise-linear objective over a polygon: the minimum is at a
    // vertex of the arrangement of constraint and breakpoint lines.
    // Each line is a'u = c with u = (u0, u1); s1 = 0.9 s0 + u0, s2 = 0.81 s0 + 0.9 u0 + u1.
    std::vector<std::pair<Vec, double>> lines;
    auto add = [&](double a0, double a1, double c) {
      Vec a(2);
      a << a0, a1;
      lines.emplace_back(a, c);
    };
    for (double b : {-0.7, 0.7}) {
      add(1, 0, b);
      add(0, 1, b);
    }
    for (double b : {-5.0, 5.0, 0.0}) {
      add(1, 0, b - 0.9 * s0);
      add(0.9, 1, b - 0.81 * s0);
    }
    add(1, 0, 0);
    add(0, 1, 0);
    double best = oracle::kInf;
    for (std::size_t i = 0; i < lines.size(); ++i)
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        Mat S(2, 2);
        S << lines[i].first.transpose(), lines[j].first.transpose();
        if (std::abs(S.determinant()) < 1e-12) continue;
        Vec rhs(2);
        rhs << lines[i].second, lines[j].second;
        const Vec u = S.partialPivLu().solve(rhs);
        const double s1 = 0.9 * s0 + u[0], s2 = 0.81 * s0 + 0.9 * u[0] + u[1];
        if (u.cwiseAbs().maxCoeff() > 0.7 + 1e-9 || std::abs(s1) > 5 + 1e-9 || std::abs(s2) > 5 + 1e-9)
          continue;
        best = std::min(best, std::abs(s1) + std::abs(s2) + 0.5 * u.lpNorm<1>());
      }
    REQUIRE(res.ok());
    CHECK(res.objective == doctest::Approx(best).epsilon(1e-7));
  }
}

TEST_CASE("critical_step picks the tightest state row") {
  const auto md = scalar_model(1, 1, 0, 0, 1, 1);
  Vec u(3);
  u << 0.5, 0.3, -0.5;
  CHECK(critical_step(md, Vec::Zero(1), u, Vec::Zero(3)) == 2);
  u << 0.5, -0.5, 0.5;  // s = 0.5, 0, 0.5: tie goes to step 1
  CHECK(critical_step(md, Vec::Zero(1), u, Vec::Zero(3)) == 1);
}

TEST_CASE("closed loop: decreasing cost, determinism and input holding") {
  const auto md = scalar_model(1.1, 1, 1, 0, 100, 5);
  const auto cost = scalar_cost(1, 0.1);
  const Controller ctl = [](int t, const Vec& s, int) {
    ControlStep st;
    st.ok = t != 3;
    st.u_stack = Vec::Constant(2, -0.8 * s[0]);
    st.theta_nominal = Vec::Zero(2);
    return st;
  };
  const RealizedDisturbance calm = [](int) { return Vec::Zero(1); };
  const auto r = closed_loop(md, cost, Vec::Constant(1, 4.0), 20, 2, ctl, calm);
  CHECK(r.stage_cost[19] < r.stage_cost[0]);
  CHECK(r.held[3] == 1);
  CHECK(r.inputs(3, 0) == r.inputs(2, 0));
  CHECK(r.critical_block[0] == -1);

  auto noisy = [](int t) {
    ccpart::Rng rng(9, ccpart::make_stream(ccpart::StreamTag::kRealized, 0, t));
    return Vec::Constant(1, rng.uniform(-0.1, 0.1));
  };
  const auto a = closed_loop(md, cost, Vec::Constant(1, 4.0), 20, 2, ctl, noisy);
  const auto b = closed_loop(md, cost, Vec::Constant(1, 4.0), 20, 2, ctl, noisy);
  CHECK(a.states == b.states);
  CHECK(a.inputs == b.inputs);
  CHECK(a.stage_cost == b.stage_cost);
  CHECK(a.states != r.states);
}

TEST_CASE("splitting names") {
  CHECK(splitting_from_string("adaptive") == Splitting::kAdaptive);
  CHECK(to_string(Splitting::kKMeans) == "kmeans");
  CHECK(splitting_from_string(to_string(Splitting::kGrid)) == Splitting::kGrid);
  CHECK(code_of([] { splitting_from_string("hexagonal"); }) == ErrorCode::kConfigError);
}
