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

#include <cmath>

#include "ccpart/error.hpp"
#include "ccpart/problems.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ccpart::problems;
using ccpart::ErrorCode;
using ccpart::partition::grid_partition;
using ccpart::partition::Partition;
using ccpart::partition::SampleSet;
using ccpart::partition::summarize;
using ccpart::solver::MilpStatus;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Partition single_cell(const Box& d, const Mat& samples) {
  SampleSet s;
  s.samples = samples;
  return summarize(grid_partition(d, 1), s);
}

Branch branch(Mat C, Mat D, Vec b) {
  Branch br;
  br.C = std::move(C);
  br.D = std::move(D);
  br.b = std::move(b);
  br.selector.assign(br.b.size(), 0);
  return br;
}

// Z branches of 3 rows over x in [-2,2]^2, theta in [-1,1]^2, 1-norm tracking cost.
ConstraintSystem random_system(ccpart::Rng& rng, int Z) {
  ConstraintSystem sys;
  sys.n_x = 2;
  sys.n_theta = 2;
  sys.decision_box = Box(Vec::Constant(2, -2), Vec::Constant(2, 2));
  for (int h = 0; h < Z; ++h)
    sys.branches.push_back(branch(oracle::random_matrix(rng, 3, 2),
                                  oracle::random_matrix(rng, 3, 2, -0.5, 0.5),
                                  oracle::random_vector(rng, 3, -1.0, -0.1)));
  sys.cost = CostTerm::zero(2, 2);
  sys.cost.P = Mat::Identity(2, 2);
  sys.cost.Q = oracle::random_matrix(rng, 2, 2);
  sys.cost.q = oracle::random_vector(rng, 2);
  sys.cost.lin_x = oracle::random_vector(rng, 2, -0.5, 0.5);
  return sys;
}

Partition random_partition(ccpart::Rng& rng, int K, long N) {
  const Box d(Vec::Constant(2, -1), Vec::Constant(2, 1));
  SampleSet s;
  s.samples = oracle::random_matrix(rng, static_cast<int>(N), 2);
  return summarize(grid_partition(d, K), s);
}

std::vector<Vec> box_vertices(const Box& b) {
  return {v2(b.lo()[0], b.lo()[1]), v2(b.hi()[0], b.lo()[1]), v2(b.lo()[0], b.hi()[1]),
          v2(b.hi()[0], b.hi()[1])};
}

}  // namespace

TEST_CASE("compute_tightening examples") {
  const Box d(Vec::Constant(2, -1), Vec::Constant(2, 1));
  ConstraintSystem sys;
  sys.n_x = 1;
  sys.n_theta = 2;
  sys.decision_box = Box(Vec::Constant(1, -1), Vec::Constant(1, 1));
  sys.cost = CostTerm::zero(1, 2);
  Mat D(2, 2);
  D << 1, 2, 0, 0;
  sys.branches = {branch(Mat::Ones(2, 1), D, Vec::Zero(2))};
  Mat sym(2, 2);
  sym << -1, -1, 1, 1;
  const double iota = 1e-6;
  auto t = compute_tightening(sys, single_cell(d, sym), iota);
  CHECK(t.tau[0][0][0] == doctest::Approx(3 + iota).epsilon(1e-14));
  CHECK(t.gamma[0][0][0] == doctest::Approx(3 + iota).epsilon(1e-14));
  CHECK(t.tau[0][0][1] == iota);
  CHECK(t.gamma[0][0][1] == iota);

  Mat corner(1, 2);
  corner << 1, 1;
  t = compute_tightening(sys, single_cell(d, corner), iota);
  CHECK(t.tau[0][0][0] == doctest::Approx(iota).epsilon(1e-9));
  CHECK(t.gamma[0][0][0] == doctest::Approx(6 + iota));
}

TEST_CASE("tightening is nonnegative and robust over grid cells") {
  ccpart::Rng rng(31, 0);
  for (int t = 0; t < 30; ++t) {
    const auto sys = random_system(rng, 2);
    const auto part = random_partition(rng, 6, 100);
    const auto tt = compute_tightening(sys, part, 0.0);
    for (int j = 0; j < part.K(); ++j)
      for (int h = 0; h < 2; ++h) {
        CHECK((tt.tau[j][h].array() >= -1e-12).all());
        CHECK((tt.gamma[j][h].array() >= -1e-12).all());
        const Mat& D = sys.branches[h].D;
        const Vec rep = part.cells[j].representative;
        for (const auto& v : box_vertices(*part.cells[j].box)) {
          CHECK(((D * (v - rep)).array() <= tt.tau[j][h].array() + 1e-12).all());
          CHECK(((D * (rep - v)).array() <= tt.gamma[j][h].array() + 1e-12).all());
        }
      }
  }
}

TEST_CASE("greedy_cover") {
  Vec m(3);
  m << 0.5, 0.3, 0.2;
  CHECK(greedy_cover(m, 0.25) == std::vector<int>{1, 1, 0});
  CHECK(greedy_cover(m, 0.0) == std::vector<int>{1, 1, 1});
  Vec z(4);
  z << 0.5, 0.0, 0.5, 0.0;
  CHECK(greedy_cover(z, 0.0) == std::vector<int>{1, 0, 1, 0});
  Vec tie(3);
  tie << 0.25, 0.5, 0.25;
  CHECK(greedy_cover(tie, 0.3) == std::vector<int>{1, 1, 0});
}

TEST_CASE("greedy cover reaches the target and is minimal in sorted order") {
  ccpart::Rng rng(32, 0);
  for (int t = 0; t < 200; ++t) {
    const int K = 1 + static_cast<int>(rng.below(15));
    Vec m = oracle::random_vector(rng, K, 0.0, 1.0);
    m /= m.sum();
    const double eps = rng.uniform(0.0, 0.9);
    const auto z = greedy_cover(m, eps);
    double cov = 0, smallest = 1;
    for (int j = 0; j < K; ++j)
      if (z[j]) {
        cov += m[j];
        smallest = std::min(smallest, m[j]);
      }
    CHECK(cov >= 1 - eps - 1e-12);
    CHECK(cov - smallest < 1 - eps - 1e-12);
  }
}

TEST_CASE("big_m_values examples") {
  const Box d(Vec::Constant(1, -1), Vec::Constant(1, 1));
  ConstraintSystem sys;
  sys.n_x = 1;
  sys.n_theta = 1;
  sys.decision_box = Box(Vec::Constant(1, -1), Vec::Constant(1, 1));
  sys.cost = CostTerm::zero(1, 1);
  Mat C(2, 1), D(2, 1);
  C << 0, 2;
  D << 1, 0;
  Vec b(2);
  b << 0.5, 0.25;
  sys.branches = {branch(C, D, b)};
  Mat s(2, 1);
  s << 0.2, 0.4;  // representative 0.3
  const auto part = single_cell(d, s);
  const auto tt = compute_tightening(sys, part, 0.0);
  const auto M = big_m_values(sys, part, tt);
  const double slack0 = std::max(tt.tau[0][0][0], tt.gamma[0][0][0]);
  CHECK(M[0][0][0] == doctest::Approx(0.5 + 0.3 + slack0 + 1));
  CHECK(M[0][0][1] == doctest::Approx(2 + 0.25 + 0 + 1));
}

TEST_CASE("deactivated big-M rows never cut off the decision box") {
  ccpart::Rng rng(33, 0);
  for (int t = 0; t < 10; ++t) {
    const auto sys = random_system(rng, 3);
    const auto part = random_partition(rng, 4, 80);
    const auto tt = compute_tightening(sys, part);
    const auto M = big_m_values(sys, part, tt);
    for (int i = 0; i < 100; ++i) {
      const Vec x = oracle::random_vector(rng, 2, -2, 2);
      for (int j = 0; j < part.K(); ++j)
        for (int h = 0; h < 3; ++h) {
          const auto& br = sys.branches[h];
          const Vec rep = part.cells[j].representative;
          const Vec lhs = br.C * x + br.D * rep + br.b;
          CHECK(((lhs + tt.tau[j][h] - M[j][h]).array() <= 0).all());
          CHECK(((lhs - tt.gamma[j][h] - M[j][h]).array() <= 0).all());
        }
    }
  }
}

TEST_CASE("single cell single branch reduces to an LP") {
  ccpart::Rng rng(34, 0);
  for (int t = 0; t < 40; ++t) {
    ConstraintSystem sys = random_system(rng, 1);
    sys.cost = CostTerm::zero(2, 2);
    sys.cost.lin_x = oracle::random_vector(rng, 2);
    const auto part = random_partition(rng, 1, 50);
    const auto tt = compute_tightening(sys, part);
    const auto pp = solve_surrogate(build_pp(sys, part, tt, 0.0));
    const auto& br = sys.branches[0];
    Mat A(7, 2);
    A << br.C, Mat::Identity(2, 2), -Mat::Identity(2, 2);
    Vec b(7);
    b << -br.D * part.cells[0].representative - br.b - tt.tau[0][0], Vec::Constant(4, 2.0);
    const double ref = oracle::lp_by_vertices(sys.cost.lin_x, A, b);
    if (std::isinf(ref)) {
      CHECK(pp.status == MilpStatus::kInfeasible);
    } else {
      REQUIRE(pp.ok());
      CHECK(pp.objective == doctest::Approx(ref).epsilon(1e-7));
    }
  }
}

TEST_CASE("one-dimensional PP and RP differ by tau plus gamma") {
  ConstraintSystem sys;
  sys.n_x = 1;
  sys.n_theta = 1;
  sys.decision_box = Box(Vec::Constant(1, -10), Vec::Constant(1, 10));
  sys.cost = CostTerm::zero(1, 1);
  sys.cost.lin_x[0] = -1.0;  // maximize x
  sys.branches = {branch(Mat::Ones(1, 1), Mat::Ones(1, 1), Vec::Constant(1, -1.0))};
  Mat s(2, 1);
  s << -1, 1;
  const auto part = single_cell(Box(Vec::Constant(1, -1), Vec::Constant(1, 1)), s);
  const auto tt = compute_tightening(sys, part);
  const auto pp = solve_surrogate(build_pp(sys, part, tt, 0.0));
  const auto rp = solve_surrogate(build_rp(sys, part, tt, 0.0));
  REQUIRE(pp.ok());
  REQUIRE(rp.ok());
  CHECK(pp.objective - rp.objective ==
        doctest::Approx(tt.tau[0][0][0] + tt.gamma[0][0][0]).epsilon(1e-9));
}

TEST_CASE("zero tightening and equal risk give identical PP and RP models") {
  ccpart::Rng rng(35, 0);
  ConstraintSystem sys = random_system(rng, 2);
  for (auto& br : sys.branches) br.D.setZero();
  const auto part = random_partition(rng, 4, 60);
  const auto tt = compute_tightening(sys, part, 0.0);
  const auto a = build_pp(sys, part, tt, 0.2).model;
  const auto b = build_rp(sys, part, tt, 0.2).model;
  REQUIRE(a.num_vars() == b.num_vars());
  REQUIRE(a.num_rows() == b.num_rows());
  CHECK(a.cost() == b.cost());
  CHECK(a.lower() == b.lower());
  CHECK(a.upper() == b.upper());
  for (int r = 0; r < a.num_rows(); ++r) {
    CHECK(a.rows()[r].index == b.rows()[r].index);
    CHECK(a.rows()[r].value == b.rows()[r].value);
    CHECK(a.rows()[r].lo == b.rows()[r].lo);
    CHECK(a.rows()[r].hi == b.rows()[r].hi);
  }
}

TEST_CASE("PP matches exhaustive enumeration on a tiny instance") {
  ccpart::Rng rng(36, 0);
  int solved = 0;
  for (int t = 0; t < 20; ++t) {
    const auto sys = random_system(rng, 2);
    const auto part = random_partition(rng, 3, 60);
    const auto tt = compute_tightening(sys, part);
    const auto s = build_pp(sys, part, tt, 0.3);
    REQUIRE(s.model.num_binaries() <= 14);
    const auto ref = oracle::exhaustive_milp(s.model);
    const auto got = solve_surrogate(s);
    CHECK(got.ok() == ref.feasible);
    if (ref.feasible && got.ok()) {
      ++solved;
      CHECK(got.objective == doctest::Approx(ref.value).epsilon(1e-6));
    }
  }
  CHECK(solved > 0);
}

TEST_CASE("PP solutions are robust, costed correctly, and feasible for RP") {
  ccpart::Rng rng(37, 0);
  const double eps = 0.3, delta = 0.1;
  int feasible = 0;
  for (int t = 0; t < 100; ++t) {
    const auto sys = random_system(rng, 2);
    const auto part = random_partition(rng, 4, 100);
    const auto tt = compute_tightening(sys, part);
    const auto pp = solve_surrogate(build_pp(sys, part, tt, eps - delta));
    const auto rps = build_rp(sys, part, tt, eps + delta);
    const auto rp = solve_surrogate(rps);
    if (!pp.ok()) continue;
    ++feasible;
    REQUIRE(rp.ok());
    CHECK(rp.objective <= pp.objective + 1e-6);
    CHECK(pp.objective == doctest::Approx(partition_cost(sys, part, pp.x)).epsilon(1e-6));

    double cov = 0;
    for (int j = 0; j < part.K(); ++j) {
      if (!pp.cover[j]) continue;
      cov += part.cells[j].mass;
      const int h = pp.branch[j];
      REQUIRE(h >= 0);
      const auto& br = sys.branches[h];
      for (const auto& v : box_vertices(*part.cells[j].box))
        CHECK(((br.C * pp.x + br.D * v + br.b).array() <= 1e-7).all());
    }
    CHECK(cov >= 1 - (eps - delta) - 1e-9);

    auto fixed = rps;
    for (int i = 0; i < 2; ++i) fixed.model.set_bounds(fixed.x_var[i], pp.x[i], pp.x[i]);
    CHECK(solve_surrogate(fixed).ok());
  }
  CHECK(feasible >= 20);
}

TEST_CASE("greedy selection covers the sorted prefix") {
  ccpart::Rng rng(38, 0);
  const auto sys = random_system(rng, 2);
  const auto part = random_partition(rng, 6, 200);
  const auto tt = compute_tightening(sys, part);
  SurrogateOptions opt;
  opt.selection = Selection::kGreedy;
  const auto s = build_pp(sys, part, tt, 0.2, opt);
  const auto z = greedy_cover(part.masses(), 0.2);
  for (int j = 0; j < part.K(); ++j) {
    CHECK(s.z_var[j] == -1);
    CHECK(s.z_fixed[j] == z[j]);
  }
}

TEST_CASE("surrogate errors") {
  ccpart::Rng rng(39, 0);
  const auto sys = random_system(rng, 3);
  const auto part = random_partition(rng, 4, 50);
  const auto tt = compute_tightening(sys, part);
  SurrogateOptions opt;
  opt.max_binaries = 11;
  try {
    build_pp(sys, part, tt, 0.1, opt);
    FAIL("expected an error");
  } catch (const ccpart::Error& e) {
    CHECK(e.code() == ErrorCode::kModelTooLarge);
  }
  CHECK_THROWS_AS(build_pp(sys, part, tt, 1.0), ccpart::Error);
  CHECK_THROWS_AS(greedy_cover(Vec::Constant(2, 0.25), 0.1), ccpart::Error);
}
