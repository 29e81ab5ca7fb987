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

#include "ccpart/error.hpp"
#include "ccpart/lp.hpp"

#include "doctest.h"
#include "oracles.hpp"

using namespace ccpart::solver;
using oracle::Mat;
using oracle::Vec;

namespace {

LpProblem le_problem(const Vec& c, const Mat& A, const Vec& b, double lo, double hi) {
  const Eigen::Index n = c.size();
  return LpProblem::from_inequalities(c, A, b, Vec::Constant(n, lo), Vec::Constant(n, hi));
}

}  // namespace

TEST_CASE("maximize x with x <= 3") {
  Mat A(1, 1);
  A << 1;
  const auto r = solve_lp(le_problem(Vec::Constant(1, -1.0), A, Vec::Constant(1, 3.0), 0.0, kInf));
  REQUIRE(r.optimal());
  CHECK(r.x[0] == doctest::Approx(3.0));
}

TEST_CASE("min x + y with x + y >= 1") {
  LpProblem p;
  p.objective = Vec::Ones(2);
  p.A = Mat::Ones(1, 2);
  p.row_lo = Vec::Constant(1, 1.0);
  p.row_hi = Vec::Constant(1, kInf);
  p.col_lo = Vec::Zero(2);
  p.col_hi = Vec::Constant(2, kInf);
  const auto r = solve_lp(p);
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(1.0));
  CHECK(r.residual <= 1e-8);
}

TEST_CASE("infeasible and unbounded are reported") {
  Mat A(2, 1);
  A << 1, -1;
  Vec b(2);
  b << -1, -1;  // x <= -1 and x >= 1
  CHECK(solve_lp(le_problem(Vec::Ones(1), A, b, -kInf, kInf)).status == LpStatus::kInfeasible);
  Mat B(1, 1);
  B << 1;
  CHECK(solve_lp(le_problem(Vec::Constant(1, -1.0), B, Vec::Constant(1, 1.0), -kInf, kInf)).status ==
        LpStatus::kOptimal);
  CHECK(solve_lp(le_problem(Vec::Constant(1, 1.0), B, Vec::Constant(1, 1.0), -kInf, kInf)).status ==
        LpStatus::kUnbounded);
}

TEST_CASE("equality rows and fixed columns") {
  LpProblem p;
  p.objective = Vec::Ones(3);
  p.A = Mat::Ones(1, 3);
  p.row_lo = p.row_hi = Vec::Constant(1, 2.0);
  p.col_lo = Vec::Zero(3);
  p.col_hi = Vec::Constant(3, kInf);
  p.col_lo[2] = p.col_hi[2] = 0.5;
  const auto r = solve_lp(p);
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(2.0));
  CHECK(r.x[2] == doctest::Approx(0.5));
}

TEST_CASE("random two-variable LPs agree with vertex enumeration") {
  ccpart::Rng rng(101, 0);
  for (int t = 0; t < 300; ++t) {
    const int m = 10;
    Mat A = oracle::random_matrix(rng, m, 2);
    Vec b = oracle::random_vector(rng, m, 0.1, 1.0);  // origin feasible
    // Box rows keep every instance bounded.
    Mat Ab(m + 4, 2);
    Ab << A, Mat::Identity(2, 2), -Mat::Identity(2, 2);
    Vec bb(m + 4);
    bb << b, Vec::Constant(4, 5.0);
    const Vec c = oracle::random_vector(rng, 2);
    const auto r = solve_lp(le_problem(c, Ab, bb, -kInf, kInf));
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(oracle::lp_by_vertices(c, Ab, bb)).epsilon(1e-7));
  }
}

TEST_CASE("random 10x20 LPs satisfy strong duality") {
  ccpart::Rng rng(202, 0);
  for (int t = 0; t < 200; ++t) {
    const Mat A = oracle::random_matrix(rng, 10, 20);
    const Vec x0 = oracle::random_vector(rng, 20, 0.0, 1.0);
    const Vec b = A * x0 + oracle::random_vector(rng, 10, 0.0, 0.5);
    const Vec c = oracle::random_vector(rng, 20, 0.1, 1.0);  // c > 0, x >= 0: bounded
    const auto r = solve_lp(le_problem(c, A, b, 0.0, kInf));
    REQUIRE(r.optimal());
    CHECK(r.residual <= 1e-8);
    CHECK(((A * r.x - b).array() <= 1e-9).all());
    const Vec& y = r.row_duals;
    CHECK((y.array() <= 1e-9).all());
    CHECK(((c - A.transpose() * y).array() >= -1e-9).all());
    CHECK(r.objective == doctest::Approx(y.dot(b)).epsilon(1e-7));
  }
}

TEST_CASE("validate rejects crossed bounds") {
  LpProblem p = le_problem(Vec::Ones(1), Mat::Ones(1, 1), Vec::Ones(1), 2.0, 1.0);
  CHECK_THROWS_AS(p.validate(), ccpart::Error);
}
