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

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace ccpart::geometry {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kTol = 1e-9;

enum class Emptiness { kUnknown, kNonEmpty, kEmpty };

// {x : A x <= b}.
class Polytope {
 public:
  Polytope() = default;
  Polytope(Mat A, Vec b, Emptiness state = Emptiness::kUnknown);

  const Mat& A() const { return A_; }
  const Vec& b() const { return b_; }
  Eigen::Index dim() const { return A_.cols(); }
  Eigen::Index rows() const { return A_.rows(); }
  Emptiness emptiness() const { return state_; }

  bool contains(const Vec& p, double tol = kTol) const;
  // Rows of both; emptiness unknown.
  Polytope intersect(const Polytope& other) const;
  // Same set with the emptiness flag settled by one LP.
  Polytope checked() const;

 private:
  Mat A_;
  Vec b_;
  Emptiness state_ = Emptiness::kUnknown;
};

class Box {
 public:
  Box() = default;
  Box(Vec lo, Vec hi);

  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  Eigen::Index dim() const { return lo_.size(); }
  Vec center() const { return 0.5 * (lo_ + hi_); }
  Vec widths() const { return hi_ - lo_; }
  // q-norm of hi - lo; q = infinity is the max edge.
  double diameter(double q) const;
  double volume() const;
  bool contains(const Vec& p, double tol = 0.0) const;
  Polytope to_polytope() const;

 private:
  Vec lo_, hi_;
};

bool is_empty(const Polytope& p);

struct LinearMax {
  double value;
  Vec argmax;
};

// max c'θ over the cell. Throws Error(kInfeasible) / Error(kUnbounded).
LinearMax linear_maximize(const Polytope& cell, const Vec& c);
double linear_max(const Polytope& cell, const Vec& c);

// Vertices of a bounded nonempty 2-D polytope, counterclockwise from the
// lowest-then-leftmost one, duplicates within tol merged.
std::vector<Vec> vertices_2d(const Polytope& p, double tol = kTol);

// Two-sided Hausdorff distance between unions of polytopes of dimension 1 or 2.
double hausdorff_exact(const std::vector<Polytope>& a, const std::vector<Polytope>& b);
// sup over a in A of the distance from a to B.
double directed_hausdorff(const std::vector<Polytope>& a, const std::vector<Polytope>& b);
// Distance from a point to a union of bounded polytopes (dimension 1 or 2).
double distance_to_union(const Vec& p, const std::vector<Polytope>& pieces);

// Minimum over invertible n-by-n row submatrices of C (n = C.cols()) of the
// smallest singular value.
double sigma_constant(const Mat& C, std::size_t cap = 50000, double tol = kTol);
// Number of row subsets sigma_constant would examine; saturates at SIZE_MAX.
std::size_t row_subset_count(std::size_t rows, std::size_t n);

// Center of the largest inscribed ball; radius returned through *radius.
Vec chebyshev_center(const Polytope& p, double* radius = nullptr);
// True when the intersection contains a ball of radius > margin.
bool interiors_overlap(const Polytope& p, const Polytope& q, double margin = kTol);

}  // namespace ccpart::geometry
