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

#include "ccpart/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccpart/error.hpp"
#include "ccpart/lp.hpp"

namespace ccpart::geometry {

using solver::kInf;
using solver::LpProblem;
using solver::LpStatus;

Polytope::Polytope(Mat A, Vec b, Emptiness state)
    : A_(std::move(A)), b_(std::move(b)), state_(state) {
  require(A_.rows() == b_.size(), "Polytope: row count of A must equal length of b");
}

bool Polytope::contains(const Vec& p, double tol) const {
  require(p.size() == dim(), "Polytope::contains: dimension mismatch");
  for (Eigen::Index i = 0; i < rows(); ++i)
    if (A_.row(i).dot(p) > b_[i] + tol) return false;
  return true;
}

Polytope Polytope::intersect(const Polytope& other) const {
  require(other.dim() == dim(), "Polytope::intersect: dimension mismatch");
  Mat A(rows() + other.rows(), dim());
  A << A_, other.A_;
  Vec b(rows() + other.rows());
  b << b_, other.b_;
  return Polytope(std::move(A), std::move(b));
}

Polytope Polytope::checked() const {
  return Polytope(A_, b_, is_empty(*this) ? Emptiness::kEmpty : Emptiness::kNonEmpty);
}

Box::Box(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  require(lo_.size() == hi_.size(), "Box: lo and hi must have equal length");
  for (Eigen::Index i = 0; i < lo_.size(); ++i)
    require(lo_[i] <= hi_[i], "Box: lo must not exceed hi");
}

double Box::diameter(double q) const {
  const Vec w = widths();
  if (std::isinf(q)) return w.size() ? w.maxCoeff() : 0.0;
  require(q >= 1.0, "Box::diameter: q must be >= 1");
  double s = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) s += std::pow(w[i], q);
  return std::pow(s, 1.0 / q);
}

double Box::volume() const {
  double v = 1.0;
  for (Eigen::Index i = 0; i < lo_.size(); ++i) v *= hi_[i] - lo_[i];
  return v;
}

bool Box::contains(const Vec& p, double tol) const {
  for (Eigen::Index i = 0; i < lo_.size(); ++i)
    if (p[i] < lo_[i] - tol || p[i] > hi_[i] + tol) return false;
  return true;
}

Polytope Box::to_polytope() const {
  const Eigen::Index n = dim();
  Mat A(2 * n, n);
  A << Mat::Identity(n, n), -Mat::Identity(n, n);
  Vec b(2 * n);
  b << hi_, -lo_;
  return Polytope(std::move(A), std::move(b), Emptiness::kNonEmpty);
}

namespace {

LpProblem free_lp(const Polytope& p, const Vec& minimize) {
  const Eigen::Index n = p.dim();
  return LpProblem::from_inequalities(minimize, p.A(), p.b(), Vec::Constant(n, -kInf),
                                      Vec::Constant(n, kInf));
}

}  // namespace

bool is_empty(const Polytope& p) {
  if (p.emptiness() != Emptiness::kUnknown) return p.emptiness() == Emptiness::kEmpty;
  const auto r = solver::solve_lp(free_lp(p, Vec::Zero(p.dim())));
  if (r.status == LpStatus::kIterationLimit)
    fail(ErrorCode::kIterationLimit, "emptiness check hit the LP iteration limit");
  return r.status == LpStatus::kInfeasible;
}

LinearMax linear_maximize(const Polytope& cell, const Vec& c) {
  require(c.size() == cell.dim(), "linear_max: direction dimension mismatch");
  const auto r = solver::solve_lp(free_lp(cell, -c));
  switch (r.status) {
    case LpStatus::kOptimal: return {c.dot(r.x), r.x};
    case LpStatus::kInfeasible: fail(ErrorCode::kInfeasible, "linear_max: empty cell");
    case LpStatus::kUnbounded: fail(ErrorCode::kUnbounded, "linear_max: cell unbounded along c");
    case LpStatus::kIterationLimit: break;
  }
  fail(ErrorCode::kIterationLimit, "linear_max: LP iteration limit");
}

double linear_max(const Polytope& cell, const Vec& c) { return linear_maximize(cell, c).value; }

std::vector<Vec> vertices_2d(const Polytope& p, double tol) {
  if (p.dim() != 2) fail(ErrorCode::kDimensionUnsupported, "vertices_2d needs dimension 2");
  if (is_empty(p)) fail(ErrorCode::kEmptySet, "vertices_2d: empty polytope");
  for (int k = 0; k < 4; ++k) {
    Vec d = Vec::Zero(2);
    d[k / 2] = (k % 2) ? -1.0 : 1.0;
    linear_max(p, d);  // throws Unbounded
  }
  const Mat& A = p.A();
  const Vec& b = p.b();
  std::vector<Vec> pts;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < A.rows(); ++j) {
      const double det = A(i, 0) * A(j, 1) - A(i, 1) * A(j, 0);
      const double scale = A.row(i).norm() * A.row(j).norm();
      if (std::abs(det) <= tol * std::max(1.0, scale)) continue;
      Vec v(2);
      v[0] = (b[i] * A(j, 1) - A(i, 1) * b[j]) / det;
      v[1] = (A(i, 0) * b[j] - b[i] * A(j, 0)) / det;
      bool ok = true;
      for (Eigen::Index k = 0; k < A.rows() && ok; ++k) {
        const double slack = tol * (1.0 + std::abs(b[k]) + A.row(k).norm() * v.norm());
        ok = A.row(k).dot(v) <= b[k] + slack;
      }
      if (!ok) continue;
      bool dup = false;
      for (const Vec& q : pts)
        if ((q - v).lpNorm<Eigen::Infinity>() <= tol * std::max(1.0, v.lpNorm<Eigen::Infinity>())) {
          dup = true;
          break;
        }
      if (!dup) pts.push_back(v);
    }
  }
  if (pts.empty()) {
    // Bounded and nonempty without two independent tight rows cannot happen
    // in 2-D except through tolerance loss; fall back to a single point.
    pts.push_back(chebyshev_center(p));
  }
  Vec c = Vec::Zero(2);
  for (const Vec& q : pts) c += q;
  c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Vec& u, const Vec& v) {
    return std::atan2(u[1] - c[1], u[0] - c[0]) < std::atan2(v[1] - c[1], v[0] - c[0]);
  });
  std::size_t start = 0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const Vec& s = pts[start];
    const Vec& q = pts[k];
    if (q[1] < s[1] - tol || (std::abs(q[1] - s[1]) <= tol && q[0] < s[0])) start = k;
  }
  std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(start), pts.end());
  return pts;
}

namespace {

struct Interval {
  double lo, hi;
};

Interval interval_of(const Polytope& p) {
  Vec one = Vec::Ones(1);
  const double hi = linear_max(p, one);
  const double lo = -linear_max(p, -one);
  return {lo, hi};
}

void check_pieces(const std::vector<Polytope>& s) {
  if (s.empty()) fail(ErrorCode::kEmptySet, "hausdorff: empty union");
  const Eigen::Index d = s.front().dim();
  if (d < 1 || d > 2) fail(ErrorCode::kDimensionUnsupported, "hausdorff_exact supports dims 1-2");
  for (const auto& p : s) {
    if (p.dim() != d) fail(ErrorCode::kInvalidArgument, "hausdorff: mixed dimensions");
    if (is_empty(p)) fail(ErrorCode::kEmptySet, "hausdorff: empty piece");
  }
}

double point_interval_distance(double x, const Interval& iv) {
  if (x < iv.lo) return iv.lo - x;
  if (x > iv.hi) return x - iv.hi;
  return 0.0;
}

double directed_1d(const std::vector<Interval>& a, std::vector<Interval> b) {
  std::sort(b.begin(), b.end(), [](const Interval& u, const Interval& v) { return u.lo < v.lo; });
  auto dist = [&](double x) {
    double d = kInf;
    for (const auto& iv : b) d = std::min(d, point_interval_distance(x, iv));
    return d;
  };
  double worst = 0.0;
  for (const auto& iv : a) {
    std::vector<double> cand = {iv.lo, iv.hi};
    // The distance to a union of intervals peaks mid-gap.
    double reach = -kInf;
    for (std::size_t k = 0; k < b.size(); ++k) {
      reach = std::max(reach, b[k].hi);
      if (k + 1 < b.size() && b[k + 1].lo > reach) {
        const double mid = 0.5 * (reach + b[k + 1].lo);
        if (mid > iv.lo && mid < iv.hi) cand.push_back(mid);
      }
    }
    for (double x : cand) worst = std::max(worst, dist(x));
  }
  return worst;
}

double segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  const Vec e = b - a;
  const double ee = e.squaredNorm();
  double t = ee > 0 ? (p - a).dot(e) / ee : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * e - p).norm();
}

struct Piece2 {
  Polytope poly;
  std::vector<Vec> v;  // counterclockwise
};

double polygon_distance(const Vec& p, const Piece2& piece) {
  const auto& v = piece.v;
  if (v.size() == 1) return (p - v[0]).norm();
  if (v.size() == 2) return segment_distance(p, v[0], v[1]);
  bool inside = true;
  for (std::size_t k = 0; k < v.size() && inside; ++k) {
    const Vec& a = v[k];
    const Vec& b = v[(k + 1) % v.size()];
    const double cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    inside = cross >= 0.0;
  }
  if (inside) return 0.0;
  double d = kInf;
  for (std::size_t k = 0; k < v.size(); ++k) d = std::min(d, segment_distance(p, v[k], v[(k + 1) % v.size()]));
  return d;
}

struct Line {
  Vec n;  // unit normal
  double c;
  double signed_distance(const Vec& p) const { return n.dot(p) - c; }
};

std::vector<Line> edge_lines(const Piece2& piece) {
  std::vector<Line> out;
  const auto& v = piece.v;
  const std::size_t edges = v.size() == 2 ? 1 : (v.size() >= 3 ? v.size() : 0);
  for (std::size_t k = 0; k < edges; ++k) {
    const Vec& a = v[k];
    const Vec& b = v[(k + 1) % v.size()];
    Vec n(2);
    n << (b[1] - a[1]), -(b[0] - a[0]);
    const double len = n.norm();
    if (len <= 0) continue;
    n /= len;
    out.push_back({n, n.dot(a)});
  }
  return out;
}

// Real roots of a t^2 + b t + c = 0.
std::vector<double> quadratic_roots(double a, double b, double c) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300});
  if (std::abs(a) <= 1e-14 * scale) {
    if (std::abs(b) <= 1e-14 * scale) return {};
    return {-c / b};
  }
  double disc = b * b - 4 * a * c;
  if (disc < 0) {
    if (disc > -1e-12 * std::max(b * b, std::abs(4 * a * c))) disc = 0;
    else return {};
  }
  const double s = std::sqrt(disc);
  // Numerically stable form.
  const double q = -0.5 * (b + (b >= 0 ? s : -s));
  std::vector<double> r;
  if (q != 0) r.push_back(c / q);
  r.push_back(q / a);
  return r;
}

// Points p = o + t d with |p - q|^2 = (n'p - c)^2.
void point_line_ties(const Vec& o, const Vec& d, const Vec& q, const Line& L,
                     std::vector<double>& ts) {
  const Vec w = o - q;
  const double nd = L.n.dot(d);
  const double no = L.signed_distance(o);
  const double a = d.squaredNorm() - nd * nd;
  const double b = 2 * (d.dot(w) - nd * no);
  const double c = w.squaredNorm() - no * no;
  for (double t : quadratic_roots(a, b, c)) ts.push_back(t);
}

bool solve2(double a11, double a12, double a21, double a22, double b1, double b2, Vec& x) {
  const double det = a11 * a22 - a12 * a21;
  const double scale = std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
  if (std::abs(det) <= 1e-12 * std::max(1e-300, scale * scale)) return false;
  x.resize(2);
  x[0] = (b1 * a22 - a12 * b2) / det;
  x[1] = (a11 * b2 - b1 * a21) / det;
  return x.allFinite();
}

// Line {p : g'p = h} as origin + direction; false when g ~ 0.
bool line_param(const Vec& g, double h, Vec& o, Vec& d) {
  const double gg = g.squaredNorm();
  if (gg <= 1e-24) return false;
  o = g * (h / gg);
  d.resize(2);
  d << -g[1], g[0];
  return true;
}

double directed_2d(const std::vector<Piece2>& a, const std::vector<Piece2>& b) {
  std::vector<Vec> pts;
  std::vector<Line> lines;
  for (const auto& piece : b) {
    for (const Vec& v : piece.v) pts.push_back(v);
    for (const Line& l : edge_lines(piece)) lines.push_back(l);
  }
  auto f = [&](const Vec& p) {
    double d = kInf;
    for (const auto& piece : b) d = std::min(d, polygon_distance(p, piece));
    return d;
  };

  double worst = 0.0;
  for (const auto& piece : a) {
    std::vector<Vec> cand = piece.v;
    const auto& V = piece.v;
    // Ties of two features along each edge.
    const std::size_t edges = V.size() == 2 ? 1 : (V.size() >= 3 ? V.size() : 0);
    for (std::size_t k = 0; k < edges; ++k) {
      const Vec o = V[k];
      const Vec d = V[(k + 1) % V.size()] - o;
      std::vector<double> ts;
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
          const Vec w = pts[j] - pts[i];
          const double den = 2 * d.dot(w);
          if (std::abs(den) <= 1e-300) continue;
          ts.push_back(-(2 * o.dot(w) + pts[i].squaredNorm() - pts[j].squaredNorm()) / den);
        }
      for (const Vec& q : pts)
        for (const Line& L : lines) point_line_ties(o, d, q, L, ts);
      for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j)
          for (double s : {1.0, -1.0}) {
            const Vec g = lines[i].n - s * lines[j].n;
            const double den = g.dot(d);
            if (std::abs(den) <= 1e-14) continue;
            ts.push_back((lines[i].c - s * lines[j].c - g.dot(o)) / den);
          }
      for (double t : ts)
        if (t > 0.0 && t < 1.0 && std::isfinite(t)) cand.push_back(o + t * d);
    }
    // Three-feature ties inside the piece.
    if (V.size() >= 3) {
      std::vector<Vec> inner;
      const std::size_t P = pts.size(), L = lines.size();
      for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = i + 1; j < P; ++j)
          for (std::size_t k = j + 1; k < P; ++k) {
            const Vec u = pts[j] - pts[i], w = pts[k] - pts[i];
            Vec x;
            if (solve2(2 * u[0], 2 * u[1], 2 * w[0], 2 * w[1],
                       pts[j].squaredNorm() - pts[i].squaredNorm(),
                       pts[k].squaredNorm() - pts[i].squaredNorm(), x))
              inner.push_back(x);
          }
      for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i + 1; j < L; ++j)
          for (std::size_t k = j + 1; k < L; ++k)
            for (double s2 : {1.0, -1.0})
              for (double s3 : {1.0, -1.0}) {
                const Vec g1 = lines[i].n - s2 * lines[j].n;
                const Vec g2 = lines[i].n - s3 * lines[k].n;
                Vec x;
                if (solve2(g1[0], g1[1], g2[0], g2[1], lines[i].c - s2 * lines[j].c,
                           lines[i].c - s3 * lines[k].c, x))
                  inner.push_back(x);
              }
      // point + two lines
      for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i + 1; j < L; ++j)
          for (double s : {1.0, -1.0}) {
            Vec o, d;
            if (!line_param(lines[i].n - s * lines[j].n, lines[i].c - s * lines[j].c, o, d))
              continue;
            for (const Vec& q : pts) {
              std::vector<double> ts;
              point_line_ties(o, d, q, lines[i], ts);
              for (double t : ts) inner.push_back(o + t * d);
            }
          }
      // two points + line
      for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = i + 1; j < P; ++j) {
          const Vec g = 2 * (pts[j] - pts[i]);
          Vec o, d;
          if (!line_param(g, pts[j].squaredNorm() - pts[i].squaredNorm(), o, d)) continue;
          for (const Line& Ln : lines) {
            std::vector<double> ts;
            point_line_ties(o, d, pts[i], Ln, ts);
            for (double t : ts) inner.push_back(o + t * d);
          }
        }
      for (const Vec& x : inner)
        if (x.allFinite() && piece.poly.contains(x, 1e-12 * (1.0 + x.norm()))) cand.push_back(x);
    }
    for (const Vec& x : cand) worst = std::max(worst, f(x));
  }
  return worst;
}

std::vector<Piece2> pieces_2d(const std::vector<Polytope>& s) {
  std::vector<Piece2> out;
  for (const auto& p : s) out.push_back({p, vertices_2d(p)});
  return out;
}

}  // namespace

double directed_hausdorff(const std::vector<Polytope>& a, const std::vector<Polytope>& b) {
  check_pieces(a);
  check_pieces(b);
  if (a.front().dim() != b.front().dim())
    fail(ErrorCode::kInvalidArgument, "hausdorff: dimension mismatch");
  if (a.front().dim() == 1) {
    std::vector<Interval> ia, ib;
    for (const auto& p : a) ia.push_back(interval_of(p));
    for (const auto& p : b) ib.push_back(interval_of(p));
    return directed_1d(ia, ib);
  }
  return directed_2d(pieces_2d(a), pieces_2d(b));
}

double hausdorff_exact(const std::vector<Polytope>& a, const std::vector<Polytope>& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double distance_to_union(const Vec& p, const std::vector<Polytope>& pieces) {
  check_pieces(pieces);
  if (pieces.front().dim() == 1) {
    double d = kInf;
    for (const auto& q : pieces) d = std::min(d, point_interval_distance(p[0], interval_of(q)));
    return d;
  }
  double d = kInf;
  for (const auto& piece : pieces_2d(pieces)) d = std::min(d, polygon_distance(p, piece));
  return d;
}

std::size_t row_subset_count(std::size_t rows, std::size_t n) {
  if (n > rows) return 0;
  n = std::min(n, rows - n);
  std::size_t c = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t num = rows - n + k;
    if (c > std::numeric_limits<std::size_t>::max() / num) return std::numeric_limits<std::size_t>::max();
    c = c * num / k;
  }
  return c;
}

double sigma_constant(const Mat& C, std::size_t cap, double tol) {
  const std::size_t m = static_cast<std::size_t>(C.rows());
  const std::size_t n = static_cast<std::size_t>(C.cols());
  require(n >= 1 && m >= n, "sigma_constant: need at least n rows of width n");
  if (row_subset_count(m, n) > cap)
    fail(ErrorCode::kCombinatorialBlowup, "sigma_constant: too many row subsets");
  std::vector<std::size_t> idx(n);
  for (std::size_t k = 0; k < n; ++k) idx[k] = k;
  double best = kInf;
  Mat G(n, n);
  while (true) {
    for (std::size_t k = 0; k < n; ++k) G.row(static_cast<Eigen::Index>(k)) = C.row(static_cast<Eigen::Index>(idx[k]));
    Eigen::SelfAdjointEigenSolver<Mat> eig(G.transpose() * G, Eigen::EigenvaluesOnly);
    const double lam = std::max(0.0, eig.eigenvalues()[0]);
    const double s = std::sqrt(lam);
    if (s > tol) best = std::min(best, s);
    // next combination
    std::size_t k = n;
    while (k > 0 && idx[k - 1] == m - n + k - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t t = k; t < n; ++t) idx[t] = idx[t - 1] + 1;
  }
  if (!std::isfinite(best)) fail(ErrorCode::kNoInvertibleSubmatrix, "sigma_constant: no invertible submatrix");
  return best;
}

Vec chebyshev_center(const Polytope& p, double* radius) {
  const Eigen::Index n = p.dim();
  const Eigen::Index m = p.rows();
  Mat A(m, n + 1);
  A.leftCols(n) = p.A();
  for (Eigen::Index i = 0; i < m; ++i) A(i, n) = p.A().row(i).norm();
  Vec c = Vec::Zero(n + 1);
  c[n] = -1.0;
  Vec lo = Vec::Constant(n + 1, -kInf), hi = Vec::Constant(n + 1, kInf);
  lo[n] = 0.0;
  hi[n] = 1e9;
  const auto r = solver::solve_lp(LpProblem::from_inequalities(c, A, p.b(), lo, hi));
  if (r.status == LpStatus::kInfeasible) fail(ErrorCode::kEmptySet, "chebyshev_center: empty polytope");
  if (r.status != LpStatus::kOptimal) fail(ErrorCode::kUnbounded, "chebyshev_center: LP failed");
  if (radius) *radius = r.x[n];
  return r.x.head(n);
}

bool interiors_overlap(const Polytope& p, const Polytope& q, double margin) {
  double r = 0.0;
  try {
    chebyshev_center(p.intersect(q), &r);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptySet) return false;
    throw;
  }
  return r > margin;
}

}  // namespace ccpart::geometry
