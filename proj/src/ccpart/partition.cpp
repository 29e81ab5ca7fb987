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

#include "ccpart/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccpart/error.hpp"
#include "ccpart/rng.hpp"

namespace ccpart::partition {

bool Cell::contains(const Vec& theta, double tol) const {
  if (box) return box->contains(theta, tol);
  return region.contains(theta, tol);
}

Vec Partition::masses() const {
  Vec m(K());
  for (int j = 0; j < K(); ++j) m[j] = cells[j].mass;
  return m;
}

Mat Partition::representatives() const {
  Mat r(K(), domain.dim());
  for (int j = 0; j < K(); ++j) r.row(j) = cells[j].representative.transpose();
  return r;
}

namespace {

Regions from_boxes(const Box& domain, const std::vector<Box>& boxes) {
  Regions r;
  r.domain = domain;
  for (const Box& b : boxes) {
    r.cells.push_back(b.to_polytope());
    r.boxes.emplace_back(b);
  }
  return r;
}

std::vector<Box> halving(const Box& domain, const std::vector<int>& dims, int K) {
  require(K >= 1, "partition: K must be at least 1");
  std::vector<Box> cells = {domain};  // kept in creation order
  while (static_cast<int>(cells.size()) < K) {
    int best_cell = -1, best_dim = -1;
    double best_len = -1.0;
    for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
      for (int d : dims) {
        const double len = cells[c].hi()[d] - cells[c].lo()[d];
        // Strictly longer wins; equal lengths keep the lower dimension, then
        // the older cell.
        if (len > best_len || (len == best_len && d < best_dim)) {
          best_len = len;
          best_dim = d;
          best_cell = c;
        }
      }
    }
    const Box& b = cells[best_cell];
    const double mid = 0.5 * (b.lo()[best_dim] + b.hi()[best_dim]);
    Vec hi1 = b.hi(), lo2 = b.lo();
    hi1[best_dim] = mid;
    lo2[best_dim] = mid;
    Box first(b.lo(), hi1), second(lo2, b.hi());
    cells.erase(cells.begin() + best_cell);
    cells.push_back(first);
    cells.push_back(second);
  }
  return cells;
}

}  // namespace

Regions grid_partition(const Box& domain, int K) {
  std::vector<int> dims(static_cast<std::size_t>(domain.dim()));
  std::iota(dims.begin(), dims.end(), 0);
  return from_boxes(domain, halving(domain, dims, K));
}

Regions adaptive_split(const Box& domain, const std::vector<int>& critical_coords, int K) {
  require(!critical_coords.empty(), "adaptive_split: no critical coordinates");
  std::vector<int> dims = critical_coords;
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  for (int d : dims) require(d >= 0 && d < domain.dim(), "adaptive_split: coordinate out of range");
  return from_boxes(domain, halving(domain, dims, K));
}

Regions voronoi_partition(const Box& domain, const SampleSet& samples, int K, std::uint64_t seed,
                          KMeansInfo* info) {
  const Eigen::Index N = samples.size();
  const Eigen::Index n = samples.dim();
  require(K >= 1, "voronoi_partition: K must be at least 1");
  require(n == domain.dim(), "voronoi_partition: sample dimension differs from the domain");
  require(N >= K, "voronoi_partition: need at least K samples");
  const Mat& X = samples.samples;

  // Seeded draw of K distinct points: shuffle indices, keep first distinct ones.
  Rng rng(seed, make_stream(StreamTag::kClustering, 0, 0));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  for (Eigen::Index i = N - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[i], order[j]);
  }
  Mat C(K, n);
  int chosen = 0;
  for (Eigen::Index idx : order) {
    bool dup = false;
    for (int c = 0; c < chosen && !dup; ++c) dup = (C.row(c) - X.row(idx)).squaredNorm() == 0.0;
    if (dup) continue;
    C.row(chosen++) = X.row(idx);
    if (chosen == K) break;
  }
  if (chosen < K) fail(ErrorCode::kDegenerateClustering, "fewer than K distinct samples");

  std::vector<int> label(static_cast<std::size_t>(N), 0);
  int it = 0;
  if (K == 1) {
    C.row(0) = X.colwise().mean();
  } else {
    for (it = 1; it <= 100; ++it) {
      for (Eigen::Index i = 0; i < N; ++i) {
        int best = 0;
        double bd = (X.row(i) - C.row(0)).squaredNorm();
        for (int c = 1; c < K; ++c) {
          const double d = (X.row(i) - C.row(c)).squaredNorm();
          if (d < bd) {
            bd = d;
            best = c;
          }
        }
        label[i] = best;
      }
      Mat sum = Mat::Zero(K, n);
      std::vector<long> cnt(K, 0);
      for (Eigen::Index i = 0; i < N; ++i) {
        sum.row(label[i]) += X.row(i);
        ++cnt[label[i]];
      }
      double motion = 0.0;
      for (int c = 0; c < K; ++c) {
        if (cnt[c] == 0) continue;  // empty cluster keeps its centroid
        const Vec next = (sum.row(c) / static_cast<double>(cnt[c])).transpose();
        motion = std::max(motion, (next - C.row(c).transpose()).norm());
        C.row(c) = next.transpose();
      }
      if (motion <= 1e-8) break;
    }
    it = std::min(it, 100);
  }
  if (info) {
    info->centroids = C;
    info->iterations = it;
  }

  Regions r;
  r.domain = domain;
  const Polytope box = domain.to_polytope();
  for (int j = 0; j < K; ++j) {
    Mat A(2 * n + (K - 1), n);
    Vec b(2 * n + (K - 1));
    A.topRows(2 * n) = box.A();
    b.head(2 * n) = box.b();
    Eigen::Index row = 2 * n;
    for (int i = 0; i < K; ++i) {
      if (i == j) continue;
      A.row(row) = 2.0 * (C.row(i) - C.row(j));
      b[row] = C.row(i).squaredNorm() - C.row(j).squaredNorm();
      ++row;
    }
    r.cells.emplace_back(std::move(A), std::move(b));
    r.boxes.emplace_back(std::nullopt);
  }
  return r;
}

Partition summarize(const Regions& regions, const SampleSet& samples) {
  const Eigen::Index N = samples.size();
  const Eigen::Index n = samples.dim();
  require(N >= 1, "summarize: empty sample set");
  require(n == regions.domain.dim(), "summarize: sample dimension differs from the domain");
  require(regions.size() >= 1, "summarize: no cells");
  Partition p;
  p.domain = regions.domain;
  p.num_samples = N;
  for (int j = 0; j < regions.size(); ++j) {
    Cell c;
    c.region = regions.cells[j];
    c.box = regions.boxes[j];
    p.cells.push_back(std::move(c));
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    const Vec theta = samples.samples.row(i).transpose();
    bool placed = false;
    for (auto& c : p.cells) {
      if (c.contains(theta)) {
        c.members.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed)
      fail(ErrorCode::kSampleOutsideDomain, "sample " + std::to_string(i) + " lies in no cell");
  }
  for (auto& c : p.cells) {
    c.count = static_cast<long>(c.members.size());
    c.mass = static_cast<double>(c.count) / static_cast<double>(N);
    if (c.count == 0) {
      c.representative = c.box ? c.box->center() : geometry::chebyshev_center(c.region);
    } else {
      Vec s = Vec::Zero(n);
      for (Eigen::Index i : c.members) s += samples.samples.row(i).transpose();
      c.representative = s / static_cast<double>(c.count);
    }
  }
  return p;
}

bool interiors_disjoint(const Regions& regions, double margin) {
  for (int i = 0; i < regions.size(); ++i)
    for (int j = i + 1; j < regions.size(); ++j)
      if (geometry::interiors_overlap(regions.cells[i], regions.cells[j], margin)) return false;
  return true;
}

}  // namespace ccpart::partition
