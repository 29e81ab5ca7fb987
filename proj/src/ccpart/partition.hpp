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

#include <cstdint>
#include <optional>
#include <vector>

#include "ccpart/geometry.hpp"

namespace ccpart::partition {

using geometry::Box;
using geometry::Mat;
using geometry::Polytope;
using geometry::Vec;

// N x n_theta matrix of realizations, one per row.
struct SampleSet {
  Mat samples;
  std::uint64_t seed = 0;

  Eigen::Index size() const { return samples.rows(); }
  Eigen::Index dim() const { return samples.cols(); }
};

// Cell geometry without sample statistics. Grid-type cells keep their box.
struct Regions {
  Box domain;
  std::vector<Polytope> cells;
  std::vector<std::optional<Box>> boxes;

  int size() const { return static_cast<int>(cells.size()); }
};

struct Cell {
  Polytope region;
  std::optional<Box> box;
  Vec representative;
  long count = 0;
  double mass = 0.0;
  std::vector<Eigen::Index> members;

  bool contains(const Vec& theta, double tol = 1e-12) const;
};

struct Partition {
  Box domain;
  std::vector<Cell> cells;
  Eigen::Index num_samples = 0;

  int K() const { return static_cast<int>(cells.size()); }
  Vec masses() const;
  Mat representatives() const;  // K x n_theta
};

// K boxes by repeatedly halving the longest edge over all cells.
Regions grid_partition(const Box& domain, int K);

// Same rule restricted to the given coordinates; the rest are never split.
Regions adaptive_split(const Box& domain, const std::vector<int>& critical_coords, int K);

struct KMeansInfo {
  Mat centroids;  // K x n_theta
  int iterations = 0;
};

// Lloyd k-means seeded with K distinct samples, then Voronoi cells clipped to
// the domain. Throws Error(kDegenerateClustering) with fewer than K distinct
// samples.
Regions voronoi_partition(const Box& domain, const SampleSet& samples, int K,
                          std::uint64_t seed, KMeansInfo* info = nullptr);

// Assigns every sample to the first cell containing it, sets masses to
// count / N and representatives to member means (Chebyshev center for empty
// cells). Throws Error(kSampleOutsideDomain).
Partition summarize(const Regions& regions, const SampleSet& samples);

// Pairwise interior-overlap check by LP.
bool interiors_disjoint(const Regions& regions, double margin = 1e-9);

}  // namespace ccpart::partition
