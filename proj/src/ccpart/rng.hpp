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

#include <array>
#include <cstdint>

namespace ccpart {

// Philox4x32-10 counter-based generator.
//
// A generator is identified by (seed, stream). Draw n of a stream is a pure
// function of (seed, stream, n), so any stream can be reproduced without
// replaying the others; parallel workers that own disjoint streams produce
// exactly the values a serial run would.
//
// Stream ids used by the library are built with make_stream():
//   bits 56..63  purpose tag (StreamTag)
//   bits 32..55  repetition index
//   bits  0..31  sub-index (time step, validation shard, sample index, ...)
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  // Standard normal by Box-Muller; the spare variate is cached.
  double normal() noexcept;
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class StreamTag : std::uint8_t {
  kTraining = 1,
  kValidation = 2,
  kClustering = 3,
  kRealized = 4,
  kTest = 5,
};

constexpr std::uint64_t make_stream(StreamTag tag, std::uint64_t repetition,
                                    std::uint64_t sub = 0) noexcept {
  return (static_cast<std::uint64_t>(tag) << 56) |
         ((repetition & 0xFFFFFFull) << 32) | (sub & 0xFFFFFFFFull);
}

}  // namespace ccpart
