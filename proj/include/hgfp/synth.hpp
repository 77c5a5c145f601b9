// SPDX-License-Identifier: Apache-2.0
//
// Seeded synthetic inputs: clustered point sets and random feature grids.
#pragma once

#include <cstdint>

#include "hgfp/grid.hpp"

namespace hgfp {

/// Counter-based generator: output i is the SplitMix64 finalizer applied to
/// seed + (i + 1) * golden-ratio increment, offset by a per-stream constant.
/// Identical on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

struct SynthSpec {
  int dims = 3;
  std::size_t n_points = 1000;
  int n_clusters = 1;
  /// Per-axis standard deviation as a fraction of the box extent.
  double cluster_std = 0.05;
  std::uint64_t seed = 0;
  BoundingBox bbox{Point::Zero(3), Point::Ones(3)};

  void validate() const;
};

/// Gaussian mixture: centers uniform in the box, samples clamped into it.
PointSet generate_points(const SynthSpec& spec);

/// Features uniform in [-1, 1], rounded to f32.
HashGrid<float> random_grid(const GridConfig& config, std::uint64_t seed);

}  // namespace hgfp
