// SPDX-License-Identifier: Apache-2.0
#include "hgfp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hgfp {

std::uint64_t CounterRng::next_u64() {
  std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ull + stream_ * 0xD1B54A32D192ED03ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double CounterRng::uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t CounterRng::below(std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double CounterRng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void SynthSpec::validate() const {
  if (dims < 1 || dims > kMaxDims) fail(ErrorKind::Config, "synth: dims must be 1, 2 or 3");
  if (bbox.dims() != dims) fail(ErrorKind::Config, "synth: bbox dimensionality mismatch");
  if (n_points < 1) fail(ErrorKind::Config, "synth: n_points must be >= 1");
  if (n_clusters < 1) fail(ErrorKind::Config, "synth: n_clusters must be >= 1");
  if (!(cluster_std > 0.0 && cluster_std <= 1.0)) fail(ErrorKind::Config, "synth: cluster_std must be in (0, 1]");
}

PointSet generate_points(const SynthSpec& spec) {
  spec.validate();
  const Point& lo = spec.bbox.min();
  const Point& hi = spec.bbox.max();

  CounterRng centers_rng(spec.seed, 1);
  Eigen::MatrixXd centers(spec.n_clusters, spec.dims);
  for (Eigen::Index c = 0; c < centers.rows(); ++c)
    for (int k = 0; k < spec.dims; ++k) centers(c, k) = centers_rng.uniform(lo[k], hi[k]);

  CounterRng rng(spec.seed, 2);
  PointSet::Matrix m(static_cast<Eigen::Index>(spec.n_points), spec.dims);
  for (Eigen::Index n = 0; n < m.rows(); ++n) {
    const auto c = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(spec.n_clusters)));
    for (int k = 0; k < spec.dims; ++k) {
      const double sigma = spec.cluster_std * (hi[k] - lo[k]);
      m(n, k) = std::clamp(centers(c, k) + sigma * rng.normal(), lo[k], hi[k]);
    }
  }
  return PointSet(std::move(m));
}

HashGrid<float> random_grid(const GridConfig& config, std::uint64_t seed) {
  HashGrid<float> grid(config);
  CounterRng rng(seed, 3);
  for (int l = 0; l < grid.levels(); ++l) {
    auto& t = grid.table(l);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
  }
  return grid;
}

}  // namespace hgfp
