// SPDX-License-Identifier: Apache-2.0
#include "hgfp/pruning.hpp"

#include <algorithm>

namespace hgfp {

LevelBits& LevelBits::operator|=(const LevelBits& other) {
  if (other.size_ != size_) fail(ErrorKind::Config, "bitset size mismatch");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  return *this;
}

bool LevelBits::subset_of(const LevelBits& other) const {
  if (other.size_ != size_) return false;
  for (std::size_t w = 0; w < words_.size(); ++w)
    if (words_[w] & ~other.words_[w]) return false;
  return true;
}

ValidityMask::ValidityMask(std::vector<LevelBits> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) fail(ErrorKind::Config, "validity mask: no levels");
  counts_.reserve(levels_.size());
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    if (levels_[l].size() != levels_.front().size())
      fail(ErrorKind::Config, "validity mask: level " + std::to_string(l) + " has a different table size");
    const std::uint32_t n = levels_[l].count();
    if (n == 0) fail(ErrorKind::Config, "validity mask: level " + std::to_string(l) + " has no valid rows");
    counts_.push_back(n);
  }
}

ValidityMask ValidityMask::all_valid(const GridConfig& config) {
  config.validate();
  LevelBits full(config.table_size);
  for (std::uint32_t i = 0; i < config.table_size; ++i) full.set(i);
  return ValidityMask(std::vector<LevelBits>(static_cast<std::size_t>(config.levels), full));
}

void ValidityMask::check_matches(const GridConfig& config) const {
  if (levels() != config.levels || table_size() != config.table_size)
    fail(ErrorKind::Config, "validity mask shape (" + std::to_string(levels()) + " levels, T=" +
                                std::to_string(table_size()) + ") does not match grid config");
}

ValidityMask compute_validity(const PointSet& points, const GridConfig& config, const BoundingBox& bbox) {
  config.validate();
  if (points.dims() != config.dims || bbox.dims() != config.dims)
    fail(ErrorKind::Config, "compute_validity: dimensionality mismatch");

  std::vector<LevelBits> levels(static_cast<std::size_t>(config.levels), LevelBits(config.table_size));
  for (std::size_t n = 0; n < points.size(); ++n) {
    const Point p = points.point(n);
    try {
      for (int l = 0; l < config.levels; ++l) {
        const std::uint32_t res = config.resolutions[static_cast<std::size_t>(l)];
        const CornerMatrix corners = corner_vertices(scale_position(p, bbox, res), res);
        for (Eigen::Index c = 0; c < corners.cols(); ++c)
          levels[static_cast<std::size_t>(l)].set(hash_vertex(corners.col(c), config.primes, config.table_size));
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "point " + std::to_string(n) + ": " + e.what());
    }
  }
  return ValidityMask(std::move(levels));
}

TouchRecorder::TouchRecorder(const GridConfig& config)
    : levels_(static_cast<std::size_t>(config.levels), LevelBits(config.table_size)) {}

bool TouchRecorder::empty() const {
  return std::all_of(levels_.begin(), levels_.end(), [](const LevelBits& b) { return b.count() == 0; });
}

ValidityMask touched_indices_oracle(const PointSet& points, const GridConfig& config,
                                    const BoundingBox& bbox) {
  config.validate();
  if (points.dims() != config.dims || bbox.dims() != config.dims)
    fail(ErrorKind::Config, "touched_indices_oracle: dimensionality mismatch");

  GridConfig narrow = config;
  narrow.feature_dim = 1;
  const HashGrid<float> probe(narrow);
  TouchRecorder recorder(config);
  for (std::size_t n = 0; n < points.size(); ++n) {
    const Point p = points.point(n);
    try {
      for (int l = 0; l < config.levels; ++l) interpolate(probe, l, p, bbox, recorder);
    } catch (const Error& e) {
      throw Error(e.kind(), "point " + std::to_string(n) + ": " + e.what());
    }
  }
  return ValidityMask(recorder.levels());
}

}  // namespace hgfp
