// SPDX-License-Identifier: Apache-2.0
//
// Validity masks: which table rows any query point can read, and packing of
// just those rows.
#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "hgfp/grid.hpp"

namespace hgfp {

/// Fixed-length bitset over the rows of one table.
class LevelBits {
 public:
  LevelBits() = default;
  explicit LevelBits(std::uint32_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::uint32_t size() const { return size_; }
  void set(std::uint32_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::uint32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

  std::uint32_t count() const {
    std::uint32_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::uint32_t>(std::popcount(w));
    return n;
  }

  /// Calls f(i) for each set bit, ascending.
  template <typename F>
  void for_each_set(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        f(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
        bits &= bits - 1;
      }
    }
  }

  LevelBits& operator|=(const LevelBits& other);
  /// True if every bit set here is also set in `other`.
  bool subset_of(const LevelBits& other) const;

  friend bool operator==(const LevelBits&, const LevelBits&) = default;

 private:
  std::uint32_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Per-level set of table rows that participate in interpolation. Every
/// level holds at least one valid row.
class ValidityMask {
 public:
  explicit ValidityMask(std::vector<LevelBits> levels);

  /// Every row of every level valid; the unpruned baseline.
  static ValidityMask all_valid(const GridConfig& config);

  int levels() const { return static_cast<int>(levels_.size()); }
  std::uint32_t table_size() const { return levels_.front().size(); }
  const LevelBits& level(int l) const { return levels_[static_cast<std::size_t>(l)]; }
  std::uint32_t valid_count(int l) const { return counts_[static_cast<std::size_t>(l)]; }
  const std::vector<std::uint32_t>& valid_counts() const { return counts_; }

  /// Throws ErrorKind::Config if levels or table size differ from `config`.
  void check_matches(const GridConfig& config) const;

  friend bool operator==(const ValidityMask& a, const ValidityMask& b) { return a.levels_ == b.levels_; }

 private:
  std::vector<LevelBits> levels_;
  std::vector<std::uint32_t> counts_;
};

/// Union over points and levels of the hashed corner vertices of each
/// point's cell.
ValidityMask compute_validity(const PointSet& points, const GridConfig& config, const BoundingBox& bbox);

/// Records the table rows an interpolation pass reads.
class TouchRecorder {
 public:
  explicit TouchRecorder(const GridConfig& config);

  void operator()(int level, std::uint32_t index) { levels_[static_cast<std::size_t>(level)].set(index); }
  const std::vector<LevelBits>& levels() const { return levels_; }
  bool empty() const;

 private:
  std::vector<LevelBits> levels_;
};

/// Independent check of compute_validity: runs interpolation of every point
/// at every level on a zero grid and returns the rows it actually read.
ValidityMask touched_indices_oracle(const PointSet& points, const GridConfig& config,
                                    const BoundingBox& bbox);

/// Valid rows of each level, in ascending table index order.
template <typename Scalar>
struct PackedFeatures {
  using Table = typename HashGrid<Scalar>::Table;
  std::vector<Table> levels;

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const Table& t : levels) n += static_cast<std::size_t>(t.size());
    return n;
  }

  friend bool operator==(const PackedFeatures& a, const PackedFeatures& b) {
    if (a.levels.size() != b.levels.size()) return false;
    for (std::size_t l = 0; l < a.levels.size(); ++l)
      if (a.levels[l].rows() != b.levels[l].rows() || a.levels[l].cols() != b.levels[l].cols() ||
          a.levels[l] != b.levels[l])
        return false;
    return true;
  }
};

template <typename Scalar>
PackedFeatures<Scalar> pack(const HashGrid<Scalar>& grid, const ValidityMask& mask) {
  mask.check_matches(grid.config());
  PackedFeatures<Scalar> packed;
  packed.levels.reserve(static_cast<std::size_t>(grid.levels()));
  for (int l = 0; l < grid.levels(); ++l) {
    const auto& table = grid.table(l);
    typename PackedFeatures<Scalar>::Table rows(mask.valid_count(l), table.cols());
    Eigen::Index j = 0;
    mask.level(l).for_each_set([&](std::uint32_t i) { rows.row(j++) = table.row(i); });
    packed.levels.push_back(std::move(rows));
  }
  return packed;
}

/// Scatters packed rows back to their table indices; every other row gets
/// `fill` (zeros when not given).
template <typename Scalar>
HashGrid<Scalar> unpack(const PackedFeatures<Scalar>& packed, const ValidityMask& mask,
                        const GridConfig& config,
                        const std::optional<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& fill = std::nullopt) {
  mask.check_matches(config);
  if (packed.levels.size() != static_cast<std::size_t>(config.levels))
    fail(ErrorKind::Corruption, "unpack: packed level count " + std::to_string(packed.levels.size()) +
                                    " != " + std::to_string(config.levels));
  if (fill && fill->size() != config.feature_dim)
    fail(ErrorKind::Config, "unpack: fill vector has wrong width");

  HashGrid<Scalar> grid(config);
  for (int l = 0; l < config.levels; ++l) {
    const auto& rows = packed.levels[static_cast<std::size_t>(l)];
    if (rows.rows() != static_cast<Eigen::Index>(mask.valid_count(l)) || rows.cols() != config.feature_dim)
      fail(ErrorKind::Corruption, "unpack: level " + std::to_string(l) + " has " +
                                      std::to_string(rows.rows()) + " rows, mask expects " +
                                      std::to_string(mask.valid_count(l)));
    auto& table = grid.table(l);
    if (fill) table.rowwise() = fill->transpose();
    Eigen::Index j = 0;
    mask.level(l).for_each_set([&](std::uint32_t i) { table.row(i) = rows.row(j++); });
  }
  return grid;
}

}  // namespace hgfp
