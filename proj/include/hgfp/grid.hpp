// SPDX-License-Identifier: Apache-2.0
//
// Multi-resolution hash grid: configuration, position scaling, cell corner
// enumeration, spatial hashing and d-linear interpolation.
#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hgfp/error.hpp"

namespace hgfp {

inline constexpr int kMaxDims = 3;
inline constexpr int kMaxCorners = 1 << kMaxDims;

/// A position in scene units or in lattice units; at most three components.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDims, 1>;
/// Integer lattice vertex at some level.
using VertexCoord =
    Eigen::Matrix<std::uint32_t, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDims, 1>;
/// dims x 2^dims matrix; column c is the corner base + delta(c).
using CornerMatrix = Eigen::Matrix<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::ColMajor, kMaxDims, kMaxCorners>;

/// Per-dimension hash multipliers: 1, 2654435761, 805459861.
std::vector<std::uint32_t> default_primes(int dims);

/// Geometric growth from `base` to `max_resolution` over `levels` levels,
/// floored, with the last level pinned to `max_resolution`.
std::vector<std::uint32_t> geometric_resolutions(int levels, std::uint32_t base,
                                                 std::uint32_t max_resolution);

struct GridConfig {
  int dims = 3;
  int levels = 8;
  std::vector<std::uint32_t> resolutions;
  std::uint32_t table_size = 1u << 13;
  int feature_dim = 2;
  std::vector<std::uint32_t> primes;

  /// Throws ErrorKind::Config when any invariant is broken.
  void validate() const;

  /// Geometric resolutions and default primes.
  static GridConfig geometric(int dims, int levels, std::uint32_t base_resolution,
                              std::uint32_t max_resolution, std::uint32_t table_size,
                              int feature_dim);

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

class BoundingBox {
 public:
  BoundingBox(Point min, Point max);

  int dims() const { return static_cast<int>(min_.size()); }
  const Point& min() const { return min_; }
  const Point& max() const { return max_; }

  friend bool operator==(const BoundingBox& a, const BoundingBox& b) {
    return a.min_ == b.min_ && a.max_ == b.max_;
  }

 private:
  Point min_;
  Point max_;
};

/// Fixed query positions, one row per point.
class PointSet {
 public:
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit PointSet(Matrix coords);

  int dims() const { return static_cast<int>(coords_.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(coords_.rows()); }
  Point point(std::size_t n) const { return coords_.row(static_cast<Eigen::Index>(n)).transpose(); }
  const Matrix& coords() const { return coords_; }

 private:
  Matrix coords_;
};

/// Per-axis min and max of the points. An axis with zero extent is widened
/// to [v, v + 1] so the box stays non-degenerate.
BoundingBox enclosing_box(const PointSet& points);

/// Maps `point` to lattice units: (p - min) / (max - min) * resolution.
Point scale_position(const Point& point, const BoundingBox& bbox, std::uint32_t resolution);

/// The 2^d vertices of the cell containing `scaled`, delta as a d-bit
/// counter with axis 0 least significant. The base is clamped to
/// resolution - 1 so every corner lies in [0, resolution].
CornerMatrix corner_vertices(const Point& scaled, std::uint32_t resolution);

/// XOR over axes of coord * prime in wrapping 32-bit arithmetic, mod table_size.
inline std::uint32_t hash_vertex(std::span<const std::uint32_t> coords,
                                 std::span<const std::uint32_t> primes,
                                 std::uint32_t table_size) {
  std::uint32_t h = 0;
  for (std::size_t k = 0; k < coords.size(); ++k) h ^= coords[k] * primes[k];
  return h & (table_size - 1);
}

inline std::uint32_t hash_vertex(const VertexCoord& vertex,
                                 std::span<const std::uint32_t> primes,
                                 std::uint32_t table_size) {
  return hash_vertex(std::span<const std::uint32_t>(vertex.data(), static_cast<std::size_t>(vertex.size())),
                     primes, table_size);
}

/// Cell lookup used by interpolation: clamped base vertex and the fractional
/// offset inside the cell, each frac in [0, 1].
struct CellLocation {
  std::array<std::uint32_t, kMaxDims> base{};
  std::array<double, kMaxDims> frac{};
  int dims = 0;

  /// Product weight of corner base + delta(corner).
  double weight(unsigned corner) const {
    double w = 1.0;
    for (int k = 0; k < dims; ++k) w *= ((corner >> k) & 1u) ? frac[k] : 1.0 - frac[k];
    return w;
  }
};

CellLocation locate_cell(const Point& scaled, std::uint32_t resolution);

template <typename Scalar>
class HashGrid {
 public:
  using Table = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  /// All-zero tables.
  explicit HashGrid(GridConfig config) : config_(std::move(config)) {
    config_.validate();
    tables_.assign(static_cast<std::size_t>(config_.levels),
                   Table::Zero(config_.table_size, config_.feature_dim));
  }

  HashGrid(GridConfig config, std::vector<Table> tables)
      : config_(std::move(config)), tables_(std::move(tables)) {
    config_.validate();
    if (tables_.size() != static_cast<std::size_t>(config_.levels))
      fail(ErrorKind::Config, "hash grid: expected " + std::to_string(config_.levels) +
                                  " tables, got " + std::to_string(tables_.size()));
    for (std::size_t l = 0; l < tables_.size(); ++l) {
      if (tables_[l].rows() != static_cast<Eigen::Index>(config_.table_size) ||
          tables_[l].cols() != config_.feature_dim)
        fail(ErrorKind::Config, "hash grid: table " + std::to_string(l) + " has wrong shape");
      if (!tables_[l].allFinite())
        fail(ErrorKind::NonFinite, "hash grid: table " + std::to_string(l) + " has non-finite values");
    }
  }

  const GridConfig& config() const { return config_; }
  int levels() const { return config_.levels; }
  const Table& table(int level) const { return tables_[static_cast<std::size_t>(level)]; }
  Table& table(int level) { return tables_[static_cast<std::size_t>(level)]; }
  const std::vector<Table>& tables() const { return tables_; }

  template <typename Other>
  HashGrid<Other> cast() const {
    std::vector<typename HashGrid<Other>::Table> out;
    out.reserve(tables_.size());
    for (const Table& t : tables_) out.push_back(t.template cast<Other>());
    return HashGrid<Other>(config_, std::move(out));
  }

 private:
  GridConfig config_;
  std::vector<Table> tables_;
};

struct NoReadHook {
  void operator()(int, std::uint32_t) const noexcept {}
};

/// d-linear blend of the 2^d hashed corner rows at `level`, accumulated in
/// double. `on_read(level, index)` sees every table row touched, including
/// corners whose weight is zero.
template <typename Scalar, typename ReadHook = NoReadHook>
Eigen::VectorXd interpolate(const HashGrid<Scalar>& grid, int level, const Point& point,
                            const BoundingBox& bbox, ReadHook&& on_read = {}) {
  const GridConfig& cfg = grid.config();
  if (level < 0 || level >= cfg.levels)
    fail(ErrorKind::OutOfBounds, "interpolate: level " + std::to_string(level) + " out of range");
  if (point.size() != cfg.dims || bbox.dims() != cfg.dims)
    fail(ErrorKind::Config, "interpolate: dimensionality mismatch");

  const std::uint32_t res = cfg.resolutions[static_cast<std::size_t>(level)];
  const CellLocation cell = locate_cell(scale_position(point, bbox, res), res);
  const auto& table = grid.table(level);

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(cfg.feature_dim);
  std::array<std::uint32_t, kMaxDims> vertex{};
  const unsigned corners = 1u << cfg.dims;
  for (unsigned c = 0; c < corners; ++c) {
    for (int k = 0; k < cfg.dims; ++k) vertex[k] = cell.base[k] + ((c >> k) & 1u);
    const std::uint32_t index =
        hash_vertex(std::span<const std::uint32_t>(vertex.data(), static_cast<std::size_t>(cfg.dims)),
                    cfg.primes, cfg.table_size);
    on_read(level, index);
    acc += cell.weight(c) * table.row(index).transpose().template cast<double>();
  }
  return acc;
}

/// N x (L * F): row n holds the L per-level feature vectors of point n, level
/// major.
template <typename Scalar>
Eigen::MatrixXd interpolate_all(const HashGrid<Scalar>& grid, const PointSet& points,
                                const BoundingBox& bbox) {
  const GridConfig& cfg = grid.config();
  if (points.dims() != cfg.dims)
    fail(ErrorKind::Config, "interpolate_all: point dims " + std::to_string(points.dims()) +
                                " != grid dims " + std::to_string(cfg.dims));
  const Eigen::Index f = cfg.feature_dim;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(points.size()), cfg.levels * f);
  for (std::size_t n = 0; n < points.size(); ++n) {
    const Point p = points.point(n);
    try {
      for (int l = 0; l < cfg.levels; ++l)
        out.block(static_cast<Eigen::Index>(n), l * f, 1, f) = interpolate(grid, l, p, bbox).transpose();
    } catch (const Error& e) {
      throw Error(e.kind(), "point " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace hgfp
