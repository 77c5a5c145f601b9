// SPDX-License-Identifier: Apache-2.0
#include "hgfp/grid.hpp"

#include <algorithm>
#include <bit>

namespace hgfp {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::OutOfBounds: return "out-of-bounds";
    case ErrorKind::NonFinite: return "non-finite";
    case ErrorKind::DynamicRange: return "dynamic-range";
    case ErrorKind::Decode: return "decode";
    case ErrorKind::LengthMismatch: return "length-mismatch";
    case ErrorKind::Corruption: return "corruption";
    case ErrorKind::PositionMismatch: return "position-mismatch";
    case ErrorKind::BadMagic: return "bad-magic";
    case ErrorKind::Version: return "version";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

std::vector<std::uint32_t> default_primes(int dims) {
  static constexpr std::array<std::uint32_t, kMaxDims> kPrimes{1u, 2654435761u, 805459861u};
  if (dims < 1 || dims > kMaxDims) fail(ErrorKind::Config, "dims must be 1, 2 or 3");
  return {kPrimes.begin(), kPrimes.begin() + dims};
}

std::vector<std::uint32_t> geometric_resolutions(int levels, std::uint32_t base,
                                                 std::uint32_t max_resolution) {
  if (levels < 1) fail(ErrorKind::Config, "levels must be >= 1");
  if (base < 1 || max_resolution < base)
    fail(ErrorKind::Config, "resolutions: need 1 <= base <= max");
  std::vector<std::uint32_t> res(static_cast<std::size_t>(levels));
  if (levels == 1) {
    res[0] = max_resolution;
    return res;
  }
  const double ratio = double(max_resolution) / double(base);
  for (int l = 0; l < levels; ++l) {
    // Tolerance keeps exact powers (4 * 4 = 16) from flooring to 15.
    const double r = base * std::pow(ratio, double(l) / double(levels - 1));
    res[static_cast<std::size_t>(l)] = static_cast<std::uint32_t>(std::floor(r * (1.0 + 1e-12)));
  }
  res.front() = base;
  res.back() = max_resolution;
  for (std::size_t l = 1; l < res.size(); ++l)
    res[l] = std::clamp(res[l], res[l - 1], max_resolution);
  return res;
}

void GridConfig::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorKind::Config, "grid config: " + msg); };
  if (dims < 1 || dims > kMaxDims) bad("dims must be 1, 2 or 3");
  if (levels < 1 || levels > 255) bad("levels must be in [1, 255]");
  if (resolutions.size() != static_cast<std::size_t>(levels))
    bad("expected " + std::to_string(levels) + " resolutions, got " + std::to_string(resolutions.size()));
  for (std::size_t l = 0; l < resolutions.size(); ++l) {
    if (resolutions[l] < 1) bad("resolution " + std::to_string(l) + " must be >= 1");
    if (resolutions[l] >= (1u << 31)) bad("resolution " + std::to_string(l) + " too large");
    if (l > 0 && resolutions[l] < resolutions[l - 1]) bad("resolutions must be non-decreasing");
  }
  if (table_size < 2 || !std::has_single_bit(table_size)) bad("table_size must be a power of two >= 2");
  if (feature_dim < 1 || feature_dim > 0xFFFF) bad("feature_dim must be in [1, 65535]");
  if (primes.size() != static_cast<std::size_t>(dims))
    bad("expected " + std::to_string(dims) + " primes, got " + std::to_string(primes.size()));
  if (primes.front() != 1u) bad("first prime must be 1");
  for (std::uint32_t p : primes)
    if ((p & 1u) == 0) bad("primes must be odd");
}

GridConfig GridConfig::geometric(int dims, int levels, std::uint32_t base_resolution,
                                 std::uint32_t max_resolution, std::uint32_t table_size,
                                 int feature_dim) {
  GridConfig cfg;
  cfg.dims = dims;
  cfg.levels = levels;
  cfg.resolutions = geometric_resolutions(levels, base_resolution, max_resolution);
  cfg.table_size = table_size;
  cfg.feature_dim = feature_dim;
  cfg.primes = default_primes(dims);
  cfg.validate();
  return cfg;
}

BoundingBox::BoundingBox(Point min, Point max) : min_(std::move(min)), max_(std::move(max)) {
  if (min_.size() < 1 || min_.size() > kMaxDims || min_.size() != max_.size())
    fail(ErrorKind::Config, "bounding box: min/max must have 1..3 matching components");
  for (Eigen::Index k = 0; k < min_.size(); ++k) {
    if (!std::isfinite(min_[k]) || !std::isfinite(max_[k]))
      fail(ErrorKind::NonFinite, "bounding box: axis " + std::to_string(k) + " is not finite");
    if (!(max_[k] > min_[k]))
      fail(ErrorKind::Config, "bounding box: axis " + std::to_string(k) + " is degenerate");
  }
}

PointSet::PointSet(Matrix coords) : coords_(std::move(coords)) {
  if (coords_.rows() < 1) fail(ErrorKind::Config, "point set: needs at least one point");
  if (coords_.cols() < 1 || coords_.cols() > kMaxDims)
    fail(ErrorKind::Config, "point set: dims must be 1, 2 or 3");
  for (Eigen::Index n = 0; n < coords_.rows(); ++n)
    if (!coords_.row(n).allFinite())
      fail(ErrorKind::NonFinite, "point set: row " + std::to_string(n) + " is not finite");
}

BoundingBox enclosing_box(const PointSet& points) {
  Point lo = points.coords().colwise().minCoeff().transpose();
  Point hi = points.coords().colwise().maxCoeff().transpose();
  for (Eigen::Index k = 0; k < lo.size(); ++k)
    if (!(hi[k] > lo[k])) hi[k] = lo[k] + 1.0;
  return BoundingBox(std::move(lo), std::move(hi));
}

Point scale_position(const Point& point, const BoundingBox& bbox, std::uint32_t resolution) {
  if (point.size() != bbox.dims()) fail(ErrorKind::Config, "scale_position: dimensionality mismatch");
  if (resolution < 1) fail(ErrorKind::Config, "scale_position: resolution must be >= 1");
  Point scaled(point.size());
  for (Eigen::Index k = 0; k < point.size(); ++k) {
    const double lo = bbox.min()[k];
    const double hi = bbox.max()[k];
    if (!(point[k] >= lo && point[k] <= hi))
      fail(ErrorKind::OutOfBounds, "axis " + std::to_string(k) + ": coordinate " +
                                       std::to_string(point[k]) + " outside [" + std::to_string(lo) +
                                       ", " + std::to_string(hi) + "]");
    scaled[k] = (point[k] - lo) / (hi - lo) * double(resolution);
  }
  return scaled;
}

namespace {

std::uint32_t clamped_floor(double s, std::uint32_t resolution, Eigen::Index axis) {
  if (!(s >= 0.0 && s <= double(resolution)))
    fail(ErrorKind::OutOfBounds, "axis " + std::to_string(axis) + ": scaled coordinate " +
                                     std::to_string(s) + " outside [0, " + std::to_string(resolution) + "]");
  return std::min(static_cast<std::uint32_t>(std::floor(s)), resolution - 1);
}

}  // namespace

CornerMatrix corner_vertices(const Point& scaled, std::uint32_t resolution) {
  if (resolution < 1) fail(ErrorKind::Config, "corner_vertices: resolution must be >= 1");
  const Eigen::Index d = scaled.size();
  VertexCoord base(d);
  for (Eigen::Index k = 0; k < d; ++k) base[k] = clamped_floor(scaled[k], resolution, k);

  const Eigen::Index count = Eigen::Index{1} << d;
  CornerMatrix corners(d, count);
  for (Eigen::Index c = 0; c < count; ++c)
    for (Eigen::Index k = 0; k < d; ++k)
      corners(k, c) = base[k] + static_cast<std::uint32_t>((c >> k) & 1);
  return corners;
}

CellLocation locate_cell(const Point& scaled, std::uint32_t resolution) {
  CellLocation cell;
  cell.dims = static_cast<int>(scaled.size());
  for (int k = 0; k < cell.dims; ++k) {
    const double s = scaled[k];
    if (!(s >= 0.0 && s <= double(resolution)))
      fail(ErrorKind::OutOfBounds, "locate_cell: axis " + std::to_string(k) + " outside the lattice");
    // The top face belongs to the last cell, with frac = 1.
    const double cell_index = std::min(std::floor(s), double(resolution - 1));
    cell.base[k] = static_cast<std::uint32_t>(cell_index);
    cell.frac[k] = s - cell_index;
  }
  return cell;
}

}  // namespace hgfp
