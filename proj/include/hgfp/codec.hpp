// SPDX-License-Identifier: Apache-2.0
//
// Pruned grid bitstream: quantization, per-level entropy coding and framing.
//
// Layout, little-endian:
//   "HGFP" | version u16 | dims u8 | levels u8 | table_size u32 |
//   feature_dim u16 | quant mode u8 | quant step f64 | bbox min,max (2*d f64) |
//   resolutions (L u32) | primes (d u32) | valid_counts (L u32) |
//   payload lengths (L u64) | payloads | checksum u64
//
// The checksum is 64-bit FNV-1a over every preceding byte. Positions are not
// stored; the decoder recomputes the validity mask from its own copy.
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hgfp/grid.hpp"
#include "hgfp/pruning.hpp"
#include "hgfp/range_coder.hpp"

namespace hgfp {

inline constexpr std::uint16_t kBitstreamVersion = 1;

enum class QuantMode : std::uint8_t { Quantized = 0, Raw = 1 };

struct QuantParams {
  double step = 1.0 / 256.0;
  QuantMode mode = QuantMode::Quantized;

  static QuantParams quantized(double step) { return {step, QuantMode::Quantized}; }
  /// Features stored verbatim as f32; step is recorded but unused.
  static QuantParams raw() { return {1.0, QuantMode::Raw}; }

  void validate() const;

  friend bool operator==(const QuantParams&, const QuantParams&) = default;
};

/// round_half_away_from_zero(value / step). Throws ErrorKind::DynamicRange
/// when the magnitude exceeds 2^23.
std::int32_t quantize_value(double value, double step);
inline double dequantize_value(std::int32_t symbol, double step) { return double(symbol) * step; }

/// 64-bit FNV-1a.
std::uint64_t checksum64(std::span<const std::uint8_t> bytes);

/// Row-major symbols of each packed level.
template <typename Scalar>
std::vector<std::vector<std::int32_t>> quantize(const PackedFeatures<Scalar>& packed, double step) {
  QuantParams::quantized(step).validate();
  std::vector<std::vector<std::int32_t>> out;
  out.reserve(packed.levels.size());
  for (const auto& rows : packed.levels) {
    std::vector<std::int32_t> symbols;
    symbols.reserve(static_cast<std::size_t>(rows.size()));
    for (Eigen::Index r = 0; r < rows.rows(); ++r)
      for (Eigen::Index c = 0; c < rows.cols(); ++c) symbols.push_back(quantize_value(double(rows(r, c)), step));
    out.push_back(std::move(symbols));
  }
  return out;
}

/// What the decoder reproduces on valid rows: quantize then dequantize in
/// quantized mode, a round trip through f32 in raw mode. Applied to every row.
template <typename Scalar>
HashGrid<Scalar> quantize_dequantize(const HashGrid<Scalar>& grid, const QuantParams& params) {
  params.validate();
  HashGrid<Scalar> out = grid;
  for (int l = 0; l < out.levels(); ++l) {
    if (params.mode == QuantMode::Raw) {
      out.table(l) = out.table(l).template cast<float>().template cast<Scalar>();
    } else {
      out.table(l) = out.table(l).unaryExpr([&](Scalar v) {
        return static_cast<Scalar>(dequantize_value(quantize_value(double(v), params.step), params.step));
      });
    }
  }
  return out;
}

struct BitstreamHeader {
  GridConfig config;
  BoundingBox bbox;
  QuantParams quant;
  std::vector<std::uint32_t> valid_counts;
};

struct PrunedBitstream {
  BitstreamHeader header;
  std::vector<std::vector<std::uint8_t>> payloads;

  std::vector<std::uint8_t> serialize() const;
  /// Verifies the checksum before reading any field. Throws
  /// ErrorKind::Corruption on checksum or structure failure and
  /// ErrorKind::Version for an unknown format version.
  static PrunedBitstream parse(std::span<const std::uint8_t> bytes);

  std::size_t header_bytes() const;
  std::size_t payload_bytes() const;
  std::size_t total_bytes() const { return header_bytes() + payload_bytes() + 8; }
};

std::vector<std::uint8_t> encode_level_payload(std::span<const std::int32_t> symbols);

/// Frames the rows selected by `mask`. With ValidityMask::all_valid this
/// yields the unpruned baseline stream.
template <typename Scalar>
PrunedBitstream encode_with_mask(const HashGrid<Scalar>& grid, const ValidityMask& mask,
                                 const BoundingBox& bbox, const QuantParams& params) {
  params.validate();
  if (bbox.dims() != grid.config().dims) fail(ErrorKind::Config, "encode: bbox dimensionality mismatch");
  const PackedFeatures<Scalar> packed = pack(grid, mask);

  PrunedBitstream stream{BitstreamHeader{grid.config(), bbox, params, mask.valid_counts()}, {}};
  stream.payloads.reserve(packed.levels.size());
  if (params.mode == QuantMode::Raw) {
    for (const auto& rows : packed.levels) {
      std::vector<std::uint8_t> bytes;
      bytes.reserve(static_cast<std::size_t>(rows.size()) * 4);
      for (Eigen::Index r = 0; r < rows.rows(); ++r)
        for (Eigen::Index c = 0; c < rows.cols(); ++c) {
          const auto value = static_cast<float>(rows(r, c));
          if (!std::isfinite(value)) fail(ErrorKind::DynamicRange, "encode: feature does not fit in f32");
          const auto bits = std::bit_cast<std::uint32_t>(value);
          for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
        }
      stream.payloads.push_back(std::move(bytes));
    }
  } else {
    for (const auto& symbols : quantize(packed, params.step)) stream.payloads.push_back(encode_level_payload(symbols));
  }
  return stream;
}

template <typename Scalar>
PrunedBitstream encode_grid(const HashGrid<Scalar>& grid, const PointSet& points, const BoundingBox& bbox,
                            const QuantParams& params) {
  return encode_with_mask(grid, compute_validity(points, grid.config(), bbox), bbox, params);
}

/// Mask recomputed from `points` against the header; throws
/// ErrorKind::PositionMismatch if it disagrees with the stored counts.
ValidityMask recompute_mask(const BitstreamHeader& header, const PointSet& points);

/// Per-level payload rows, row-major, as doubles.
std::vector<std::vector<double>> decode_payloads(const PrunedBitstream& stream);

template <typename Scalar>
HashGrid<Scalar> decode_grid(const PrunedBitstream& stream, const PointSet& points) {
  const ValidityMask mask = recompute_mask(stream.header, points);
  const GridConfig& cfg = stream.header.config;
  const std::vector<std::vector<double>> values = decode_payloads(stream);

  PackedFeatures<Scalar> packed;
  for (int l = 0; l < cfg.levels; ++l) {
    const auto& v = values[static_cast<std::size_t>(l)];
    typename PackedFeatures<Scalar>::Table rows(mask.valid_count(l), cfg.feature_dim);
    for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = static_cast<Scalar>(v[static_cast<std::size_t>(i)]);
    packed.levels.push_back(std::move(rows));
  }
  return unpack(packed, mask, cfg);
}

template <typename Scalar>
HashGrid<Scalar> decode_grid(std::span<const std::uint8_t> bytes, const PointSet& points) {
  return decode_grid<Scalar>(PrunedBitstream::parse(bytes), points);
}

}  // namespace hgfp
