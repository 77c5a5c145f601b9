// SPDX-License-Identifier: Apache-2.0
//
// Inference-losslessness check for a decoded grid.
#pragma once

#include <cstdio>

#include <optional>
#include <string>

#include "hgfp/codec.hpp"

namespace hgfp {

struct BadRow {
  int level = 0;
  std::uint32_t index = 0;
};

struct VerificationResult {
  bool mask_matches_oracle = false;
  /// Max |a - b| between interpolate_all of reference and decoded grids.
  double max_abs_deviation = 0.0;
  /// First valid row (ascending level, then index) that differs.
  std::optional<BadRow> first_bad_row;

  bool passed() const { return mask_matches_oracle && max_abs_deviation == 0.0 && !first_bad_row; }

  std::string summary() const {
    std::string s = passed() ? "PASS" : "FAIL";
    s += ": mask/oracle " + std::string(mask_matches_oracle ? "agree" : "DISAGREE");
    char dev[32];
    std::snprintf(dev, sizeof dev, "%.17g", max_abs_deviation);
    s += ", max abs deviation " + std::string(dev);
    if (first_bad_row)
      s += ", first differing valid row: level " + std::to_string(first_bad_row->level) + " index " +
           std::to_string(first_bad_row->index);
    return s;
  }
};

/// `reference` is what the decoder should reproduce on valid rows
/// (quantize_dequantize of the encoder's grid).
template <typename Scalar>
VerificationResult verify_reconstruction(const HashGrid<Scalar>& reference, const HashGrid<Scalar>& decoded,
                                         const PointSet& points, const BoundingBox& bbox,
                                         const ValidityMask& mask, const ValidityMask& oracle) {
  if (!(reference.config() == decoded.config()))
    fail(ErrorKind::Config, "verify: reference and decoded grids have different configs");
  mask.check_matches(reference.config());

  VerificationResult result;
  result.mask_matches_oracle = mask == oracle;
  const Eigen::MatrixXd a = interpolate_all(reference, points, bbox);
  const Eigen::MatrixXd b = interpolate_all(decoded, points, bbox);
  result.max_abs_deviation = (a - b).cwiseAbs().maxCoeff();

  for (int l = 0; l < reference.levels() && !result.first_bad_row; ++l) {
    const auto& ref = reference.table(l);
    const auto& dec = decoded.table(l);
    mask.level(l).for_each_set([&](std::uint32_t i) {
      if (!result.first_bad_row && ref.row(i) != dec.row(i)) result.first_bad_row = BadRow{l, i};
    });
  }
  return result;
}

/// Decodes `stream` with `points` and checks it against `original`.
template <typename Scalar>
VerificationResult verify_stream(const HashGrid<Scalar>& original, const PointSet& points,
                                 const PrunedBitstream& stream) {
  const BitstreamHeader& h = stream.header;
  if (!(original.config() == h.config))
    fail(ErrorKind::Config, "verify: grid config differs from the stream header");
  const HashGrid<Scalar> decoded = decode_grid<Scalar>(stream, points);
  const ValidityMask mask = recompute_mask(h, points);
  const ValidityMask oracle = touched_indices_oracle(points, h.config, h.bbox);
  return verify_reconstruction(quantize_dequantize(original, h.quant), decoded, points, h.bbox, mask, oracle);
}

}  // namespace hgfp
