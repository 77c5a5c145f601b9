// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hgfp/grid.hpp"
#include "hgfp/pruning.hpp"

namespace hgfp {

struct LevelStats {
  int level = 0;
  std::uint32_t resolution = 0;
  std::uint32_t table_size = 0;
  std::uint32_t valid_count = 0;
  double valid_ratio = 0.0;
  std::uint64_t unpruned_bytes = 0;
  std::uint64_t pruned_bytes = 0;
  double reduction_percent = 0.0;
};

struct StreamSizes {
  std::uint64_t unpruned_bytes = 0;
  std::uint64_t pruned_bytes = 0;
  double reduction_percent = 0.0;
};

/// Per-level pruning statistics. Totals are sums over the level rows;
/// `stream` optionally carries whole-bitstream sizes including framing.
struct RunReport {
  std::vector<LevelStats> levels;
  std::uint64_t total_valid = 0;
  std::uint64_t total_rows = 0;
  double mean_valid_ratio = 0.0;
  std::uint64_t total_unpruned_bytes = 0;
  std::uint64_t total_pruned_bytes = 0;
  double total_reduction_percent = 0.0;
  std::optional<StreamSizes> stream;
};

double reduction_percent(std::uint64_t unpruned, std::uint64_t pruned);

/// Report from a mask and measured per-level byte counts.
RunReport make_report(const ValidityMask& mask, const GridConfig& config,
                      std::span<const std::uint64_t> unpruned_bytes,
                      std::span<const std::uint64_t> pruned_bytes);

/// Sizes of raw f32 storage: T*F*4 unpruned, valid*F*4 pruned per level.
RunReport storage_report(const ValidityMask& mask, const GridConfig& config);

std::string render_text(const RunReport& report);
/// One JSON object per line: a "level" record for each level, then "total".
std::string render_records(const RunReport& report);

}  // namespace hgfp
