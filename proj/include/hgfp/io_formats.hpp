// SPDX-License-Identifier: Apache-2.0
//
// On-disk point sets ("HGPT", f64 coordinates), grids ("HGRD", f32 features)
// and JSON grid configs. All binary formats are little-endian.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hgfp/grid.hpp"

namespace hgfp {

inline constexpr std::uint16_t kPointFileVersion = 1;
inline constexpr std::uint16_t kGridFileVersion = 1;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// "HGPT" | version u16 | dims u8 | count u64 | count*dims f64
std::vector<std::uint8_t> serialize_points(const PointSet& points);
PointSet parse_points(std::span<const std::uint8_t> bytes);
void save_points(const PointSet& points, const std::filesystem::path& path);
PointSet load_points(const std::filesystem::path& path);

// "HGRD" | version u16 | dims u8 | levels u8 | table_size u32 |
// feature_dim u16 | resolutions (L u32) | primes (d u32) | L*T*F f32
std::vector<std::uint8_t> serialize_grid(const HashGrid<float>& grid);
HashGrid<float> parse_grid(std::span<const std::uint8_t> bytes);
void save_grid(const HashGrid<float>& grid, const std::filesystem::path& path);
HashGrid<float> load_grid(const std::filesystem::path& path);

/// Default desk-scale config: 8 levels, resolutions 16..512 geometric,
/// T = 2^13, F = 2.
GridConfig default_config(int dims);

/// Reads a JSON config. Recognized keys: dims, levels, base_resolution,
/// max_resolution, resolutions, table_size, log2_table_size, feature_dim,
/// primes. Missing keys take default_config values; dims defaults to
/// `default_dims`.
GridConfig config_from_json(const nlohmann::json& j, int default_dims);
nlohmann::json config_to_json(const GridConfig& config);
GridConfig load_config(const std::filesystem::path& path, int default_dims);

}  // namespace hgfp
