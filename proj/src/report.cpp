// SPDX-License-Identifier: Apache-2.0
#include "hgfp/report.hpp"

#include <cstdio>

#include <json.hpp>

namespace hgfp {

double reduction_percent(std::uint64_t unpruned, std::uint64_t pruned) {
  if (unpruned == 0) return 0.0;
  return 100.0 * (1.0 - double(pruned) / double(unpruned));
}

RunReport make_report(const ValidityMask& mask, const GridConfig& config,
                      std::span<const std::uint64_t> unpruned_bytes,
                      std::span<const std::uint64_t> pruned_bytes) {
  mask.check_matches(config);
  const auto levels = static_cast<std::size_t>(config.levels);
  if (unpruned_bytes.size() != levels || pruned_bytes.size() != levels)
    fail(ErrorKind::Config, "report: byte counts must cover every level");

  RunReport r;
  double ratio_sum = 0.0;
  for (int l = 0; l < config.levels; ++l) {
    const auto i = static_cast<std::size_t>(l);
    LevelStats s;
    s.level = l;
    s.resolution = config.resolutions[i];
    s.table_size = config.table_size;
    s.valid_count = mask.valid_count(l);
    s.valid_ratio = double(s.valid_count) / double(s.table_size);
    s.unpruned_bytes = unpruned_bytes[i];
    s.pruned_bytes = pruned_bytes[i];
    s.reduction_percent = reduction_percent(s.unpruned_bytes, s.pruned_bytes);
    r.total_valid += s.valid_count;
    r.total_rows += s.table_size;
    r.total_unpruned_bytes += s.unpruned_bytes;
    r.total_pruned_bytes += s.pruned_bytes;
    ratio_sum += s.valid_ratio;
    r.levels.push_back(s);
  }
  r.mean_valid_ratio = ratio_sum / double(config.levels);
  r.total_reduction_percent = reduction_percent(r.total_unpruned_bytes, r.total_pruned_bytes);
  return r;
}

RunReport storage_report(const ValidityMask& mask, const GridConfig& config) {
  std::vector<std::uint64_t> unpruned, pruned;
  const std::uint64_t row_bytes = std::uint64_t(config.feature_dim) * 4;
  for (int l = 0; l < config.levels; ++l) {
    unpruned.push_back(row_bytes * config.table_size);
    pruned.push_back(row_bytes * mask.valid_count(l));
  }
  return make_report(mask, config, unpruned, pruned);
}

std::string render_text(const RunReport& r) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%5s %10s %10s %10s %9s %12s %12s %10s\n", "level", "resolution", "table",
                "valid", "ratio", "unpruned_B", "pruned_B", "reduction");
  out += line;
  for (const LevelStats& s : r.levels) {
    std::snprintf(line, sizeof line, "%5d %10u %10u %10u %9.5f %12llu %12llu %9.2f%%\n", s.level, s.resolution,
                  s.table_size, s.valid_count, s.valid_ratio, static_cast<unsigned long long>(s.unpruned_bytes),
                  static_cast<unsigned long long>(s.pruned_bytes), s.reduction_percent);
    out += line;
  }
  std::snprintf(line, sizeof line, "%5s %10s %10llu %10llu %9.5f %12llu %12llu %9.2f%%\n", "total", "-",
                static_cast<unsigned long long>(r.total_rows), static_cast<unsigned long long>(r.total_valid),
                r.mean_valid_ratio, static_cast<unsigned long long>(r.total_unpruned_bytes),
                static_cast<unsigned long long>(r.total_pruned_bytes), r.total_reduction_percent);
  out += line;
  if (r.stream) {
    std::snprintf(line, sizeof line, "bitstream: unpruned %llu B, pruned %llu B, reduction %.2f%%\n",
                  static_cast<unsigned long long>(r.stream->unpruned_bytes),
                  static_cast<unsigned long long>(r.stream->pruned_bytes), r.stream->reduction_percent);
    out += line;
  }
  return out;
}

std::string render_records(const RunReport& r) {
  std::string out;
  for (const LevelStats& s : r.levels) {
    nlohmann::json j{{"record", "level"},
                     {"level", s.level},
                     {"resolution", s.resolution},
                     {"table_size", s.table_size},
                     {"valid_count", s.valid_count},
                     {"valid_ratio", s.valid_ratio},
                     {"unpruned_bytes", s.unpruned_bytes},
                     {"pruned_bytes", s.pruned_bytes},
                     {"reduction_percent", s.reduction_percent}};
    out += j.dump() + "\n";
  }
  nlohmann::json total{{"record", "total"},
                       {"total_rows", r.total_rows},
                       {"total_valid", r.total_valid},
                       {"mean_valid_ratio", r.mean_valid_ratio},
                       {"unpruned_bytes", r.total_unpruned_bytes},
                       {"pruned_bytes", r.total_pruned_bytes},
                       {"reduction_percent", r.total_reduction_percent}};
  if (r.stream) {
    total["stream_unpruned_bytes"] = r.stream->unpruned_bytes;
    total["stream_pruned_bytes"] = r.stream->pruned_bytes;
    total["stream_reduction_percent"] = r.stream->reduction_percent;
  }
  out += total.dump() + "\n";
  return out;
}

}  // namespace hgfp
