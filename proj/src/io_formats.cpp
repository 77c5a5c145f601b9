// SPDX-License-Identifier: Apache-2.0
#include "hgfp/io_formats.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

#include "hgfp/byte_io.hpp"

namespace hgfp {

namespace {

constexpr std::string_view kPointMagic = "HGPT";
constexpr std::string_view kGridMagic = "HGRD";

void check_version(std::uint16_t got, std::uint16_t want, const std::string& what) {
  if (got != want) fail(ErrorKind::Version, what + ": unsupported version " + std::to_string(got));
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string() + " for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::Io, "error reading " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "error writing " + path.string());
}

std::vector<std::uint8_t> serialize_points(const PointSet& points) {
  ByteWriter w;
  w.tag(kPointMagic);
  w.u16(kPointFileVersion);
  w.u8(static_cast<std::uint8_t>(points.dims()));
  w.u64(points.size());
  const auto& m = points.coords();
  for (Eigen::Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
  return std::move(w).take();
}

PointSet parse_points(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "point file");
  r.expect_tag(kPointMagic);
  check_version(r.u16(), kPointFileVersion, "point file");
  const int dims = r.u8();
  const std::uint64_t count = r.u64();
  if (dims < 1 || dims > kMaxDims) fail(ErrorKind::Shape, "point file: dims must be 1, 2 or 3");
  if (count == 0) fail(ErrorKind::Shape, "point file: empty point set");
  if (count > r.remaining() / (8u * static_cast<unsigned>(dims)))
    fail(ErrorKind::Truncation, "point file: expected " + std::to_string(r.position() + count * 8 * dims) +
                                    " bytes, got " + std::to_string(bytes.size()));
  if (r.remaining() != count * 8 * static_cast<std::uint64_t>(dims))
    fail(ErrorKind::Shape, "point file: expected " + std::to_string(r.position() + count * 8 * dims) +
                               " bytes, got " + std::to_string(bytes.size()));

  PointSet::Matrix m(static_cast<Eigen::Index>(count), dims);
  for (Eigen::Index n = 0; n < m.rows(); ++n)
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      const double v = r.f64();
      if (!std::isfinite(v))
        fail(ErrorKind::NonFinite, "point file: row " + std::to_string(n) + " axis " + std::to_string(k) +
                                       " is not finite");
      m(n, k) = v;
    }
  return PointSet(std::move(m));
}

void save_points(const PointSet& points, const std::filesystem::path& path) {
  write_file(path, serialize_points(points));
}

PointSet load_points(const std::filesystem::path& path) {
  try {
    return parse_points(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> serialize_grid(const HashGrid<float>& grid) {
  const GridConfig& c = grid.config();
  ByteWriter w;
  w.tag(kGridMagic);
  w.u16(kGridFileVersion);
  w.u8(static_cast<std::uint8_t>(c.dims));
  w.u8(static_cast<std::uint8_t>(c.levels));
  w.u32(c.table_size);
  w.u16(static_cast<std::uint16_t>(c.feature_dim));
  for (std::uint32_t v : c.resolutions) w.u32(v);
  for (std::uint32_t v : c.primes) w.u32(v);
  for (const auto& t : grid.tables())
    for (Eigen::Index i = 0; i < t.size(); ++i) w.f32(t.data()[i]);
  return std::move(w).take();
}

HashGrid<float> parse_grid(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "grid file");
  r.expect_tag(kGridMagic);
  check_version(r.u16(), kGridFileVersion, "grid file");
  GridConfig cfg;
  cfg.dims = r.u8();
  cfg.levels = r.u8();
  cfg.table_size = r.u32();
  cfg.feature_dim = r.u16();
  if (cfg.dims < 1 || cfg.dims > kMaxDims) fail(ErrorKind::Shape, "grid file: dims must be 1, 2 or 3");
  cfg.resolutions.resize(static_cast<std::size_t>(cfg.levels));
  for (auto& v : cfg.resolutions) v = r.u32();
  cfg.primes.resize(static_cast<std::size_t>(cfg.dims));
  for (auto& v : cfg.primes) v = r.u32();
  cfg.validate();

  const std::uint64_t scalars =
      std::uint64_t(cfg.levels) * cfg.table_size * static_cast<std::uint64_t>(cfg.feature_dim);
  if (r.remaining() != scalars * 4)
    fail(ErrorKind::Shape, "grid file: config implies " + std::to_string(r.position() + scalars * 4) +
                               " bytes, got " + std::to_string(bytes.size()));

  std::vector<HashGrid<float>::Table> tables;
  for (int l = 0; l < cfg.levels; ++l) {
    HashGrid<float>::Table t(cfg.table_size, cfg.feature_dim);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const float v = r.f32();
      if (!std::isfinite(v))
        fail(ErrorKind::NonFinite, "grid file: level " + std::to_string(l) + " row " +
                                       std::to_string(i / cfg.feature_dim) + " is not finite");
      t.data()[i] = v;
    }
    tables.push_back(std::move(t));
  }
  return HashGrid<float>(std::move(cfg), std::move(tables));
}

void save_grid(const HashGrid<float>& grid, const std::filesystem::path& path) {
  write_file(path, serialize_grid(grid));
}

HashGrid<float> load_grid(const std::filesystem::path& path) {
  try {
    return parse_grid(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

GridConfig default_config(int dims) { return GridConfig::geometric(dims, 8, 16, 512, 1u << 13, 2); }

GridConfig config_from_json(const nlohmann::json& j, int default_dims) {
  try {
    const int dims = j.value("dims", default_dims);
    GridConfig cfg = default_config(dims);
    cfg.levels = j.value("levels", cfg.levels);
    if (j.contains("resolutions")) {
      cfg.resolutions = j.at("resolutions").get<std::vector<std::uint32_t>>();
      if (!j.contains("levels")) cfg.levels = static_cast<int>(cfg.resolutions.size());
    } else {
      cfg.resolutions = geometric_resolutions(cfg.levels, j.value("base_resolution", 16u),
                                              j.value("max_resolution", 512u));
    }
    if (j.contains("log2_table_size")) {
      const unsigned log2 = j.at("log2_table_size").get<unsigned>();
      if (log2 < 1 || log2 > 31) fail(ErrorKind::Config, "log2_table_size must be in [1, 31]");
      cfg.table_size = 1u << log2;
    }
    cfg.table_size = j.value("table_size", cfg.table_size);
    cfg.feature_dim = j.value("feature_dim", cfg.feature_dim);
    if (j.contains("primes")) cfg.primes = j.at("primes").get<std::vector<std::uint32_t>>();
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("config: ") + e.what());
  }
}

nlohmann::json config_to_json(const GridConfig& c) {
  return {{"dims", c.dims},         {"levels", c.levels},           {"resolutions", c.resolutions},
          {"table_size", c.table_size}, {"feature_dim", c.feature_dim}, {"primes", c.primes}};
}

GridConfig load_config(const std::filesystem::path& path, int default_dims) {
  const auto bytes = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, path.string() + ": " + e.what());
  }
  return config_from_json(j, default_dims);
}

}  // namespace hgfp
