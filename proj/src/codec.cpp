// SPDX-License-Identifier: Apache-2.0
#include "hgfp/codec.hpp"

#include <numeric>

#include "hgfp/byte_io.hpp"

namespace hgfp {

namespace {

constexpr std::string_view kMagic = "HGFP";

void write_header(ByteWriter& w, const BitstreamHeader& h, std::span<const std::vector<std::uint8_t>> payloads) {
  const GridConfig& c = h.config;
  w.tag(kMagic);
  w.u16(kBitstreamVersion);
  w.u8(static_cast<std::uint8_t>(c.dims));
  w.u8(static_cast<std::uint8_t>(c.levels));
  w.u32(c.table_size);
  w.u16(static_cast<std::uint16_t>(c.feature_dim));
  w.u8(static_cast<std::uint8_t>(h.quant.mode));
  w.f64(h.quant.step);
  for (int k = 0; k < c.dims; ++k) w.f64(h.bbox.min()[k]);
  for (int k = 0; k < c.dims; ++k) w.f64(h.bbox.max()[k]);
  for (std::uint32_t r : c.resolutions) w.u32(r);
  for (std::uint32_t p : c.primes) w.u32(p);
  for (std::uint32_t n : h.valid_counts) w.u32(n);
  for (const auto& p : payloads) w.u64(p.size());
}

PrunedBitstream parse_verified(std::span<const std::uint8_t> body) {
  ByteReader r(body, "bitstream");
  r.expect_tag(kMagic);
  const std::uint16_t version = r.u16();
  if (version != kBitstreamVersion)
    fail(ErrorKind::Version, "bitstream: unsupported version " + std::to_string(version));

  GridConfig cfg;
  cfg.dims = r.u8();
  cfg.levels = r.u8();
  cfg.table_size = r.u32();
  cfg.feature_dim = r.u16();
  const std::uint8_t mode = r.u8();
  if (mode > 1) fail(ErrorKind::Corruption, "bitstream: unknown quant mode " + std::to_string(mode));
  QuantParams quant{r.f64(), static_cast<QuantMode>(mode)};
  if (cfg.dims < 1 || cfg.dims > kMaxDims) fail(ErrorKind::Corruption, "bitstream: bad dims");

  Point lo(cfg.dims), hi(cfg.dims);
  for (int k = 0; k < cfg.dims; ++k) lo[k] = r.f64();
  for (int k = 0; k < cfg.dims; ++k) hi[k] = r.f64();
  cfg.resolutions.resize(static_cast<std::size_t>(cfg.levels));
  for (auto& v : cfg.resolutions) v = r.u32();
  cfg.primes.resize(static_cast<std::size_t>(cfg.dims));
  for (auto& v : cfg.primes) v = r.u32();
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(cfg.levels));
  for (auto& v : counts) v = r.u32();
  std::vector<std::uint64_t> lengths(static_cast<std::size_t>(cfg.levels));
  for (auto& v : lengths) v = r.u64();

  cfg.validate();
  quant.validate();
  for (std::size_t l = 0; l < counts.size(); ++l)
    if (counts[l] < 1 || counts[l] > cfg.table_size)
      fail(ErrorKind::Corruption, "bitstream: level " + std::to_string(l) + " valid count out of range");

  const std::uint64_t total = std::accumulate(lengths.begin(), lengths.end(), std::uint64_t{0});
  r.expect_remaining(total);
  PrunedBitstream stream{BitstreamHeader{std::move(cfg), BoundingBox(lo, hi), quant, std::move(counts)}, {}};
  for (std::uint64_t len : lengths) {
    const auto bytes = r.bytes(len);
    stream.payloads.emplace_back(bytes.begin(), bytes.end());
  }
  return stream;
}

}  // namespace

void QuantParams::validate() const {
  if (mode != QuantMode::Quantized && mode != QuantMode::Raw) fail(ErrorKind::Config, "quant: unknown mode");
  if (!std::isfinite(step) || !(step > 0.0)) fail(ErrorKind::Config, "quant: step must be finite and > 0");
}

std::int32_t quantize_value(double value, double step) {
  if (!std::isfinite(value)) fail(ErrorKind::NonFinite, "quantize: non-finite feature value");
  const double s = std::round(value / step);
  if (!(std::fabs(s) <= double(kMaxSymbolMagnitude)))
    fail(ErrorKind::DynamicRange, "quantize: |" + std::to_string(value) + " / " + std::to_string(step) +
                                      "| exceeds 2^23; increase the quantization step");
  return static_cast<std::int32_t>(s);
}

std::uint64_t checksum64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::uint8_t> PrunedBitstream::serialize() const {
  if (payloads.size() != static_cast<std::size_t>(header.config.levels) ||
      header.valid_counts.size() != payloads.size())
    fail(ErrorKind::Config, "bitstream: level count mismatch");
  ByteWriter w;
  write_header(w, header, payloads);
  for (const auto& p : payloads) w.bytes(p);
  w.u64(checksum64(w.buffer()));
  return std::move(w).take();
}

PrunedBitstream PrunedBitstream::parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) fail(ErrorKind::Corruption, "bitstream: too short for a checksum");
  const auto body = bytes.first(bytes.size() - 8);
  ByteReader tail(bytes.last(8), "bitstream checksum");
  if (tail.u64() != checksum64(body)) fail(ErrorKind::Corruption, "bitstream: checksum mismatch");
  try {
    return parse_verified(body);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Version) throw;
    throw Error(ErrorKind::Corruption, std::string("bitstream: ") + e.what());
  }
}

std::size_t PrunedBitstream::header_bytes() const {
  ByteWriter w;
  write_header(w, header, payloads);
  return w.size();
}

std::size_t PrunedBitstream::payload_bytes() const {
  std::size_t n = 0;
  for (const auto& p : payloads) n += p.size();
  return n;
}

std::vector<std::uint8_t> encode_level_payload(std::span<const std::int32_t> symbols) {
  return entropy_encode(symbols);
}

ValidityMask recompute_mask(const BitstreamHeader& header, const PointSet& points) {
  const GridConfig& cfg = header.config;
  if (points.dims() != cfg.dims)
    fail(ErrorKind::PositionMismatch, "decode: point set has " + std::to_string(points.dims()) +
                                          " dims, stream has " + std::to_string(cfg.dims));
  try {
    ValidityMask mask = compute_validity(points, cfg, header.bbox);
    for (int l = 0; l < cfg.levels; ++l)
      if (mask.valid_count(l) != header.valid_counts[static_cast<std::size_t>(l)])
        fail(ErrorKind::PositionMismatch,
             "decode: level " + std::to_string(l) + " has " + std::to_string(mask.valid_count(l)) +
                 " valid rows for these points, stream carries " +
                 std::to_string(header.valid_counts[static_cast<std::size_t>(l)]));
    return mask;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::OutOfBounds)
      throw Error(ErrorKind::PositionMismatch, std::string("decode: ") + e.what());
    throw;
  }
}

std::vector<std::vector<double>> decode_payloads(const PrunedBitstream& stream) {
  const BitstreamHeader& h = stream.header;
  std::vector<std::vector<double>> out;
  out.reserve(stream.payloads.size());
  for (std::size_t l = 0; l < stream.payloads.size(); ++l) {
    const std::size_t count = std::size_t{h.valid_counts[l]} * static_cast<std::size_t>(h.config.feature_dim);
    const auto& payload = stream.payloads[l];
    std::vector<double> values;
    values.reserve(count);
    if (h.quant.mode == QuantMode::Raw) {
      ByteReader r(payload, "raw payload of level " + std::to_string(l));
      try {
        r.expect_remaining(count * 4);
      } catch (const Error& e) {
        throw Error(ErrorKind::Corruption, e.what());
      }
      for (std::size_t i = 0; i < count; ++i) {
        const float v = r.f32();
        if (!std::isfinite(v)) fail(ErrorKind::Corruption, "raw payload: non-finite value");
        values.push_back(double(v));
      }
    } else {
      for (std::int32_t s : entropy_decode(payload, count)) values.push_back(dequantize_value(s, h.quant.step));
    }
    out.push_back(std::move(values));
  }
  return out;
}

}  // namespace hgfp
