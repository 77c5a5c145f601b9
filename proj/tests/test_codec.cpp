// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "hgfp/codec.hpp"
#include "hgfp/synth.hpp"
#include "hgfp/verify.hpp"
#include "test_support.hpp"

using namespace hgfp;

namespace {

ErrorKind error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an hgfp::Error");
  return ErrorKind::Io;
}

test::Triple clustered_case(std::uint64_t seed, std::uint32_t table_size = 1u << 13) {
  SynthSpec spec;
  spec.n_points = 1000;
  spec.cluster_std = 0.05;
  spec.seed = seed;
  PointSet points = generate_points(spec);
  const GridConfig cfg = GridConfig::geometric(3, 8, 16, 512, table_size, 2);
  BoundingBox box = enclosing_box(points);
  return test::Triple{cfg, box, std::move(points), random_grid(cfg, seed)};
}

}  // namespace

TEST_CASE("quantize examples") {
  CHECK(quantize_value(0.0, 0.37) == 0);
  CHECK(quantize_value(1.0, 0.25) == 4);
  CHECK(dequantize_value(4, 0.25) == 1.0);
  CHECK(quantize_value(0.30, 0.25) == 1);
  CHECK(dequantize_value(1, 0.25) == 0.25);
  // Halves round away from zero.
  CHECK(quantize_value(0.125, 0.25) == 1);
  CHECK(quantize_value(-0.125, 0.25) == -1);
  CHECK(quantize_value(0.375, 0.25) == 2);
}

TEST_CASE("quantization error is at most half a step on a dense lattice") {
  for (double q : {0.25, 0.01, 1.0 / 256.0, 3.0}) {
    for (int k = -20000; k <= 20000; ++k) {
      const double v = k * q / 64.0 + 1e-3 * q * (k % 7);
      const double back = dequantize_value(quantize_value(v, q), q);
      REQUIRE(std::abs(v - back) <= q / 2 * (1 + 1e-12));
    }
  }
}

TEST_CASE("quantizer rejects values beyond the symbol range") {
  CHECK(error_of([] { quantize_value(1.0, 1e-9); }) == ErrorKind::DynamicRange);
  CHECK(error_of([] { quantize_value(std::nan(""), 0.1); }) == ErrorKind::NonFinite);
  CHECK(error_of([] { QuantParams::quantized(0.0).validate(); }) == ErrorKind::Config);
  CHECK(error_of([] { QuantParams::quantized(-1.0).validate(); }) == ErrorKind::Config);
}

TEST_CASE("raw-mode stream size is header plus four bytes per valid scalar") {
  const test::Triple t = test::random_triple(77, 500);
  const PrunedBitstream s = encode_grid(t.grid, t.points, t.bbox, QuantParams::raw());
  const ValidityMask mask = compute_validity(t.points, t.config, t.bbox);
  std::size_t valid = 0;
  for (std::uint32_t n : mask.valid_counts()) valid += n;
  const int d = t.config.dims, levels = t.config.levels;
  const std::size_t header = 4 + 2 + 1 + 1 + 4 + 2 + 1 + 8 + 16 * d + 4 * levels + 4 * d + 4 * levels + 8 * levels;
  CHECK(s.header_bytes() == header);
  CHECK(s.serialize().size() == header + valid * static_cast<std::size_t>(t.config.feature_dim) * 4 + 8);
}

TEST_CASE("raw round trip reproduces valid rows bit-exactly and zeros elsewhere") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const test::Triple t = test::random_triple(seed, 2000);
    const auto bytes = encode_grid(t.grid, t.points, t.bbox, QuantParams::raw()).serialize();
    const HashGrid<float> decoded = decode_grid<float>(bytes, t.points);
    const ValidityMask mask = compute_validity(t.points, t.config, t.bbox);
    for (int l = 0; l < t.config.levels; ++l)
      for (std::uint32_t i = 0; i < t.config.table_size; ++i) {
        if (mask.level(l).test(i))
          REQUIRE(decoded.table(l).row(i) == t.grid.table(l).row(i));
        else
          REQUIRE(decoded.table(l).row(i).isZero(0.0f));
      }
  }
}

TEST_CASE("quantized round trip: valid rows dequantize exactly, error within q/2") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const test::Triple t = test::random_triple(100 + seed, 2000);
    const double q = seed % 2 ? 0.01 : 1.0 / 256.0;
    const auto bytes = encode_grid(t.grid, t.points, t.bbox, QuantParams::quantized(q)).serialize();
    const HashGrid<float> decoded = decode_grid<float>(bytes, t.points);
    const HashGrid<float> expected = quantize_dequantize(t.grid, QuantParams::quantized(q));
    const ValidityMask mask = compute_validity(t.points, t.config, t.bbox);
    for (int l = 0; l < t.config.levels; ++l)
      mask.level(l).for_each_set([&](std::uint32_t i) {
        REQUIRE(decoded.table(l).row(i) == expected.table(l).row(i));
        const Eigen::ArrayXd err =
            (decoded.table(l).row(i).cast<double>() - t.grid.table(l).row(i).cast<double>()).array().abs();
        // f32 storage of the dequantized value adds at most one f32 ulp.
        REQUIRE(err.maxCoeff() <= q / 2 + 1e-7);
      });
  }
}

TEST_CASE("encoding is deterministic and blind to invalid rows") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const test::Triple t = test::random_triple(300 + seed, 3000);
    const ValidityMask mask = compute_validity(t.points, t.config, t.bbox);
    for (const QuantParams q : {QuantParams{}, QuantParams::raw()}) {
      const auto a = encode_grid(t.grid, t.points, t.bbox, q).serialize();
      CHECK(a == encode_grid(t.grid, t.points, t.bbox, q).serialize());
      const HashGrid<float> noisy = test::scramble_invalid_rows(t.grid, mask, seed);
      CHECK(a == encode_grid(noisy, t.points, t.bbox, q).serialize());
      HashGrid<float> zeroed = t.grid;
      for (int l = 0; l < zeroed.levels(); ++l)
        for (std::uint32_t i = 0; i < t.config.table_size; ++i)
          if (!mask.level(l).test(i)) zeroed.table(l).row(i).setZero();
      CHECK(a == encode_grid(zeroed, t.points, t.bbox, q).serialize());
    }
  }
}

TEST_CASE("clustered 3D input: pruned stream is smaller, reduction tracks the valid ratio") {
  const test::Triple t = clustered_case(4);
  const ValidityMask mask = compute_validity(t.points, t.config, t.bbox);
  const auto pruned = encode_with_mask(t.grid, mask, t.bbox, QuantParams{}).serialize();
  const auto unpruned = encode_with_mask(t.grid, ValidityMask::all_valid(t.config), t.bbox, QuantParams{}).serialize();
  CHECK(pruned.size() < unpruned.size());

  double mean_ratio = 0.0;
  for (int l = 0; l < t.config.levels; ++l) mean_ratio += double(mask.valid_count(l)) / t.config.table_size;
  mean_ratio /= t.config.levels;
  const double predicted = 1.0 - mean_ratio;
  const double measured = 1.0 - double(pruned.size()) / double(unpruned.size());
  CHECK(std::abs(measured - predicted) <= 0.10 * predicted);
}

TEST_CASE("pruned payload never exceeds the unpruned payload") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const test::Triple t = test::random_triple(700 + seed, 3000);
    const ValidityMask mask = compute_validity(t.points, t.config, t.bbox);
    for (const QuantParams q : {QuantParams{}, QuantParams::raw()}) {
      const auto p = encode_with_mask(t.grid, mask, t.bbox, q);
      const auto u = encode_with_mask(t.grid, ValidityMask::all_valid(t.config), t.bbox, q);
      CHECK(p.payload_bytes() <= u.payload_bytes());
    }
  }
}

TEST_CASE("every single-bit flip of a stream is a checksum failure") {
  const test::Triple t = test::random_triple(5, 200);
  for (const QuantParams q : {QuantParams{}, QuantParams::raw()}) {
    const auto clean = encode_grid(t.grid, t.points, t.bbox, q).serialize();
    for (std::size_t bit = 0; bit < clean.size() * 8; ++bit) {
      auto bytes = clean;
      bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      REQUIRE(error_of([&] { decode_grid<float>(bytes, t.points); }) == ErrorKind::Corruption);
    }
  }
}

TEST_CASE("truncated streams and unknown versions are rejected") {
  const test::Triple t = test::random_triple(6, 200);
  const auto clean = encode_grid(t.grid, t.points, t.bbox, QuantParams{}).serialize();
  for (std::size_t n : {std::size_t{0}, std::size_t{7}, std::size_t{30}, clean.size() - 1})
    CHECK(error_of([&] { PrunedBitstream::parse(std::span(clean).first(n)); }) == ErrorKind::Corruption);

  auto bumped = clean;
  bumped[4] = 9;  // version low byte
  const std::uint64_t sum = checksum64(std::span(bumped).first(bumped.size() - 8));
  for (int i = 0; i < 8; ++i) bumped[bumped.size() - 8 + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(sum >> (8 * i));
  CHECK(error_of([&] { PrunedBitstream::parse(bumped); }) == ErrorKind::Version);
}

TEST_CASE("header fields round-trip through parse") {
  const test::Triple t = test::random_triple(8, 500);
  const PrunedBitstream s = encode_grid(t.grid, t.points, t.bbox, QuantParams::quantized(0.02));
  const PrunedBitstream back = PrunedBitstream::parse(s.serialize());
  CHECK(back.header.config == t.config);
  CHECK(back.header.bbox == t.bbox);
  CHECK(back.header.quant == QuantParams::quantized(0.02));
  CHECK(back.header.valid_counts == s.header.valid_counts);
  CHECK(back.payloads == s.payloads);
}

TEST_CASE("decoding with a point set missing a contributing point is a position mismatch") {
  const test::Triple t = clustered_case(9);
  const auto bytes = encode_grid(t.grid, t.points, t.bbox, QuantParams{}).serialize();
  const ValidityMask full = compute_validity(t.points, t.config, t.bbox);

  // Find a point whose removal clears at least one mask bit.
  bool found = false;
  for (Eigen::Index drop = 0; drop < static_cast<Eigen::Index>(t.points.size()) && !found; ++drop) {
    PointSet::Matrix m(t.points.size() - 1, 3);
    m.topRows(drop) = t.points.coords().topRows(drop);
    m.bottomRows(m.rows() - drop) = t.points.coords().bottomRows(m.rows() - drop);
    const PointSet fewer(m);
    const BoundingBox& box = t.bbox;
    bool in_box = true;
    for (int k = 0; k < 3; ++k)
      in_box = in_box && m.col(k).minCoeff() >= box.min()[k] && m.col(k).maxCoeff() <= box.max()[k];
    if (!in_box) continue;
    if (compute_validity(fewer, t.config, box).valid_counts() == full.valid_counts()) continue;
    found = true;
    CHECK(error_of([&] { decode_grid<float>(bytes, fewer); }) == ErrorKind::PositionMismatch);
  }
  CHECK(found);

  PointSet::Matrix outside = t.points.coords();
  outside(0, 0) = t.bbox.max()[0] + 1.0;
  CHECK(error_of([&] { decode_grid<float>(bytes, PointSet(outside)); }) == ErrorKind::PositionMismatch);
  CHECK(error_of([&] { decode_grid<float>(bytes, PointSet(PointSet::Matrix::Zero(3, 2))); }) ==
        ErrorKind::PositionMismatch);
}

TEST_CASE("decoder accepts the encoder's points in any order") {
  const test::Triple t = test::random_triple(10, 3000);
  const auto bytes = encode_grid(t.grid, t.points, t.bbox, QuantParams{}).serialize();
  const PointSet reversed(t.points.coords().colwise().reverse());
  const HashGrid<float> a = decode_grid<float>(bytes, t.points);
  const HashGrid<float> b = decode_grid<float>(bytes, reversed);
  for (int l = 0; l < t.config.levels; ++l) CHECK(a.table(l) == b.table(l));
}

TEST_CASE("end-to-end inference is lossless against the quantized original") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CAPTURE(seed);
    const test::Triple t = test::random_triple(9000 + seed, 3000);
    const QuantParams q = seed % 3 == 0 ? QuantParams::raw() : QuantParams::quantized(seed % 3 == 1 ? 0.01 : 1.0 / 64);
    const PrunedBitstream stream = PrunedBitstream::parse(encode_grid(t.grid, t.points, t.bbox, q).serialize());
    const HashGrid<float> decoded = decode_grid<float>(stream, t.points);
    REQUIRE(interpolate_all(decoded, t.points, t.bbox) ==
            interpolate_all(quantize_dequantize(t.grid, q), t.points, t.bbox));
    const VerificationResult v = verify_stream(t.grid, t.points, stream);
    REQUIRE(v.passed());
  }
}

TEST_CASE("verification names a perturbed valid row and flags mask/oracle disagreement") {
  const test::Triple t = test::random_triple(42, 2000);
  const QuantParams q;
  const PrunedBitstream stream = encode_grid(t.grid, t.points, t.bbox, q);
  HashGrid<float> decoded = decode_grid<float>(stream, t.points);
  const HashGrid<float> reference = quantize_dequantize(t.grid, q);
  const ValidityMask mask = compute_validity(t.points, t.config, t.bbox);
  const ValidityMask oracle = touched_indices_oracle(t.points, t.config, t.bbox);
  REQUIRE(verify_reconstruction(reference, decoded, t.points, t.bbox, mask, oracle).passed());

  const int level = t.config.levels - 1;
  const std::uint32_t index = test::set_bits(mask.level(level)).back();
  decoded.table(level)(index, 0) += 0.5f;
  const VerificationResult bad = verify_reconstruction(reference, decoded, t.points, t.bbox, mask, oracle);
  CHECK_FALSE(bad.passed());
  CHECK(bad.max_abs_deviation > 0.0);
  REQUIRE(bad.first_bad_row.has_value());
  CHECK(bad.first_bad_row->level == level);
  CHECK(bad.first_bad_row->index == index);

  std::vector<LevelBits> tampered;
  for (int l = 0; l < mask.levels(); ++l) tampered.push_back(mask.level(l));
  std::uint32_t unused = 0;
  while (tampered[0].test(unused)) ++unused;
  tampered[0].set(unused);
  decoded.table(level)(index, 0) -= 0.5f;
  const VerificationResult mismatch =
      verify_reconstruction(reference, decoded, t.points, t.bbox, mask, ValidityMask(tampered));
  CHECK_FALSE(mismatch.passed());
  CHECK_FALSE(mismatch.mask_matches_oracle);
}
