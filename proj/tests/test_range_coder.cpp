// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "hgfp/error.hpp"
#include "hgfp/range_coder.hpp"

using namespace hgfp;

namespace {

std::vector<std::int32_t> random_symbols(std::mt19937_64& rng) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 3000)(rng);
  const int style = std::uniform_int_distribution<int>(0, 3)(rng);
  std::vector<std::int32_t> s(n);
  std::geometric_distribution<std::int32_t> small(0.3);
  std::uniform_int_distribution<std::int32_t> wide(-kMaxSymbolMagnitude, kMaxSymbolMagnitude);
  std::uniform_int_distribution<std::int32_t> mid(-300, 300);
  std::bernoulli_distribution outlier(0.02);
  for (auto& v : s) {
    switch (style) {
      case 0: v = (small(rng) * (rng() & 1 ? 1 : -1)); break;
      case 1: v = mid(rng); break;
      case 2: v = wide(rng); break;
      default: v = outlier(rng) ? wide(rng) : small(rng); break;
    }
  }
  return s;
}

ErrorKind decode_error(std::span<const std::uint8_t> bytes, std::size_t count) {
  try {
    entropy_decode(bytes, count);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("decode succeeded");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("empty sequence is a header-only payload") {
  const auto bytes = entropy_encode({});
  CHECK(bytes.size() == 4);
  CHECK(entropy_decode(bytes, 0).empty());
}

TEST_CASE("all-zero sequences compress far below two bytes per symbol") {
  const std::vector<std::int32_t> zeros(10000, 0);
  const auto bytes = entropy_encode(zeros);
  CHECK(bytes.size() < 200);  // 1% of 2 * 10^4
  CHECK(entropy_decode(bytes, zeros.size()) == zeros);
}

TEST_CASE("boundary symbols round-trip") {
  const std::vector<std::int32_t> s{0,      1,      -1,     7,         -8,        8,         15,
                                    -16,    16,     32767,  -32768,    32768,     -32769,    65535,
                                    65536,  1 << 20, -(1 << 20), kMaxSymbolMagnitude, -kMaxSymbolMagnitude,
                                    0,      0,      0};
  CHECK(entropy_decode(entropy_encode(s), s.size()) == s);
}

TEST_CASE("random sequences round-trip") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_symbols(rng);
    REQUIRE(entropy_decode(entropy_encode(s), s.size()) == s);
  }
}

TEST_CASE("symbols beyond 2^23 are rejected") {
  const std::vector<std::int32_t> s{0, kMaxSymbolMagnitude + 1};
  CHECK_THROWS_AS(entropy_encode(s), Error);
  try {
    entropy_encode(std::vector<std::int32_t>{-kMaxSymbolMagnitude - 1});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DynamicRange);
  }
}

TEST_CASE("wrong count is a length mismatch") {
  const std::vector<std::int32_t> s(100, 3);
  const auto bytes = entropy_encode(s);
  CHECK(decode_error(bytes, 99) == ErrorKind::LengthMismatch);
  CHECK(decode_error(bytes, 101) == ErrorKind::LengthMismatch);
  CHECK(decode_error(entropy_encode({}), 1) == ErrorKind::LengthMismatch);
}

TEST_CASE("truncated or padded payloads fail to decode") {
  std::mt19937_64 rng(8);
  std::vector<std::int32_t> s(500);
  for (auto& v : s) v = std::uniform_int_distribution<std::int32_t>(-1000, 1000)(rng);
  auto bytes = entropy_encode(s);
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{6}, bytes.size() / 2, bytes.size() - 1})
    CHECK(decode_error(std::span(bytes).first(cut), s.size()) != ErrorKind::Io);
  bytes.push_back(0);
  CHECK(decode_error(bytes, s.size()) == ErrorKind::Decode);
}

TEST_CASE("single bit flips are almost always caught by the coder itself") {
  std::mt19937_64 rng(12);
  std::vector<std::int32_t> s(400);
  for (auto& v : s) v = std::uniform_int_distribution<std::int32_t>(-70000, 70000)(rng);
  const auto clean = entropy_encode(s);
  int detected = 0;
  for (std::size_t bit = 32; bit < clean.size() * 8; ++bit) {
    auto bytes = clean;
    bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    try {
      detected += entropy_decode(bytes, s.size()) != s;
    } catch (const Error&) {
      ++detected;
    }
  }
  // Flips in the final flush bytes can be invisible; the bitstream checksum
  // covers those.
  CHECK(detected >= static_cast<int>(clean.size() * 8 - 32) * 9 / 10);
}

TEST_CASE("adaptive model keeps a valid distribution through rescaling") {
  AdaptiveModel<5> m;
  for (int i = 0; i < 100000; ++i) {
    m.update(static_cast<std::size_t>(i % 7 == 0 ? 4 : 1));
    REQUIRE(m.total() <= AdaptiveModel<5>::kMaxTotal);
  }
  std::uint32_t sum = 0;
  for (std::size_t s = 0; s < 5; ++s) {
    CHECK(m.freq(s) >= 1);
    sum += m.freq(s);
  }
  CHECK(sum == m.total());
  std::uint32_t cum = 0;
  CHECK(m.find(m.cum_freq(4), cum) == 4);
  CHECK(cum == m.cum_freq(4));
}
