// SPDX-License-Identifier: Apache-2.0
//
// Byte-oriented range coder (carry-propagating, 32-bit range, LZMA-style
// output) with an adaptive frequency model, and the symbol stream format
// built on top of it.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace hgfp {

class RangeEncoder {
 public:
  void encode(std::uint32_t cum_freq, std::uint32_t freq, std::uint32_t total_freq);
  /// Equiprobable `bits`-bit value, bits <= 16.
  void encode_bits(std::uint32_t value, int bits);
  /// Flushes pending state and returns the byte stream.
  std::vector<std::uint8_t> finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  /// Throws ErrorKind::Decode if fewer than five bytes are available.
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);

  /// Target cumulative frequency of the next symbol; must be followed by
  /// decode() with that symbol's interval.
  std::uint32_t decode_freq(std::uint32_t total_freq);
  void decode(std::uint32_t cum_freq, std::uint32_t freq);
  std::uint32_t decode_bits(int bits);

  std::size_t consumed() const { return pos_; }

 private:
  std::uint8_t next_byte();
  void normalize();

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
};

/// Adaptive frequency table over a small alphabet. Counts start at one and
/// are halved once the total exceeds kMaxTotal.
template <std::size_t N>
class AdaptiveModel {
 public:
  static constexpr std::uint32_t kIncrement = 24;
  static constexpr std::uint32_t kMaxTotal = 1u << 16;

  AdaptiveModel() { freq_.fill(1); }

  std::uint32_t total() const { return total_; }
  std::uint32_t freq(std::size_t s) const { return freq_[s]; }
  std::uint32_t cum_freq(std::size_t s) const {
    std::uint32_t c = 0;
    for (std::size_t i = 0; i < s; ++i) c += freq_[i];
    return c;
  }

  /// Symbol whose interval holds `target`, with its cumulative frequency.
  std::size_t find(std::uint32_t target, std::uint32_t& cum) const {
    cum = 0;
    std::size_t s = 0;
    while (s + 1 < N && cum + freq_[s] <= target) cum += freq_[s++];
    return s;
  }

  void update(std::size_t s) {
    freq_[s] += kIncrement;
    total_ += kIncrement;
    if (total_ > kMaxTotal) {
      total_ = 0;
      for (auto& f : freq_) {
        f = (f + 1) / 2;
        total_ += f;
      }
    }
  }

 private:
  std::array<std::uint32_t, N> freq_{};
  std::uint32_t total_ = N;
};

/// Largest symbol magnitude the stream format accepts.
inline constexpr std::int32_t kMaxSymbolMagnitude = 1 << 23;

/// Symbol stream: u32 little-endian symbol count, then (if nonzero) the
/// range-coded body. Each symbol is zigzag-mapped; values below 16 are
/// literals, values below 2^16 a log2 bucket plus raw offset bits, larger
/// values an escape followed by 25 raw bits. Throws ErrorKind::DynamicRange
/// for |symbol| > 2^23.
std::vector<std::uint8_t> entropy_encode(std::span<const std::int32_t> symbols);

/// Inverse of entropy_encode. Throws ErrorKind::LengthMismatch when the
/// stored count differs from `count`, ErrorKind::Decode on truncated,
/// trailing or malformed input.
std::vector<std::int32_t> entropy_decode(std::span<const std::uint8_t> bytes, std::size_t count);

}  // namespace hgfp
