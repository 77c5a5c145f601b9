// SPDX-License-Identifier: Apache-2.0
#include "hgfp/range_coder.hpp"

#include <bit>
#include <cstdlib>
#include <string>

#include "hgfp/byte_io.hpp"
#include "hgfp/error.hpp"

namespace hgfp {

namespace {

constexpr std::uint32_t kTop = 1u << 24;

constexpr std::uint32_t kLiteralCount = 16;
constexpr std::uint32_t kFirstBucketBits = 4;
constexpr std::uint32_t kLastBucketBits = 15;
constexpr std::uint32_t kBucketBase = kLiteralCount;
constexpr std::uint32_t kEscape = kBucketBase + (kLastBucketBits - kFirstBucketBits + 1);
constexpr std::size_t kAlphabet = kEscape + 1;
constexpr int kEscapeBits = 25;

using SymbolModel = AdaptiveModel<kAlphabet>;

std::uint32_t zigzag(std::int32_t v) {
  return (static_cast<std::uint32_t>(v) << 1) ^ static_cast<std::uint32_t>(v >> 31);
}

std::int32_t unzigzag(std::uint32_t u) {
  return static_cast<std::int32_t>(u >> 1) ^ -static_cast<std::int32_t>(u & 1u);
}

void put_symbol(RangeEncoder& enc, SymbolModel& model, std::size_t s) {
  enc.encode(model.cum_freq(s), model.freq(s), model.total());
  model.update(s);
}

std::size_t get_symbol(RangeDecoder& dec, SymbolModel& model) {
  std::uint32_t cum = 0;
  const std::size_t s = model.find(dec.decode_freq(model.total()), cum);
  dec.decode(cum, model.freq(s));
  model.update(s);
  return s;
}

}  // namespace

void RangeEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t pending = cache_;
    do {
      out_.push_back(static_cast<std::uint8_t>(pending + carry));
      pending = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

void RangeEncoder::encode(std::uint32_t cum_freq, std::uint32_t freq, std::uint32_t total_freq) {
  range_ /= total_freq;
  low_ += static_cast<std::uint64_t>(cum_freq) * range_;
  range_ *= freq;
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::encode_bits(std::uint32_t value, int bits) { encode(value, 1, 1u << bits); }

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : in_(bytes) {
  if (in_.size() < 5) fail(ErrorKind::Decode, "range decoder: stream shorter than 5 bytes");
  if (in_[0] != 0) fail(ErrorKind::Decode, "range decoder: bad lead byte");
  for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= in_.size()) fail(ErrorKind::Decode, "range decoder: truncated stream");
  return in_[pos_++];
}

void RangeDecoder::normalize() {
  while (range_ < kTop) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
}

std::uint32_t RangeDecoder::decode_freq(std::uint32_t total_freq) {
  range_ /= total_freq;
  const std::uint32_t v = code_ / range_;
  if (v >= total_freq) fail(ErrorKind::Decode, "range decoder: code outside the coding interval");
  return v;
}

void RangeDecoder::decode(std::uint32_t cum_freq, std::uint32_t freq) {
  code_ -= cum_freq * range_;
  range_ *= freq;
  normalize();
}

std::uint32_t RangeDecoder::decode_bits(int bits) {
  const std::uint32_t v = decode_freq(1u << bits);
  decode(v, 1);
  return v;
}

std::vector<std::uint8_t> entropy_encode(std::span<const std::int32_t> symbols) {
  ByteWriter header;
  if (symbols.size() > 0xFFFFFFFFu) fail(ErrorKind::DynamicRange, "entropy_encode: too many symbols");
  header.u32(static_cast<std::uint32_t>(symbols.size()));
  std::vector<std::uint8_t> out = std::move(header).take();
  if (symbols.empty()) return out;

  RangeEncoder enc;
  SymbolModel model;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const std::int32_t v = symbols[i];
    if (v > kMaxSymbolMagnitude || v < -kMaxSymbolMagnitude)
      fail(ErrorKind::DynamicRange, "entropy_encode: symbol " + std::to_string(i) + " = " +
                                        std::to_string(v) + " exceeds 2^23");
    const std::uint32_t u = zigzag(v);
    if (u < kLiteralCount) {
      put_symbol(enc, model, u);
    } else if (u < (1u << (kLastBucketBits + 1))) {
      const int k = std::bit_width(u) - 1;
      put_symbol(enc, model, kBucketBase + static_cast<std::uint32_t>(k) - kFirstBucketBits);
      enc.encode_bits(u - (1u << k), k);
    } else {
      put_symbol(enc, model, kEscape);
      enc.encode_bits(u >> 16, kEscapeBits - 16);
      enc.encode_bits(u & 0xFFFFu, 16);
    }
  }
  const std::vector<std::uint8_t> body = enc.finish();
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::vector<std::int32_t> entropy_decode(std::span<const std::uint8_t> bytes, std::size_t count) {
  ByteReader reader(bytes, "entropy payload");
  std::uint32_t stored = 0;
  try {
    stored = reader.u32();
  } catch (const Error&) {
    fail(ErrorKind::Decode, "entropy_decode: missing symbol count");
  }
  if (stored != count)
    fail(ErrorKind::LengthMismatch, "entropy_decode: payload holds " + std::to_string(stored) +
                                        " symbols, expected " + std::to_string(count));
  const std::span<const std::uint8_t> body = bytes.subspan(4);
  std::vector<std::int32_t> symbols;
  if (count == 0) {
    if (!body.empty()) fail(ErrorKind::Decode, "entropy_decode: trailing bytes after empty stream");
    return symbols;
  }

  symbols.reserve(count);
  RangeDecoder dec(body);
  SymbolModel model;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t s = get_symbol(dec, model);
    std::uint32_t u = 0;
    if (s < kLiteralCount) {
      u = static_cast<std::uint32_t>(s);
    } else if (s < kEscape) {
      const int k = static_cast<int>(s - kBucketBase + kFirstBucketBits);
      u = (1u << k) + dec.decode_bits(k);
    } else {
      u = dec.decode_bits(kEscapeBits - 16) << 16;
      u |= dec.decode_bits(16);
      if (u < (1u << (kLastBucketBits + 1)) || u > zigzag(kMaxSymbolMagnitude))
        fail(ErrorKind::Decode, "entropy_decode: malformed escape value");
    }
    symbols.push_back(unzigzag(u));
  }
  if (dec.consumed() != body.size())
    fail(ErrorKind::Decode, "entropy_decode: " + std::to_string(body.size() - dec.consumed()) +
                                " trailing bytes");
  return symbols;
}

}  // namespace hgfp
