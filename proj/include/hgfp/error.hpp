// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace hgfp {

enum class ErrorKind {
  Config,           // malformed GridConfig, BoundingBox, or shape mismatch
  OutOfBounds,      // point or scaled coordinate outside its domain
  NonFinite,        // NaN or Inf in points or features
  DynamicRange,     // quantized symbol magnitude too large
  Decode,           // entropy payload truncated or malformed
  LengthMismatch,   // entropy payload symbol count differs from expectation
  Corruption,       // checksum failure or inconsistent stream structure
  PositionMismatch, // decoder point set disagrees with the encoder's
  BadMagic,
  Version,
  Truncation,
  Shape,            // byte length disagrees with the declared shape
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace hgfp
