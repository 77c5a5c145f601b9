// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hgfp/error.hpp"

namespace hgfp::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kIoError = 3,           // unreadable/unwritable file or malformed input file
  kPositionMismatch = 4,  // decoder points disagree with the encoder's
  kCorruption = 5,        // bitstream checksum or structure failure
  kVerificationFailed = 6,
  kInvalidInput = 7,      // bad config, out-of-bounds point, quantizer range
};

ExitCode exit_code_for(ErrorKind kind);

/// Runs the command line (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hgfp::cli
