// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "hgfp/cli.hpp"

int main(int argc, char** argv) { return hgfp::cli::run(argc, argv, std::cout, std::cerr); }
