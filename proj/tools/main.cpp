// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gmp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return gmp::cli::run(argc, argv, std::cout, std::cerr); }
