// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "klocal/cli.hpp"

int main(int argc, char** argv) { return klocal::cli_main(argc, argv, std::cout, std::cerr); }
