// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "etlforge/cli.hpp"

int main(int argc, char** argv) {
    return etlforge::run_cli(argc, argv, std::cout, std::cerr);
}
