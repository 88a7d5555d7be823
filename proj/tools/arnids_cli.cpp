// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "arnids/commands.hpp"

int main(int argc, char** argv) { return arnids::run_cli(argc, argv, std::cout, std::cerr); }
