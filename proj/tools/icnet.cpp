// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include "icnet/cli/commands.hpp"

int main(int argc, char** argv) { return icnet::cli::main_entry(argc, argv); }
