// SPDX-License-Identifier: Apache-2.0

#include "liner/cli.hpp"

int main(int argc, char **argv) { return liner::cli::run(argc, argv); }
