#include "kms_cayley/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return kms::run_cli(argc, argv, std::cout, std::cerr); }
