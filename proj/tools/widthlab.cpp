#include <iostream>

#include "widthlab/cli.hpp"

int main(int argc, char** argv) { return widthlab::cli::run_cli(argc, argv, std::cout, std::cerr); }
