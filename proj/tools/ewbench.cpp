#include <iostream>

#include "ewb/cli.hpp"

int main(int argc, char** argv) { return ewb::cli::run_cli(argc, argv, std::cout, std::cerr); }
