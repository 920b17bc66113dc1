#include <iostream>

#include "l1line/cli/commands.hpp"

int main(int argc, char** argv) { return l1line::cli::run_cli(argc, argv, std::cout, std::cerr); }
