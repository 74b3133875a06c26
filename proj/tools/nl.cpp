#include <iostream>

#include "natlearn/cli.hpp"

int main(int argc, char** argv) { return natlearn::cli::run_cli(argc, argv, std::cout, std::cerr); }
