#include <iostream>

#include "qct/cli.hpp"

int main(int argc, char** argv) { return qct::cli::run_command(argc, argv, std::cout, std::cerr); }
