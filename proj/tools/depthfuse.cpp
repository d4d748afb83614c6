#include <iostream>

#include "depthfuse/cli.hpp"

int main(int argc, char** argv) { return depthfuse::cli::run_cli(argc, argv, std::cout, std::cerr); }
