#include <iostream>

#include "hetcp/cli/commands.hpp"

int main(int argc, char** argv) { return hetcp::cli::run(argc, argv, std::cout, std::cerr); }
