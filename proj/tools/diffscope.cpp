#include <iostream>

#include "diffscope/cli.hpp"

int main(int argc, char** argv) { return diffscope::cli::run(argc, argv, std::cout, std::cerr); }
