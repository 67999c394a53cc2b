#include "stokes3d/cli_io.hpp"

#include <iostream>

int main(int argc, char** argv) { return stokes3d::run_cli(argc, argv, std::cout, std::cerr); }
