#include <iostream>

#include "bethe_forge/cli.hpp"

int main(int argc, char** argv) { return bf::run_cli(argc, argv, std::cout, std::cerr); }
