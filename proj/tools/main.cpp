#include <iostream>

#include "standoff/cli.hpp"

int main(int argc, char** argv) { return standoff::run_cli(argc, argv, std::cout, std::cerr); }
