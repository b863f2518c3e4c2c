#include <iostream>

#include "fel/cli.hpp"

int main(int argc, char** argv) { return fel::run_cli(argc, argv, std::cout, std::cerr); }
