#include <iostream>

#include "krgg/cli.hpp"

int main(int argc, char** argv) { return krgg::run_cli(argc, argv, std::cout, std::cerr); }
