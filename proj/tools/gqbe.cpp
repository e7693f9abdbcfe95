#include <iostream>

#include "gqbe/cli.hpp"

int main(int argc, char** argv) { return gqbe::run_cli(argc, argv, std::cout, std::cerr); }
