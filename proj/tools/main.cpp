#include <iostream>

#include "permugibbs/cli.hpp"

int main(int argc, char** argv) { return permugibbs::run_cli(argc, argv, std::cout, std::cerr); }
