#include <iostream>

#include "morphic/cli.hpp"

int main(int argc, char** argv) { return morphic::run_cli(argc, argv, std::cout, std::cerr); }
