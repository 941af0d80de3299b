#include <iostream>

#include "strassen/cli.hpp"

int main(int argc, char** argv) { return strassen::run_cli(argc, argv, std::cout, std::cerr); }
