#include <iostream>

#include "demfill/cli.hpp"

int main(int argc, char** argv) { return demfill::run_cli(argc, argv, std::cout, std::cerr); }
