#include "stpinn/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return stpinn::run_cli(argc, argv, std::cout, std::cerr); }
