#include <iostream>

#include "qretro/cli.hpp"

int main(int argc, char **argv) { return qretro::run_cli(argc, argv, std::cout, std::cerr); }
