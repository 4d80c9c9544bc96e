#include <iostream>

#include "vidde/commands.hpp"

int main(int argc, char** argv) { return vidde::run_cli(argc, argv, std::cout, std::cerr); }
