#include <iostream>

#include "pilotforge/cli.hpp"

int main(int argc, char** argv) { return pilotforge::cli::run(argc, argv, std::cout, std::cerr); }
