#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return oamturb::cli::run(argc, argv, std::cout, std::cerr); }
