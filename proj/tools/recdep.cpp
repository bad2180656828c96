#include "recdep/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return recdep::cli::run(argc, argv, std::cout, std::cerr); }
