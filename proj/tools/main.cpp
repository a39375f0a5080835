#include <iostream>

#include "collapse/cli.hpp"

int main(int argc, char** argv) { return collapse::cli::run(argc, argv, std::cout, std::cerr); }
