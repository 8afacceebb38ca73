#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return combspec::cli::run(argc, argv, std::cout, std::cerr); }
