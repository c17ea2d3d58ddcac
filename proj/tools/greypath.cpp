#include <iostream>

#include "greypath/cli.hpp"

int main(int argc, char** argv) { return greypath::cli::run(argc, argv, std::cout, std::cerr); }
