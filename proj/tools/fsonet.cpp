#include "fsonet/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return fsonet::cli::run(argc, argv, std::cout, std::cerr); }
