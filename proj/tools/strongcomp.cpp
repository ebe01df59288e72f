#include "strongcomp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return strongcomp::cli::dispatch(argc, argv, std::cout, std::cerr); }
