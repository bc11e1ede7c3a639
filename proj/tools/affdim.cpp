#include <iostream>

#include "affdim/cli.hpp"

int main(int argc, char** argv) { return affdim::cli::main_entry(argc, argv, std::cout, std::cerr); }
