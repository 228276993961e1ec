#include <iostream>

#include "bucksim/cli.hpp"

int main(int argc, char** argv) { return bucksim::main_entry(argc, argv, std::cout, std::cerr); }
