#include <iostream>

#include "opfree/cli.hpp"

int main(int argc, char** argv) { return opfree::cli::main_entry(argc, argv, std::cout, std::cerr); }
