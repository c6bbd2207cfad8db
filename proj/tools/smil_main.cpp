#include <iostream>

#include "smil_cli.hpp"

int main(int argc, char** argv) { return smil::cli::run(argc, argv, std::cout, std::cerr); }
