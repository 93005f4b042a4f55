#include <iostream>

#include <twaust/cli.hpp>

int main(int argc, char** argv) { return twaust::cli::run(argc, argv, std::cout, std::cerr); }
