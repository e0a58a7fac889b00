#include <iostream>

#include "hawkstego/cli.hpp"

int main(int argc, char** argv) { return hawkstego::cli::run(argc, argv, std::cout, std::cerr); }
