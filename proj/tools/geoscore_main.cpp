#include <iostream>

#include "geoscore/cli.hpp"

int main(int argc, char** argv) { return geoscore::cli::run(argc, argv, std::cout, std::cerr); }
