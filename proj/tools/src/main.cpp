#include <iostream>

#include "orthomart/cli/app.hpp"

int main(int argc, char** argv) { return orthomart::cli::run(argc, argv, std::cout, std::cerr); }
