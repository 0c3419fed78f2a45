#include <iostream>

#include "upsr_cli/app.hpp"

int main(int argc, char** argv) { return upsr::cli::run(argc, argv, std::cout, std::cerr); }
