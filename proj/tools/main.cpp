#include <iostream>

#include "helm/cli.hpp"

int main(int argc, char** argv) { return helm::cli::main(argc, argv, std::cout, std::cerr); }
