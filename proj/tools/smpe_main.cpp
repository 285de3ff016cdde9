#include <iostream>

#include "smpe/io/cli.hpp"

int main(int argc, char** argv) { return smpe::run_command(argc, argv, std::cout, std::cerr); }
