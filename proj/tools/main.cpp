#include "commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return l4l::cli::run_cli(argc, argv, std::cout, std::cerr); }
