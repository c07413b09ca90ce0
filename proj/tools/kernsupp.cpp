#include <iostream>

#include "kernsupp/cli.hpp"

int main(int argc, char** argv) { return kernsupp::run_cli(argc, argv, std::cout, std::cerr); }
