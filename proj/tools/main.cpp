#include "adamdp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return adamdp::run_cli(argc, argv, std::cout, std::cerr); }
