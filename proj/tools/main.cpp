#include "infbern/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return infbern::run(argc, argv, std::cout, std::cerr); }
