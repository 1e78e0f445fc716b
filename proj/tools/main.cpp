#include "bench.hpp"

#include <iostream>

int main(int argc, char **argv) { return sdebench::run(argc, argv, std::cout, std::cerr); }
