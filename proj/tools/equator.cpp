#include <iostream>

#include "equator/cli.hpp"

int main(int argc, char** argv) {
  return equator::cli::run_cli(argc, argv, std::cout, std::cerr);
}
