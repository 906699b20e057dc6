#include <iostream>

#include "salmanip/tools/cli.hpp"

int main(int argc, char** argv) {
  return salmanip::tools::run_cli(argc, argv, std::cout, std::cerr);
}
