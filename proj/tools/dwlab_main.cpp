#include <iostream>
#include <string>
#include <vector>

#include "dwlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dwlab::run_cli(args, std::cout, std::cerr);
}
