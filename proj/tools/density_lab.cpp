#include <iostream>

#include "density_lab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dlab::run_cli(args, std::cout, std::cerr);
}
