#include <iostream>
#include <string>
#include <vector>

#include "mcl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mcl::cli_main(args, std::cout, std::cerr);
}
