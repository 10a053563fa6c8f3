#include <iostream>
#include <string>
#include <vector>

#include "otbcd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return otbcd::cli::run(args, std::cout, std::cerr);
}
