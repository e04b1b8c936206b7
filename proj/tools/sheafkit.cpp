#include <iostream>
#include <string>
#include <vector>

#include "sheafkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sheafkit::run_cli(args, std::cout, std::cerr);
}
