#include <iostream>
#include <string>
#include <vector>

#include "stpete/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return stpete::cli::run(args, std::cout, std::cerr);
}
