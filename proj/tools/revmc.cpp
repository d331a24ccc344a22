#include <iostream>
#include <string>
#include <vector>

#include "revmc/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return revmc::cli::run(args, std::cout, std::cerr);
}
