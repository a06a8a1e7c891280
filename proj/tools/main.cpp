#include <iostream>
#include <string>
#include <vector>

#include "spectral_tail/cli/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return spectral_tail::cli::run(args, std::cout, std::cerr);
}
